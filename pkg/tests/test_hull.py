import numpy as np
import pytest

from jointrange.exceptions import DimensionMismatch
from jointrange.hull import check_separation, hull_distance, project_to_hull
from jointrange.joint_range import OperatorTuple, evaluate, sample_points
from jointrange.linalg import random_unit_vector

from .conftest import SZ


def reconstructed(Ts, proj):
    return sum(a.weight * evaluate(Ts, a.witness).coords for a in proj.atoms)


def test_pauli_origin_is_member(paulis):
    proj = project_to_hull(paulis, np.zeros(3), eps=1e-8)
    assert proj.status == "member"
    assert proj.distance <= 1e-8
    assert np.linalg.norm(reconstructed(paulis, proj)) <= 1e-8
    assert sum(a.weight for a in proj.atoms) == pytest.approx(1.0, abs=1e-10)


def test_pauli_outside_point_has_certificate(paulis):
    proj = project_to_hull(paulis, np.array([0.0, 0.0, 2.0]))
    assert proj.status == "nonmember"
    np.testing.assert_allclose(proj.certificate, [0, 0, -1], atol=1e-8)
    # lambda_min(-sigma_z) - (0,0,-1).(0,0,2) = -1 + 2
    assert proj.margin == pytest.approx(1.0, abs=1e-8)


def test_interval_membership():
    proj = project_to_hull(OperatorTuple([SZ]), np.array([0.3]))
    assert proj.status == "member"
    assert len(proj.atoms) <= 2
    assert abs(reconstructed(OperatorTuple([SZ]), proj)[0] - 0.3) <= 1e-8


def test_check_separation_examples(paulis, rng):
    assert check_separation(paulis, [0, 0, 2], [0, 0, -1]) == pytest.approx(1.0)
    p = evaluate(paulis, random_unit_vector(2, rng)).coords
    for _ in range(20):
        assert check_separation(paulis, p, rng.standard_normal(3)) <= 1e-12


def test_check_separation_homogeneous(rng):
    Ts = OperatorTuple.random(3, 4, rng)
    p, g = rng.standard_normal(3), rng.standard_normal(3)
    assert check_separation(Ts, p, 2 * g) == pytest.approx(2 * check_separation(Ts, p, g), abs=1e-12)


def test_dimension_mismatch(paulis):
    with pytest.raises(DimensionMismatch):
        project_to_hull(paulis, np.zeros(2))


def test_max_iter_reported_as_status(rng):
    # an interior point cannot be matched by the single atom of the first iteration
    Ts = OperatorTuple.random(3, 4, rng)
    p = sample_points(Ts, 10, seed=1).mean(axis=0)
    proj = project_to_hull(Ts, p, max_iter=1)
    assert proj.status == "maxiter"
    assert proj.iterations == 1 and proj.certificate is None


def test_soundness_and_weight_floor(rng):
    for trial in range(40):
        d, n = rng.integers(1, 6), rng.integers(1, 7)
        Ts = OperatorTuple.random(d, n, rng)
        p = 2.0 * rng.standard_normal(d)
        proj = project_to_hull(Ts, p)
        weights = np.array([a.weight for a in proj.atoms])
        assert np.all(weights > 1e-12)
        assert abs(weights.sum() - 1) <= 1e-10
        assert len(proj.atoms) <= d + 1
        if proj.status == "member":
            assert proj.certificate is None
            assert np.linalg.norm(reconstructed(Ts, proj) - p) <= 1e-8 * (1 + np.linalg.norm(p))
        elif proj.status == "nonmember":
            assert check_separation(Ts, p, proj.certificate) > 0


def test_completeness_on_interior_points(rng):
    for trial in range(50):
        d, n = rng.integers(2, 6), rng.integers(2, 7)
        Ts = OperatorTuple.random(d, n, rng)
        X = sample_points(Ts, d + 2, seed=trial)
        p = rng.dirichlet(np.ones(d + 2)) @ X
        proj = project_to_hull(Ts, p)
        assert proj.status == "member"
        assert proj.distance <= 1e-8 * (1 + np.linalg.norm(p))


def test_hull_distance_closed_form(paulis):
    # conv(W) is the unit ball, so the distance is |p| - 1 outside and 0 inside
    for p in ([0, 0, 2], [1, 1, 1], [0.3, -0.2, 0.1]):
        lo, hi = hull_distance(paulis, np.array(p, dtype=float), tol=1e-9)
        expected = max(np.linalg.norm(p) - 1, 0.0)
        assert lo - 1e-12 <= expected <= hi + 1e-12
        assert hi - lo <= 1e-9


def test_hull_distance_brackets_projection(rng):
    for _ in range(10):
        Ts = OperatorTuple.random(4, 3, rng)
        p = 3 * rng.standard_normal(4)
        lo, hi = hull_distance(Ts, p)
        proj = project_to_hull(Ts, p)
        assert hi - lo <= 1e-9
        if proj.status == "nonmember":
            assert proj.margin <= hi + 1e-12 and proj.distance >= lo - 1e-12
        else:
            assert hi <= 1e-8 * (1 + np.linalg.norm(p))
