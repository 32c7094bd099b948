import math

import numpy as np
import pytest

from jointrange.exceptions import DimensionMismatch, InconsistentInput, NonMember, PreconditionError
from jointrange.hull import Atom, check_separation
from jointrange.joint_range import OperatorTuple, evaluate, sample_points
from jointrange.reduce import (
    ConvexDecomposition,
    caratheodory_experiment,
    caratheodory_weights,
    classical_reduce,
    connected_reduce_step,
    decompose,
    is_affinely_independent,
    random_hull_point,
    theorem_bound,
    verify,
)

from .conftest import SX, SY, SZ


def bloch_witness(theta, phi):
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def bloch_vector(h):
    a, b = h
    z = np.conj(a) * b
    return np.array([2 * z.real, 2 * z.imag, abs(a) ** 2 - abs(b) ** 2])


def pauli_coordinates(Ts):
    """``T_k = c_k I + sum_j A_kj sigma_j`` for 2x2 Hermitian ``T_k``."""
    c = np.array([np.trace(T).real / 2 for T in Ts.ops])
    A = np.array([[np.trace(T @ s).real / 2 for s in (SX, SY, SZ)] for T in Ts.ops])
    return c, A


def plain_atoms(points, weights):
    return [Atom(float(w), np.array([1.0 + 0j]), np.asarray(q, dtype=float)) for q, w in zip(points, weights)]


def test_theorem_bound():
    assert theorem_bound(1, 5) == 1
    assert theorem_bound(2, 2) == 1
    assert theorem_bound(3, 2) == 2
    assert theorem_bound(3, 3) == 1
    assert theorem_bound(6, 2) == 5
    assert theorem_bound(6, 4) == 4


class TestClassicalReduce:
    def test_collinear_keeps_outer_pair(self):
        # dependence (1, -2, 1) / sqrt(6); the middle point carries the dominant
        # coefficient, so t* = (1/3) / 2 and the outer weights become 1/2 each
        atoms = plain_atoms([(0, 0), (1, 0), (2, 0)], [1 / 3] * 3)
        out = classical_reduce(atoms, [1.0, 0.0])
        assert len(out) == 2
        np.testing.assert_allclose(sorted(a.point[0] for a in out), [0.0, 2.0])
        np.testing.assert_allclose([a.weight for a in out], [0.5, 0.5], atol=1e-14)

    def test_duplicates_merge(self):
        atoms = plain_atoms([(0, 1), (0, 1), (1, 0)], [0.2, 0.3, 0.5])
        out = classical_reduce(atoms, [0.5, 0.5])
        assert len(out) == 2
        np.testing.assert_allclose(sum(a.weight * a.point for a in out), [0.5, 0.5], atol=1e-14)

    def test_independent_input_unchanged(self):
        atoms = plain_atoms([(0, 0), (1, 0), (0, 1)], [0.2, 0.3, 0.5])
        out = classical_reduce(atoms, [0.3, 0.5])
        assert [a.weight for a in out] == pytest.approx([0.2, 0.3, 0.5])

    def test_inconsistent_input(self):
        atoms = plain_atoms([(0, 0), (1, 0)], [0.5, 0.5])
        with pytest.raises(InconsistentInput):
            classical_reduce(atoms, [0.5, 0.1])

    def test_random_point_clouds(self, rng):
        for _ in range(50):
            d = int(rng.integers(1, 5))
            m = int(rng.integers(1, 12))
            Q = rng.standard_normal((m, d))
            w = rng.dirichlet(np.ones(m))
            idx, v = caratheodory_weights(Q, w)
            assert len(idx) <= d + 1
            assert is_affinely_independent(Q[idx])
            assert np.all(v > 0) and abs(v.sum() - 1) <= 1e-12
            np.testing.assert_allclose(v @ Q[idx], w @ Q, atol=1e-10)

    def test_negative_weights_rejected(self):
        with pytest.raises(PreconditionError):
            caratheodory_weights([[0.0], [1.0]], [1.5, -0.5])


def triangle_decomposition(paulis):
    hs = [bloch_witness(math.pi / 2, phi) for phi in (0, 2 * math.pi / 3, 4 * math.pi / 3)]
    atoms = [Atom.from_witness(paulis, h, 1 / 3) for h in hs]
    W = np.array(hs)
    res = float(np.linalg.norm(np.full(3, 1 / 3) @ paulis(W)))
    return ConvexDecomposition(np.zeros(3), atoms, res, 2)


class TestConnectedStep:
    def test_pauli_triangle(self, paulis):
        dec = triangle_decomposition(paulis)
        assert dec.residual <= 1e-15
        out = connected_reduce_step(paulis, dec)
        assert len(out) == 2
        assert verify(paulis, out)["residual"] <= 1e-8
        assert abs(out.weights.sum() - 1) <= 1e-12

    def test_disk_two_atoms_to_one(self):
        # (sigma_x, sigma_z) maps the Bloch sphere onto the closed unit disk
        Ts = OperatorTuple([SX, SZ])
        h_plus = np.array([1, 1]) / math.sqrt(2)
        h_minus = np.array([1, -1]) / math.sqrt(2)
        atoms = [Atom.from_witness(Ts, h_plus, 0.5), Atom.from_witness(Ts, h_minus, 0.5)]
        dec = ConvexDecomposition(np.zeros(2), atoms, 0.0, 1)
        out = connected_reduce_step(Ts, dec)
        assert len(out) == 1
        np.testing.assert_allclose(evaluate(Ts, out.witnesses[0]).coords, [0, 0], atol=1e-8)

    def test_zero_weight_rejected(self, paulis):
        dec = triangle_decomposition(paulis)
        dec.atoms[0].weight = 0.0
        with pytest.raises(PreconditionError):
            connected_reduce_step(paulis, dec)

    def test_single_atom_rejected(self, paulis):
        dec = triangle_decomposition(paulis)
        dec.atoms = dec.atoms[:1]
        with pytest.raises(PreconditionError):
            connected_reduce_step(paulis, dec)


class TestDecompose:
    def test_two_operators_single_atom(self, rng):
        Ts = OperatorTuple.random(2, 4, rng)
        p = random_hull_point(Ts, rng)
        dec = decompose(Ts, p)
        assert len(dec) == 1
        assert dec.residual <= 1e-6

    def test_pauli_origin_needs_two(self, paulis):
        dec = decompose(paulis, np.zeros(3))
        assert len(dec) == 2
        assert dec.residual <= 1e-6
        # no single unit vector reaches the origin: Bloch vectors have norm 1
        X = sample_points(paulis, 100_000, seed=5)
        assert np.min(np.linalg.norm(X, axis=1)) >= 1 - 1e-12

    def test_four_operators_size_three(self, rng):
        Ts = OperatorTuple.random(4, 3, rng)
        dec = decompose(Ts, random_hull_point(Ts, rng))
        assert len(dec) <= 2
        assert dec.residual <= 1e-6

    def test_nonmember(self, paulis):
        with pytest.raises(NonMember) as info:
            decompose(paulis, np.array([0.0, 0.0, 2.0]))
        assert check_separation(paulis, [0, 0, 2], info.value.certificate) > 0

    def test_explicit_atoms(self, paulis):
        dec = triangle_decomposition(paulis)
        out = decompose(paulis, atoms=dec.atoms)
        assert len(out) == 2
        np.testing.assert_allclose(out.target, 0, atol=1e-15)

    def test_explicit_target(self, rng):
        Ts = OperatorTuple.random(4, 2, rng)
        dec = decompose(Ts, random_hull_point(Ts, rng), target=4)
        assert len(dec) <= 4 and dec.bound_used == 4

    def test_dimension_mismatch(self, paulis):
        with pytest.raises(DimensionMismatch):
            decompose(paulis, np.zeros(2))

    def test_qubit_pair_matches_grid_oracle(self, rng):
        # Bloch-sphere grid: every point of W(T1, T2) for 2x2 matrices is
        # T(r) = c + A r with |r| = 1
        Ts = OperatorTuple.random(2, 2, rng)
        c, A = pauli_coordinates(Ts)
        th, ph = np.meshgrid(np.linspace(0, math.pi, 2000), np.linspace(0, 2 * math.pi, 2000), indexing="ij")
        R = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1).reshape(-1, 3)
        for _ in range(3):
            p = random_hull_point(Ts, rng)
            dec = decompose(Ts, p)
            assert len(dec) == 1
            h = dec.witnesses[0]
            np.testing.assert_allclose(c + A @ bloch_vector(h), p, atol=1e-6)
            dist = np.linalg.norm(c + R @ A.T - p, axis=1)
            near = R[dist <= 1e-2]
            assert len(near) > 0
            assert np.min(np.linalg.norm(near - bloch_vector(h), axis=1)) <= 2e-2

    @pytest.mark.slow
    def test_theorem_consistency(self, rng):
        for trial in range(100):
            d, n = int(rng.integers(2, 7)), int(rng.integers(2, 9))
            Ts = OperatorTuple.random(d, n, rng)
            dec = decompose(Ts, random_hull_point(Ts, rng), seed=trial)
            report = verify(Ts, dec)
            assert report["atom_count"] <= theorem_bound(d, n)
            assert report["residual"] <= 1e-6
            assert report["weight_sum_error"] <= 1e-10
            assert max(report["witness_norm_errors"]) <= 1e-12
            assert report["min_weight"] > 0


class TestVerify:
    def test_exact_eigenvectors(self, paulis):
        atoms = [Atom.from_witness(paulis, np.array([1, 0]), 0.5), Atom.from_witness(paulis, np.array([0, 1]), 0.5)]
        report = verify(paulis, ConvexDecomposition(np.zeros(3), atoms, 0.0, 2))
        assert report["residual"] <= 1e-12
        assert report["atom_count"] == 2

    def test_weight_sum_error(self, paulis):
        atoms = [Atom.from_witness(paulis, np.array([1, 0]), 0.505), Atom.from_witness(paulis, np.array([0, 1]), 0.505)]
        report = verify(paulis, ConvexDecomposition(np.zeros(3), atoms, 0.0, 2))
        assert report["weight_sum_error"] == pytest.approx(0.01)

    def test_wrong_witness_length(self, paulis):
        atoms = [Atom(1.0, np.array([1, 0, 0], dtype=complex), np.zeros(3))]
        with pytest.raises(DimensionMismatch):
            verify(paulis, ConvexDecomposition(np.zeros(3), atoms, 0.0, 2))


class TestExperiment:
    def test_three_operators_size_three(self):
        report = caratheodory_experiment(3, 3, trials=30, seed=7)
        assert report["max_atoms"] == 1
        assert not report["failures"]
        assert report["max_residual"] <= 1e-6

    def test_three_qubit_operators_need_two(self):
        # W is the ellipsoid surface c + A S^2, so p is reachable by one atom
        # only when |A^-1 (p - c)| = 1
        report = caratheodory_experiment(3, 2, trials=20, seed=3)
        assert report["max_atoms"] == 2 and not report["failures"]
        for i, ss in enumerate(np.random.SeedSequence(3).spawn(20)):
            rng = np.random.default_rng(ss)
            Ts = OperatorTuple.random(3, 2, rng)
            p = random_hull_point(Ts, rng)
            c, A = pauli_coordinates(Ts)
            if abs(np.linalg.norm(np.linalg.solve(A, p - c)) - 1) > 1e-6:
                assert report["counts"][i] == 2

    def test_deterministic(self):
        a = caratheodory_experiment(3, 3, trials=5, seed=11)
        b = caratheodory_experiment(3, 3, trials=5, seed=11)
        assert a == b
