"""Constructive Caratheodory reduction over the joint numerical range.

Two reduction moves are combined:

* the classical one: if the atom points are affinely dependent, shift
  weight along an affine dependence until some weight hits zero;
* the connected one: with ``m`` affinely independent atoms spanning a frame
  ``P``, slide one witness along a path that stays inside ``W ∩ P`` toward
  another witness. The barycentric coordinates of the target change
  continuously, and before the moving vertex reaches the other one some
  coordinate must cross zero, which frees one atom.

Paths inside ``W ∩ P`` exist when ``P`` has codimension 0, 1, or 2 (the last
only for matrix size ``n >= 3``), so starting from ``d + 1`` atoms one gets
down to ``d - 1`` atoms, and to ``d - 2`` when ``d >= 3`` and ``n >= 3``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatch,
    EventScanFailed,
    InconsistentInput,
    NonMember,
    PreconditionError,
    ReductionStalled,
)
from .hull import MAX_ITER, WEIGHT_FLOOR, Atom, combination, project_to_hull
from .joint_range import OperatorTuple, evaluate, sample_points
from .linalg import RANK_TOL, AffineFrame, affine_coordinates, affine_frame
from .paths import (
    RETRIES,
    SAMPLES,
    PathConstraint,
    codim1_path,
    codim2_path,
    polish,
    sphere_path,
)

logger = logging.getLogger(__name__)

DECOMPOSITION_TOL = 1e-6
BISECTION_TOL = 1e-12
DEGENERACY_TOL = 1e-9
NEGATIVE_CLIP = 1e-12


def theorem_bound(d: int, n: int) -> int:
    """Guaranteed atom count: ``d - 1``, or ``d - 2`` once ``d >= 3`` and ``n >= 3``."""
    if d <= 2:
        return 1
    return d - 2 if n >= 3 else d - 1


@dataclass
class ConvexDecomposition:
    """``target`` written as a convex combination of range points."""

    target: np.ndarray
    atoms: list[Atom]
    residual: float
    bound_used: int

    @property
    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.atoms])

    @property
    def witnesses(self) -> np.ndarray:
        return np.array([a.witness for a in self.atoms])

    @property
    def points(self) -> np.ndarray:
        return np.array([a.point for a in self.atoms])

    def __len__(self):
        return len(self.atoms)


def _affine_dependence(Q: np.ndarray, rank_tol: float, scale: float) -> np.ndarray | None:
    """Coefficients ``a`` with ``sum a_i q_i = 0`` and ``sum a_i = 0``, if any."""
    m, d = Q.shape
    if m < 2:
        return None
    M = np.vstack([np.ones(m), ((Q - Q.mean(axis=0)) / scale).T])
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    if m > d + 1 or s[-1] < rank_tol * s[0]:
        return Vt[-1]
    return None


def _point_scale(Q: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(Q))))


def is_affinely_independent(points, rank_tol: float = RANK_TOL) -> bool:
    Q = np.atleast_2d(np.asarray(points, dtype=float))
    return _affine_dependence(Q, rank_tol, _point_scale(Q)) is None


def caratheodory_weights(points, weights, rank_tol: float = RANK_TOL, floor: float = WEIGHT_FLOOR):
    """Classical Caratheodory elimination on plain points and weights.

    Returns ``(indices, weights)`` of the surviving points, which are
    affinely independent; ``sum w_i q_i`` and ``sum w_i`` are preserved.
    """
    Q = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.asarray(weights, dtype=float).copy()
    if np.any(w < 0):
        raise PreconditionError("weights must be nonnegative")
    idx = np.arange(len(w))
    keep = w > floor
    idx, w = idx[keep], w[keep]
    scale = _point_scale(Q)
    while len(idx) > 1:
        alpha = _affine_dependence(Q[idx], rank_tol, scale)
        if alpha is None:
            break
        # deterministic sign: the dominant coefficient loses weight
        if alpha[np.argmax(np.abs(alpha))] < 0:
            alpha = -alpha
        pos = alpha > 1e-14 * np.max(np.abs(alpha))
        ratios = w[pos] / alpha[pos]
        t = float(np.min(ratios))
        w = w - t * alpha
        w[np.flatnonzero(pos)[np.argmin(ratios)]] = 0.0
        w[np.abs(w) <= NEGATIVE_CLIP] = np.maximum(w[np.abs(w) <= NEGATIVE_CLIP], 0.0)
        w = np.clip(w, 0.0, None)
        keep = w > floor
        idx, w = idx[keep], w[keep]
        w = w / w.sum()
    return idx, w


def classical_reduce(atoms: list[Atom], p, tol: float = DECOMPOSITION_TOL, rank_tol: float = RANK_TOL) -> list[Atom]:
    """Drop atoms until their range points are affinely independent.

    Each elimination solves an affine dependence ``sum a_i q_i = 0``,
    ``sum a_i = 0`` and shifts the weights by ``t* = min_{a_i > 0} w_i / a_i``.
    """
    p = np.asarray(p, dtype=float)
    res = float(np.linalg.norm(combination(atoms) - p))
    if res > tol:
        raise InconsistentInput(f"atoms reproduce the point only to {res:.3e} > {tol:.3e}")
    Q = np.array([a.point for a in atoms])
    idx, w = caratheodory_weights(Q, [a.weight for a in atoms], rank_tol)
    return [Atom(float(wi), atoms[i].witness, atoms[i].point) for i, wi in zip(idx, w)]


def frame_constraint(Ts: OperatorTuple, frame: AffineFrame, flat_tol: float = 1e-10) -> PathConstraint:
    """Quadratic-form constraints keeping range points inside ``frame``.

    A normal ``u`` with offset ``c`` gives ``S = sum_k u_k T_k - c I``.
    Normal directions in which the whole joint range is flat (``S`` is zero
    up to ``flat_tol * scale``) are discarded, since every unit vector
    satisfies them.
    """
    if not frame.codim:
        return PathConstraint()
    eye = np.eye(Ts.n)
    mats = np.stack([Ts.combine(u) - c * eye for u, c in zip(frame.normals, frame.offsets)])
    flat = mats.reshape(len(mats), -1)
    A, s, _ = np.linalg.svd(np.hstack([flat.real, flat.imag]), full_matrices=False)
    eff = s > flat_tol * Ts.scale
    A = A[:, eff]
    normals = A.T @ frame.normals
    offsets = A.T @ frame.offsets
    combos = np.tensordot(A.T, mats, axes=1)
    labels = tuple((u, float(c)) for u, c in zip(normals, offsets))
    return PathConstraint(tuple(combos), labels)


def _decomposition(Ts, p, atoms, bound_used) -> ConvexDecomposition:
    W = np.array([a.witness for a in atoms])
    w = np.array([a.weight for a in atoms])
    res = float(np.linalg.norm(w @ Ts(W) - p))
    return ConvexDecomposition(np.asarray(p, dtype=float), list(atoms), res, bound_used)


def connected_reduce_step(
    Ts: OperatorTuple,
    decomp: ConvexDecomposition,
    rank_tol: float = RANK_TOL,
    samples: int = SAMPLES,
    retries: int = RETRIES,
    seed=0,
) -> ConvexDecomposition:
    """Remove one atom by sliding a witness through ``W ∩ P``.

    ``P`` is the affine span of the atom points. The smallest-weight
    witness travels toward the largest-weight one; the first parameter at
    which a barycentric coordinate of the target reaches zero is located by
    a coarse scan over the path samples followed by bisection.
    """
    atoms = decomp.atoms
    m = len(atoms)
    p = np.asarray(decomp.target, dtype=float)
    w = np.array([a.weight for a in atoms])
    if m < 2:
        raise PreconditionError("need at least two atoms")
    if np.any(w <= 0):
        raise PreconditionError("atom weights must be strictly positive")
    Q = np.array([a.point for a in atoms])
    frame = affine_frame(Q, rank_tol, scale=Ts.scale)
    if frame.dim != m - 1:
        raise PreconditionError("atom points are affinely dependent")
    constraint = frame_constraint(Ts, frame)
    if constraint.codim > 2 or (constraint.codim == 2 and Ts.n < 3):
        raise PreconditionError(
            f"no witness path available for codimension {constraint.codim} with n={Ts.n}"
        )

    src = int(np.argmin(w))
    others = [i for i in range(m) if i != src]
    dst = others[int(np.argmax(w[others]))]
    h0 = polish(atoms[src].witness, constraint)
    h1 = polish(atoms[dst].witness, constraint)
    if constraint.codim == 0:
        path = sphere_path(h0, h1, samples)
    elif constraint.codim == 1:
        path = codim1_path(constraint.matrices[0], h0, h1, samples)
    else:
        path = codim2_path(*constraint.matrices, h0, h1, samples, retries, seed)

    Yfix = frame.coordinates(Q)
    y = frame.coordinates(p)

    def state(h):
        Y = Yfix.copy()
        Y[src] = frame.coordinates(Ts(h))
        r = affine_coordinates(Y, y, DEGENERACY_TOL)
        if r.degenerate:
            return "degenerate", r
        return ("cross" if np.min(r.coords) < 0 else "ok"), r

    ts = path.ts
    first_bad = None
    for i, h in enumerate(path.vectors):
        kind, r = state(h)
        if kind != "ok":
            first_bad = i
            break
    if first_bad is None:
        raise EventScanFailed("no barycentric event along the witness path")

    if first_bad == 0:
        h_lo, r_lo = path.vectors[0], r
        h_hi, kind_hi, r_hi = h_lo, kind, r
    else:
        lo, hi = float(ts[first_bad - 1]), float(ts[first_bad])
        h_lo, h_hi = path.vectors[first_bad - 1], path.vectors[first_bad]
        _, r_lo = state(h_lo)
        kind_hi, r_hi = kind, r
        while hi - lo > BISECTION_TOL:
            mid = 0.5 * (lo + hi)
            h_mid = path.at(mid)
            k_mid, r_mid = state(h_mid)
            if k_mid == "ok":
                lo, h_lo, r_lo = mid, h_mid, r_mid
            else:
                hi, h_hi, kind_hi, r_hi = mid, h_mid, k_mid, r_mid

    if kind_hi == "cross":
        beta_lo = r_lo.coords if r_lo.coords is not None else r_hi.coords
        drop = r_hi.coords < 0
        beta = np.clip(beta_lo, 0.0, None)
        beta[drop] = 0.0
        new = []
        for i, a in enumerate(atoms):
            if beta[i] <= 0.0:
                continue
            if i == src:
                new.append(Atom(float(beta[i]), h_lo, evaluate(Ts, h_lo).coords))
            else:
                new.append(Atom(float(beta[i]), a.witness, a.point))
        total = sum(a.weight for a in new)
        for a in new:
            a.weight /= total
        logger.debug("event: dropped %d of %d atoms", m - len(new), m)
    else:
        # the vertex set collapsed first: fall back to affine elimination
        beta_lo = r_lo.coords if r_lo is not None and r_lo.coords is not None else w
        moved = [
            Atom(float(max(beta_lo[i], 0.0)), h_hi if i == src else a.witness,
                 evaluate(Ts, h_hi).coords if i == src else a.point)
            for i, a in enumerate(atoms)
        ]
        idx, wts = caratheodory_weights(np.array([a.point for a in moved]), [a.weight for a in moved], rank_tol=max(rank_tol, DEGENERACY_TOL))
        new = [Atom(float(wi), moved[i].witness, moved[i].point) for i, wi in zip(idx, wts)]

    if len(new) >= m:
        raise EventScanFailed("event located but no atom could be dropped")
    return _decomposition(Ts, p, new, decomp.bound_used)


def decompose(
    Ts: OperatorTuple,
    p=None,
    atoms: list[Atom] | None = None,
    target="auto",
    tol: float = DECOMPOSITION_TOL,
    eps: float | None = None,
    max_iter: int = MAX_ITER,
    rank_tol: float = RANK_TOL,
    samples: int = SAMPLES,
    retries: int = RETRIES,
    seed=0,
) -> ConvexDecomposition:
    """Write ``p`` as a convex combination of few points of the joint range.

    With ``target="auto"`` the result has at most ``d - 1`` atoms, or
    ``d - 2`` when ``d >= 3`` and ``n >= 3``. Either a bare point ``p``
    (projected onto conv(W) first) or explicit ``atoms`` can be given.

    Raises :class:`NonMember` with a separating direction when ``p`` is
    outside conv(W), and :class:`ReductionStalled` if the loop ends above
    the target or outside the residual budget ``tol``.
    """
    if atoms is None:
        if p is None:
            raise ValueError("give either a point or explicit atoms")
        p = np.asarray(p, dtype=float)
        proj = project_to_hull(Ts, p, eps=eps, max_iter=max_iter)
        if proj.status == "nonmember":
            raise NonMember(proj.certificate, proj.margin, proj.distance)
        if proj.status != "member" and proj.distance > tol:
            raise ReductionStalled(
                f"membership undecided after {proj.iterations} iterations "
                f"(distance {proj.distance:.3e})",
                state=proj,
            )
        atoms = proj.atoms
    else:
        atoms = [Atom(float(a.weight), np.asarray(a.witness, dtype=complex), evaluate(Ts, a.witness).coords) for a in atoms]
        if p is None:
            p = combination(atoms)
        p = np.asarray(p, dtype=float)
    if p.shape != (Ts.d,):
        raise DimensionMismatch(f"point has shape {p.shape}, expected ({Ts.d},)")

    bound = theorem_bound(Ts.d, Ts.n)
    goal = bound if target == "auto" else int(target)
    if goal < 1:
        raise ValueError("target atom count must be >= 1")
    decomp = _decomposition(Ts, p, atoms, bound if target == "auto" else goal)

    step = 0
    while len(decomp.atoms) > 1:
        Q = decomp.points
        if not is_affinely_independent(Q, rank_tol):
            reduced = classical_reduce(decomp.atoms, p, tol=max(tol, 10 * decomp.residual), rank_tol=rank_tol)
            decomp = _decomposition(Ts, p, reduced, decomp.bound_used)
            continue
        if len(decomp.atoms) <= goal:
            break
        frame = affine_frame(Q, rank_tol, scale=Ts.scale)
        codim = frame_constraint(Ts, frame).codim
        if codim > 2 or (codim == 2 and Ts.n < 3):
            break
        decomp = connected_reduce_step(Ts, decomp, rank_tol, samples, retries, seed=(seed, step))
        step += 1
        logger.debug("reduction step %d: %d atoms, residual %.3e", step, len(decomp), decomp.residual)

    if decomp.residual > tol:
        raise ReductionStalled(f"residual {decomp.residual:.3e} exceeds budget {tol:.3e}", state=decomp)
    if len(decomp.atoms) > goal:
        raise ReductionStalled(
            f"reduction stopped at {len(decomp.atoms)} atoms, target {goal}", state=decomp
        )
    return decomp


def verify(Ts: OperatorTuple, decomp: ConvexDecomposition) -> dict:
    """Recompute residual and invariants from the raw witnesses."""
    W = [np.asarray(a.witness, dtype=complex) for a in decomp.atoms]
    for h in W:
        if h.shape != (Ts.n,):
            raise DimensionMismatch(f"witness has shape {h.shape}, expected ({Ts.n},)")
    target = np.asarray(decomp.target, dtype=float)
    if target.shape != (Ts.d,):
        raise DimensionMismatch(f"target has shape {target.shape}, expected ({Ts.d},)")
    w = np.array([a.weight for a in decomp.atoms], dtype=float)
    pts = Ts(np.array(W)) if W else np.zeros((0, Ts.d))
    return {
        "residual": float(np.linalg.norm(w @ pts - target)) if W else float(np.linalg.norm(target)),
        "weight_sum_error": float(abs(w.sum() - 1.0)),
        "witness_norm_errors": [float(abs(np.linalg.norm(h) - 1.0)) for h in W],
        "atom_count": len(W),
        "min_weight": float(w.min()) if W else 0.0,
        "bound_used": decomp.bound_used,
    }


def random_hull_point(Ts: OperatorTuple, rng, k: int | None = None) -> np.ndarray:
    """Dirichlet-weighted combination of ``k`` (default ``d + 1``) sampled range points."""
    rng = np.random.default_rng(rng)
    k = Ts.d + 1 if k is None else k
    X = sample_points(Ts, k, seed=int(rng.integers(2**63)))
    return rng.dirichlet(np.ones(k)) @ X


def caratheodory_experiment(d: int, n: int, trials: int, seed=0, tol: float = DECOMPOSITION_TOL) -> dict:
    """Atom counts of ``decompose`` over random tuples and random hull points.

    Trial ``i`` draws from the ``i``-th child of ``SeedSequence(seed)``, so
    the report depends only on the arguments. Failed trials are recorded,
    not raised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    bound = theorem_bound(d, n)
    counts, failures, residuals = [], [], []
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(ss)
        Ts = OperatorTuple.random(d, n, rng)
        p = random_hull_point(Ts, rng)
        try:
            dec = decompose(Ts, p, tol=tol, seed=i)
        except Exception as exc:  # recorded per trial
            failures.append({"trial": i, "error": f"{type(exc).__name__}: {exc}"})
            counts.append(None)
            continue
        counts.append(len(dec))
        residuals.append(dec.residual)
        if len(dec) > bound:
            failures.append({"trial": i, "error": f"{len(dec)} atoms exceed bound {bound}"})
    ok = [c for c in counts if c is not None]
    hist = {}
    for c in sorted(ok):
        hist[c] = hist.get(c, 0) + 1
    return {
        "d": d,
        "n": n,
        "trials": trials,
        "seed": seed,
        "bound": bound,
        "max_atoms": max(ok) if ok else None,
        "histogram": hist,
        "counts": counts,
        "max_residual": max(residuals) if residuals else None,
        "failures": failures,
    }
