"""Continuous witness paths inside constraint sets of the unit sphere.

A constraint set is ``{h : ||h|| = 1, <S_j h, h> = 0 for all j}`` for zero,
one or two Hermitian matrices ``S_j``. Paths are returned densely sampled,
together with an evaluator for arbitrary ``t`` so callers can bisect
between samples.

* no constraint: great-circle interpolation on the sphere;
* one constraint: the phase trick ``normalize((1 - t) h0 + t e^{i theta} h1)``,
  where ``theta`` kills the cross term of the quadratic form, so the
  constraint holds exactly along the whole segment;
* two constraints (needs ``n >= 3``): compression to a 3-dimensional
  subspace containing both endpoints, then predictor-corrector tracking on
  the isotropic set of ``S_1 + i S_2`` with random waypoints as fallback.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import (
    ConstraintViolation,
    DimensionMismatch,
    InsufficientDimension,
    PathTrackingFailed,
)
from .linalg import as_hermitian, normalize, phase_align, slerp

ENDPOINT_TOL = 1e-9
PATH_TOL = 1e-8
STEP_TOL = 0.05
SAMPLES = 256
RETRIES = 8
PARALLEL_TOL = 1e-12


@dataclass(frozen=True)
class PathConstraint:
    """Hermitian matrices ``S_j`` whose quadratic forms must vanish.

    ``labels`` optionally records where each matrix came from, e.g. the
    ``(u_j, c_j)`` normal/offset pair of an affine frame.
    """

    matrices: tuple = ()
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "matrices", tuple(as_hermitian(S) for S in self.matrices))
        if len(self.matrices) > 2:
            raise ValueError("paths are only available for at most two constraints")

    @property
    def codim(self) -> int:
        return len(self.matrices)

    @property
    def scale(self) -> float:
        return max([1.0] + [float(np.linalg.norm(S, 2)) for S in self.matrices])

    def values(self, h) -> np.ndarray:
        return np.array([np.vdot(h, S @ h).real for S in self.matrices])

    def residual(self, h) -> float:
        return float(np.max(np.abs(self.values(h)), initial=0.0))


@dataclass
class WitnessPath:
    """Sampled path ``t -> h(t)`` with ``t`` running from 0 to 1."""

    ts: np.ndarray
    vectors: np.ndarray
    max_residual: float
    max_step: float
    kind: str
    evaluator: Callable[[float], np.ndarray] | None = field(default=None, repr=False)

    @property
    def samples(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.ts.tolist(), self.vectors))

    def at(self, t: float) -> np.ndarray:
        if self.evaluator is not None:
            return self.evaluator(float(t))
        i = int(np.clip(np.searchsorted(self.ts, t, side="right") - 1, 0, len(self.ts) - 2))
        s = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i])
        return slerp(self.vectors[i], self.vectors[i + 1], float(np.clip(s, 0.0, 1.0)))

    def __len__(self):
        return len(self.ts)


def _max_step(V: np.ndarray) -> float:
    if len(V) < 2:
        return 0.0
    return float(np.max(np.linalg.norm(np.diff(V, axis=0), axis=1)))


def _constant_path(h0: np.ndarray, kind: str, constraint: PathConstraint) -> WitnessPath:
    h0 = np.asarray(h0, dtype=complex)
    return WitnessPath(
        np.array([0.0, 1.0]),
        np.stack([h0, h0]),
        constraint.residual(h0),
        0.0,
        kind,
        lambda t: h0.copy(),
    )


def _parallel(h0, h1) -> bool:
    return abs(np.vdot(h0, h1)) >= 1.0 - PARALLEL_TOL


def _sampled(fn, samples, constraint, kind, step_tol) -> WitnessPath:
    while True:
        ts = np.linspace(0.0, 1.0, max(2, samples))
        V = np.stack([fn(t) for t in ts])
        step = _max_step(V)
        if step <= step_tol or samples > 1 << 16:
            break
        samples *= 2
    res = max((constraint.residual(h) for h in V), default=0.0) if constraint.codim else 0.0
    return WitnessPath(ts, V, res, step, kind, fn)


def _check_pair(h0, h1):
    h0 = np.asarray(h0, dtype=complex)
    h1 = np.asarray(h1, dtype=complex)
    if h0.shape != h1.shape or h0.ndim != 1:
        raise DimensionMismatch(f"endpoints have shapes {h0.shape} and {h1.shape}")
    for h in (h0, h1):
        if abs(np.linalg.norm(h) - 1.0) > 1e-10:
            raise ValueError("path endpoints must be unit vectors")
    return h0, h1


def sphere_path(h0, h1, samples: int = SAMPLES, step_tol: float = STEP_TOL) -> WitnessPath:
    """Unconstrained geodesic path between two unit vectors."""
    h0, h1 = _check_pair(h0, h1)
    none = PathConstraint()
    if _parallel(h0, h1):
        return _constant_path(h0, "sphere", none)
    return _sampled(lambda t: slerp(h0, h1, t), samples, none, "sphere", step_tol)


def correct(h, matrices: Sequence[np.ndarray], tol: float, max_iter: int = 30, max_move: float = 0.5):
    """Gauss-Newton projection of ``h`` onto ``{||h|| = 1, <S_j h, h> = 0}``.

    Each update is the minimum-norm solution of the linearized constraints
    among directions orthogonal to ``h`` and ``i h`` (tangent to the sphere,
    phase gauge fixed). Returns ``(h, converged)``.
    """
    h = normalize(h)
    for _ in range(max_iter + 1):
        Sh = [S @ h for S in matrices]
        F = np.array([np.vdot(h, s).real for s in Sh])
        if np.max(np.abs(F), initial=0.0) <= tol:
            return h, True
        G = np.array([s - np.vdot(h, s) * h for s in Sh])
        J = 2.0 * np.hstack([G.real, G.imag])
        step = -np.linalg.lstsq(J, F, rcond=1e-12)[0]
        nrm = np.linalg.norm(step)
        if nrm == 0.0:
            return h, False
        if nrm > max_move:
            step *= max_move / nrm
        n = h.shape[0]
        h = normalize(h + step[:n] + 1j * step[n:])
    return h, False


def polish(h, constraint: PathConstraint, tol: float | None = None) -> np.ndarray:
    """Newton-polish ``h`` onto the constraint set, keeping its phase.

    Returns the input unchanged if the polish does not converge.
    """
    if not constraint.codim:
        return np.asarray(h, dtype=complex)
    if tol is None:
        tol = 1e-15 * constraint.scale
    hp, ok = correct(h, constraint.matrices, tol, max_iter=10, max_move=1e-3)
    if not ok and constraint.residual(hp) >= constraint.residual(h):
        return np.asarray(h, dtype=complex)
    return phase_align(hp, h)


def codim1_path(
    S,
    h0,
    h1,
    samples: int = SAMPLES,
    endpoint_tol: float = ENDPOINT_TOL,
    step_tol: float = STEP_TOL,
) -> WitnessPath:
    """Path in ``{||h|| = 1, <S h, h> = 0}`` joining two points of that set.

    With ``c = <S h1, h0>`` and ``theta = pi/2 - arg c`` the cross term
    ``2 t (1 - t) Re(e^{i theta} c)`` vanishes, so
    ``<S h(t), h(t)> = ((1-t)^2 <S h0,h0> + t^2 <S h1,h1>) / ||...||^2``.
    The sign of ``e^{i theta}`` is chosen with ``Re <e^{i theta} h1, h0> >= 0``,
    which keeps the normalizing denominator at least ``1/sqrt(2)``.
    """
    constraint = PathConstraint((S,))
    S = constraint.matrices[0]
    h0, h1 = _check_pair(h0, h1)
    if h0.shape[0] != S.shape[0]:
        raise DimensionMismatch("endpoint length does not match the constraint matrix")
    tol = endpoint_tol * constraint.scale
    for i, h in enumerate((h0, h1)):
        r = constraint.residual(h)
        if r > tol:
            raise ConstraintViolation(f"endpoint {i} violates the constraint by {r:.3e}")
    if _parallel(h0, h1):
        return _constant_path(h0, "codim1", constraint)

    c = np.vdot(h0, S @ h1)
    if abs(c) > 1e-15 * constraint.scale:
        u = np.exp(1j * (0.5 * math.pi - np.angle(c))) * h1
        if np.vdot(h0, u).real < 0:
            u = -u
    else:
        u = phase_align(h1, h0)

    def fn(t):
        v = (1.0 - t) * h0 + t * u
        nrm = np.linalg.norm(v)
        assert nrm >= 0.1
        return v / nrm

    return _sampled(fn, samples, constraint, "codim1", step_tol)


def _angle(x, y) -> float:
    return math.acos(min(1.0, abs(np.vdot(x, y))))


class _IsotropicTracker:
    """Predictor-corrector walker on ``{x : ||x|| = 1, x^H B_j x = 0}``."""

    def __init__(self, matrices, tol, rng, step_max=0.04, min_step=1e-7, max_steps=20000):
        self.matrices = list(matrices)
        self.tol = tol
        self.rng = rng
        self.step_max = step_max
        self.min_step = min_step
        self.max_steps = max_steps

    def correct(self, x, max_iter=30):
        return correct(x, self.matrices, self.tol, max_iter=max_iter, max_move=0.25)

    def direction(self, x, tgt):
        """Tangent direction of the constraint manifold pointing toward ``tgt``."""
        v = tgt - np.vdot(x, tgt).real * x
        rv = np.concatenate([v.real, v.imag])
        base = np.linalg.norm(rv)
        if base == 0.0:
            return None
        G = []
        for B in self.matrices:
            s = B @ x
            g = s - np.vdot(x, s) * x
            G.append(np.concatenate([g.real, g.imag]))
        G = np.array(G).T
        if G.size:
            U, sv, _ = np.linalg.svd(G, full_matrices=False)
            U = U[:, sv > 1e-10 * max(1.0, sv[0])]
            rv = rv - U @ (U.T @ rv)
        nrm = np.linalg.norm(rv)
        if nrm <= 1e-9 * base:
            return None
        m = x.shape[0]
        return (rv[:m] + 1j * rv[m:]) / nrm

    def segment(self, x, tgt, pieces):
        """Corrected great-circle segment ``x -> tgt`` (both on the set), or None."""
        out = []
        prev = x
        for k in range(1, pieces):
            y, ok = self.correct(slerp(x, tgt, k / pieces))
            if not ok:
                return None
            y = phase_align(y, prev)
            if np.linalg.norm(y - prev) > 2.0 * self.step_max:
                return None
            out.append(y)
            prev = y
        end = phase_align(tgt, prev)
        if np.linalg.norm(end - prev) > 2.0 * self.step_max:
            return None
        out.append(end)
        return out

    def track(self, x, target):
        """Walk from ``x`` toward ``target``; returns (points after x, reached)."""
        pts = []
        step = self.step_max
        dist = _angle(x, target)
        for _ in range(self.max_steps):
            if dist < 1e-13:
                return pts, True
            if dist <= 3.0 * self.step_max:
                tail = self.segment(x, target, int(math.ceil(dist / (0.5 * self.step_max))) + 1)
                if tail is not None:
                    return pts + tail, True
            tgt = phase_align(target, x)
            v = self.direction(x, tgt)
            if v is None:
                return pts, False
            y, ok = self.correct(math.cos(step) * x + math.sin(step) * v)
            if ok:
                y = phase_align(y, x)
                nd = _angle(y, target)
                if nd < dist and np.linalg.norm(y - x) <= 2.0 * step + 1e-12:
                    pts.append(y)
                    x, dist = y, nd
                    step = min(1.5 * step, self.step_max)
                    continue
            step *= 0.5
            if step < self.min_step:
                return pts, False
        return pts, False

    def waypoint(self, m, attempts=20):
        for _ in range(attempts):
            z = self.rng.standard_normal(m) + 1j * self.rng.standard_normal(m)
            y, ok = self.correct(z / np.linalg.norm(z), max_iter=100)
            if ok:
                return y
        return None


def _densify(xs: list, tracker: _IsotropicTracker, samples: int, step_tol: float) -> list:
    """Insert corrected midpoints until there are enough, short enough steps."""
    xs = list(xs)
    while True:
        steps = [np.linalg.norm(b - a) for a, b in zip(xs, xs[1:])]
        if len(xs) >= samples and max(steps, default=0.0) <= step_tol:
            return xs
        long_enough = len(xs) >= samples
        out = [xs[0]]
        for a, b, s in zip(xs, xs[1:], steps):
            if not long_enough or s > step_tol:
                mid, ok = tracker.correct(slerp(a, b, 0.5))
                if not ok:
                    raise PathTrackingFailed("corrector failed while refining the path")
                out.append(phase_align(mid, a))
            out.append(b)
        xs = out


def codim2_path(
    S1,
    S2,
    h0,
    h1,
    samples: int = SAMPLES,
    retries: int = RETRIES,
    seed=0,
    endpoint_tol: float = ENDPOINT_TOL,
    path_tol: float = PATH_TOL,
    step_tol: float = STEP_TOL,
) -> WitnessPath:
    """Path in ``{||h|| = 1, <S1 h, h> = <S2 h, h> = 0}`` (requires ``n >= 3``).

    Works inside ``V = span{h0, h1, w}`` for a random ``w``: the set of
    isotropic vectors of the compressed 3x3 matrix ``P_V (S1 + i S2) P_V``
    is path-connected, and the tracker walks it from ``h0`` toward ``h1``,
    detouring through random isotropic waypoints in ``V`` when it stalls.
    """
    constraint = PathConstraint((S1, S2))
    S1, S2 = constraint.matrices
    h0, h1 = _check_pair(h0, h1)
    n = h0.shape[0]
    if S1.shape != (n, n) or S2.shape != (n, n):
        raise DimensionMismatch("endpoint length does not match the constraint matrices")
    if n < 3:
        raise InsufficientDimension(f"two-constraint paths need dim >= 3, got {n}")
    scale = constraint.scale
    for i, h in enumerate((h0, h1)):
        r = constraint.residual(h)
        if r > endpoint_tol * scale:
            raise ConstraintViolation(f"endpoint {i} violates the constraints by {r:.3e}")
    if _parallel(h0, h1):
        return _constant_path(h0, "codim2", constraint)

    rng = np.random.default_rng(seed)
    w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    Q, _ = np.linalg.qr(np.column_stack([h0, h1, w]))
    B = [Q.conj().T @ S @ Q for S in (S1, S2)]
    x0 = Q.conj().T @ h0
    x1 = Q.conj().T @ h1
    tracker = _IsotropicTracker(B, 1e-14 * scale, rng, step_max=min(0.04, 0.8 * step_tol))

    xs = [x0]
    cur = x0
    reached = False
    for attempt in range(retries + 1):
        seg, reached = tracker.track(cur, x1)
        xs += seg
        cur = xs[-1]
        if reached or attempt == retries:
            break
        wp = tracker.waypoint(3)
        if wp is None:
            continue
        seg, _ = tracker.track(cur, wp)
        xs += seg
        cur = xs[-1]
    if not reached:
        raise PathTrackingFailed(f"isotropic path tracking stalled after {retries} waypoint retries")

    xs = _densify(xs, tracker, samples, 0.8 * step_tol)
    X = np.stack(xs)
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(X, axis=0), axis=1))])
    ts = arc / arc[-1]
    V = X @ Q.T
    V[0] = h0
    res = max(constraint.residual(h) for h in V)
    if res > path_tol * scale:
        raise PathTrackingFailed(f"path residual {res:.3e} exceeds tolerance")

    def fn(t):
        i = int(np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2))
        s = float(np.clip((t - ts[i]) / (ts[i + 1] - ts[i]), 0.0, 1.0))
        if s == 0.0:
            return V[i].copy()
        if s == 1.0:
            return V[i + 1].copy()
        y, ok = tracker.correct(slerp(X[i], X[i + 1], s))
        if not ok:
            raise PathTrackingFailed(f"corrector failed evaluating the path at t={t}")
        return Q @ phase_align(y, X[i])

    return WitnessPath(ts, V, res, _max_step(V), "codim2", fn)


def path_residual(path: WitnessPath, constraint: PathConstraint) -> float:
    """Largest ``|<S_j h(t), h(t)>|`` over the samples (0 with no constraints)."""
    if not constraint.codim:
        return 0.0
    if path.vectors.shape[1] != constraint.matrices[0].shape[0]:
        raise DimensionMismatch("path and constraint dimensions differ")
    return max(constraint.residual(h) for h in path.vectors)
