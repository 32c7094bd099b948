"""Membership in conv(W): inner atoms or an outer separating functional.

conv(W) is the set of expectation vectors ``(tr rho T_k)_k`` over density
matrices ``rho``. Minimizing a linear functional over it is an eigenvalue
problem, which makes conditional-gradient methods natural: the linear
minimization oracle for direction ``g`` is the lowest eigenvector of
``sum_k g_k T_k``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch
from .joint_range import OperatorTuple, evaluate
from .linalg import lambda_min

logger = logging.getLogger(__name__)

WEIGHT_FLOOR = 1e-12
MAX_ITER = 10_000


@dataclass
class Atom:
    """A witness vector with its convex weight and cached range point."""

    weight: float
    witness: np.ndarray
    point: np.ndarray

    @classmethod
    def from_witness(cls, Ts: OperatorTuple, h, weight: float) -> "Atom":
        return cls(float(weight), np.asarray(h, dtype=complex), evaluate(Ts, h).coords)


def combination(atoms) -> np.ndarray:
    """``sum_i w_i q_i`` over the cached atom points."""
    w = np.array([a.weight for a in atoms])
    Q = np.array([a.point for a in atoms])
    return w @ Q


@dataclass
class HullProjection:
    """Outcome of :func:`project_to_hull`.

    ``status`` is one of ``"member"``, ``"nonmember"``, ``"maxiter"``.
    For nonmembers, ``certificate`` is a unit direction ``g`` and ``margin``
    the positive gap ``lambda_min(sum g_k T_k) - g . p``; the true distance
    is then at least ``margin``.
    """

    status: str
    atoms: list[Atom]
    distance: float
    certificate: np.ndarray | None = None
    margin: float | None = None
    iterations: int = 0
    history: list[float] = field(default_factory=list, repr=False)

    @property
    def is_member(self) -> bool:
        return self.status == "member"


def check_separation(Ts: OperatorTuple, p, g) -> float:
    """``lambda_min(sum_k g_k T_k) - g . p``; a positive value proves p is outside conv(W)."""
    g = np.asarray(g, dtype=float)
    p = np.asarray(p, dtype=float)
    val, _ = lambda_min(Ts.combine(g))
    return val - float(g @ p)


def _affine_minimizer(Y: np.ndarray) -> np.ndarray:
    """Affine weights (summing to 1) of the min-norm point in aff(rows of Y)."""
    if Y.shape[0] == 1:
        return np.ones(1)
    D = (Y[1:] - Y[0]).T
    beta = np.linalg.lstsq(D, -Y[0], rcond=None)[0]
    return np.concatenate([[1.0 - beta.sum()], beta])


def _purge(lam, Y, H, floor):
    keep = lam > floor
    lam = lam[keep]
    return lam / lam.sum(), Y[keep], H[keep]


def project_to_hull(
    Ts: OperatorTuple,
    p,
    eps: float | None = None,
    max_iter: int = MAX_ITER,
    weight_floor: float = WEIGHT_FLOOR,
    bracket: float | None = None,
) -> HullProjection:
    """Project ``p`` onto conv(W) until membership or separation is decided.

    Runs Wolfe's min-norm-point scheme on the translated set conv(W) - p:
    each major step adds the oracle atom for the current gradient
    ``x - p``, then minor steps re-optimize the weights over the active
    atoms (affine minimizer, clipped back into the simplex). The active
    atoms stay affinely independent, so at most ``d + 1`` of them are kept.

    With ``bracket`` set, a separating certificate does not stop the
    iteration; it continues until the upper bound ``|x - p|`` and the dual
    lower bound ``margin / |x - p|`` on the distance differ by at most
    ``bracket`` (see :func:`hull_distance`).
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (Ts.d,):
        raise DimensionMismatch(f"point has shape {p.shape}, expected ({Ts.d},)")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    if eps is None:
        eps = 1e-8 * (1.0 + float(np.linalg.norm(p)))
    if eps <= 0:
        raise ValueError("eps must be positive")

    center = np.trace(Ts.ops, axis1=1, axis2=2).real / Ts.n
    g0 = center - p
    if not np.any(g0):
        g0 = np.ones(Ts.d)
    _, h = lambda_min(Ts.combine(g0))
    H = h[None, :]
    Y = (Ts(h) - p)[None, :]
    lam = np.ones(1)
    history = []
    scale2 = Ts.scale**2

    def result(status, it, cert=None, margin=None):
        w, Yk, Hk = _purge(lam, Y, H, weight_floor)
        atoms = [Atom(float(wi), hi, y + p) for wi, hi, y in zip(w, Hk, Yk)]
        dist = float(np.linalg.norm(w @ Yk))
        return HullProjection(status, atoms, dist, cert, margin, it, history)

    for it in range(1, max_iter + 1):
        x = lam @ Y
        dist = float(np.linalg.norm(x))
        history.append(dist)
        if dist <= eps:
            return result("member", it)
        val, h = lambda_min(Ts.combine(x))
        q = Ts(h)
        margin = val - float(x @ p)
        gap = dist * dist - margin
        if bracket is not None:
            if dist - margin / dist <= bracket or gap <= 1e-15 * scale2:
                if margin > 0:
                    return result("nonmember", it, x / dist, margin / dist)
                return result("member", it)
        elif margin > 0 and margin / dist > eps * (1.0 + 1e-3):
            g = x / dist
            m = check_separation(Ts, p, g)
            if m > 0:
                return result("nonmember", it, g, m)
        if gap <= 1e-15 * scale2:
            # x is the min-norm point up to round-off; distance sits inside the eps slack
            status = "member" if dist <= eps * (1.0 + 1e-3) else "maxiter"
            return result(status, it)

        Y = np.vstack([Y, q - p])
        H = np.vstack([H, h])
        lam = np.append(lam, 0.0)
        for _ in range(Y.shape[0] + 1):
            alpha = _affine_minimizer(Y)
            if np.all(alpha > 0):
                lam = alpha
                break
            neg = alpha <= 0
            ratios = lam[neg] / (lam[neg] - alpha[neg])
            theta = float(np.min(ratios))
            lam = lam + theta * (alpha - lam)
            drop = np.flatnonzero(neg)[np.argmin(ratios)]
            lam[drop] = 0.0
            keep = lam > 0
            lam, Y, H = lam[keep], Y[keep], H[keep]
            lam = lam / lam.sum()
        lam, Y, H = _purge(lam, Y, H, weight_floor)

    logger.debug("project_to_hull hit max_iter=%d at distance %.3e", max_iter, history[-1])
    return result("maxiter", max_iter)


def hull_distance(Ts: OperatorTuple, p, tol: float = 1e-9, max_iter: int = MAX_ITER) -> tuple[float, float]:
    """Lower and upper bounds on the distance from ``p`` to conv(W), at most ``tol`` apart.

    The lower bound is the support-function margin of the final direction,
    the upper bound the distance of the final iterate.
    """
    proj = project_to_hull(Ts, p, eps=tol, max_iter=max_iter, bracket=tol)
    if proj.status == "maxiter":
        raise RuntimeError(f"distance bracket not closed after {max_iter} iterations")
    lower = proj.margin if proj.status == "nonmember" else 0.0
    return lower, proj.distance
