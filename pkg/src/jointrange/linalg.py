"""Hermitian eigensolvers, unit-sphere helpers and affine geometry.

Vectors are 1-d complex ``numpy`` arrays and matrices are 2-d complex
arrays; the inner product is linear in its first argument,
``<x, y> = y^H x``, so ``<A h, h> = np.vdot(h, A @ h)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DimensionMismatch, NotHermitianError, SpanMismatch

HERMITIAN_TOL = 1e-12
UNIT_TOL = 1e-12
RANK_TOL = 1e-9
DEGENERACY_TOL = 1e-9


class EigenDecomposition(NamedTuple):
    """Ascending eigenvalues and the matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_hermitian(A, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``A`` as Hermitian and return its exactly-symmetrized copy.

    ``tol`` bounds ``max |A - A^H|`` relative to ``max(1, max |A|)``.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NotHermitianError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    asym = float(np.max(np.abs(A - A.conj().T)))
    if asym > tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian: max |A - A^H| = {asym:.3e}")
    return 0.5 * (A + A.conj().T)


def as_unit_vector(h, n: int | None = None, tol: float = UNIT_TOL) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {h.shape}")
    if n is not None and h.shape[0] != n:
        raise DimensionMismatch(f"expected a vector of length {n}, got {h.shape[0]}")
    if abs(np.linalg.norm(h) - 1.0) > tol:
        raise ValueError(f"vector is not unit: norm {np.linalg.norm(h)!r}")
    return h


def normalize(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    nrm = np.linalg.norm(h)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return h / nrm


def expectation(A: np.ndarray, h: np.ndarray) -> float:
    """Real part of ``<A h, h>``."""
    return float(np.vdot(h, A @ h).real)


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized standard complex Gaussian (uniform on the unit sphere of C^n)."""
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    """GUE-style random Hermitian matrix with unit-variance entries."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.conj().T)


def canonical_phase(h: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real and >= 0."""
    h = np.asarray(h, dtype=complex)
    k = int(np.argmax(np.abs(h)))
    if h[k] == 0:
        return h.copy()
    return h * (abs(h[k]) / h[k])


def phase_align(h: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Return ``e^{i a} h`` with ``<e^{i a} h, ref>`` real and nonnegative."""
    ov = np.vdot(ref, h)
    if ov == 0:
        return np.asarray(h, dtype=complex).copy()
    return h * (abs(ov) / ov)


def jacobi_eigh(A, tol: float = 1e-14, max_sweeps: int = 50) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver for a Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a_pq`` with a
    diagonal unitary and then applies the classical real rotation. Sweeps
    stop once the off-diagonal Frobenius mass drops below
    ``tol * ||A||_F``.
    """
    a = np.array(as_hermitian(A), dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return EigenDecomposition(np.zeros(n), v)
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, scale**2 - float(np.sum(np.abs(np.diag(a)) ** 2))))
        # the cheap estimate above cancels badly near convergence
        if off <= 1e3 * tol * scale:
            off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                ab = abs(b)
                if ab <= 1e-300 or ab <= 1e-18 * scale:
                    continue
                ph = np.conj(b / ab)
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * ab)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                U = np.array([[c, s], [-s * ph, c * ph]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ U
                a[idx, :] = U.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ U
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def eig_hermitian(A, method: str = "lapack") -> EigenDecomposition:
    """Full eigendecomposition with ascending eigenvalues.

    ``method="lapack"`` calls ``numpy.linalg.eigh``; ``method="jacobi"``
    runs :func:`jacobi_eigh`.
    """
    if method == "jacobi":
        return jacobi_eigh(A)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    w, V = np.linalg.eigh(as_hermitian(A))
    return EigenDecomposition(w, V)


def lambda_min(A, method: str = "lapack") -> tuple[float, np.ndarray]:
    """Smallest eigenvalue of ``A`` and a unit eigenvector for it."""
    w, V = eig_hermitian(A, method=method)
    return float(w[0]), canonical_phase(V[:, 0])


def slerp(h0, h1, t: float) -> np.ndarray:
    """Great-circle interpolation between two unit vectors.

    ``h1`` is first phase-aligned to ``h0`` so the geodesic joins the two
    rays by the shortest route; parallel rays give the constant path.
    """
    h0 = np.asarray(h0, dtype=complex)
    h1 = phase_align(np.asarray(h1, dtype=complex), h0)
    cos_om = min(1.0, float(np.vdot(h0, h1).real))
    om = math.acos(cos_om)
    if om < 1e-12:
        return h0.copy()
    so = math.sin(om)
    h = (math.sin((1.0 - t) * om) / so) * h0 + (math.sin(t * om) / so) * h1
    return h / np.linalg.norm(h)


@dataclass(frozen=True)
class AffineFrame:
    """Affine span of a point set: ``origin + span(directions)``.

    ``normals`` complete ``directions`` to an orthonormal basis of R^d and
    ``offsets[j] = normals[j] @ origin``. ``scale`` is the largest singular
    value of the centred point cloud (or 1 when the cloud is a single point).
    """

    origin: np.ndarray
    directions: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    singular_values: np.ndarray
    scale: float

    @property
    def dim(self) -> int:
        return self.directions.shape[0]

    @property
    def codim(self) -> int:
        return self.normals.shape[0]

    def coordinates(self, x) -> np.ndarray:
        """Coordinates of point(s) ``x`` in the frame, divided by ``scale``."""
        return ((np.asarray(x, dtype=float) - self.origin) @ self.directions.T) / self.scale

    def distance(self, x) -> np.ndarray:
        """Distance(s) from ``x`` to the affine span."""
        off = np.asarray(x, dtype=float) @ self.normals.T - self.offsets
        return np.linalg.norm(np.atleast_2d(off), axis=-1)


def affine_frame(points, rank_tol: float = RANK_TOL, scale: float | None = None) -> AffineFrame:
    """Orthonormal frame for the affine span of ``points``.

    The span dimension is the number of singular values of the centred
    difference matrix above ``rank_tol * max(largest, scale)``.
    """
    Q = np.atleast_2d(np.asarray(points, dtype=float))
    if Q.shape[0] == 0:
        raise ValueError("affine_frame needs at least one point")
    origin = Q.mean(axis=0)
    D = Q - origin
    _, s, Vt = np.linalg.svd(D, full_matrices=True)
    largest = float(s[0]) if s.size else 0.0
    ref = max(largest, scale or 0.0)
    k = int(np.sum(s > rank_tol * ref)) if ref > 0 else 0
    directions = Vt[:k].copy()
    normals = Vt[k:].copy()
    return AffineFrame(
        origin=origin,
        directions=directions,
        normals=normals,
        offsets=normals @ origin,
        singular_values=s,
        scale=largest if largest > 0 else 1.0,
    )


@dataclass(frozen=True)
class BarycentricResult:
    coords: np.ndarray | None
    degenerate: bool
    sigma_min: float


def affine_coordinates(Y: np.ndarray, y: np.ndarray, degeneracy_tol: float = DEGENERACY_TOL) -> BarycentricResult:
    """Solve ``sum b_i Y_i = y, sum b_i = 1`` for ``m`` vertices in R^(m-1).

    ``Y`` holds vertex coordinates row-wise, already expressed in a frame
    of dimension ``m - 1``.
    """
    m = Y.shape[0]
    M = np.vstack([np.ones(m), np.asarray(Y, dtype=float).T])
    if M.shape[0] != m:
        return BarycentricResult(None, True, 0.0)
    s = np.linalg.svd(M, compute_uv=False)
    smin = float(s[-1] / max(1.0, s[0]))
    if smin < degeneracy_tol:
        return BarycentricResult(None, True, smin)
    rhs = np.concatenate([[1.0], np.asarray(y, dtype=float)])
    return BarycentricResult(np.linalg.solve(M, rhs), False, smin)


def barycentric(
    points,
    p,
    frame: AffineFrame | None = None,
    degeneracy_tol: float = DEGENERACY_TOL,
    span_tol: float = 1e-8,
) -> BarycentricResult:
    """Barycentric coordinates of ``p`` relative to ``k + 1`` points.

    Points are projected onto ``frame`` (by default the frame of the points
    themselves). Raises :class:`SpanMismatch` when ``p`` is farther than
    ``span_tol * max(1, frame.scale)`` from the frame.
    """
    Q = np.atleast_2d(np.asarray(points, dtype=float))
    p = np.asarray(p, dtype=float)
    if p.shape != (Q.shape[1],):
        raise DimensionMismatch(f"point has shape {p.shape}, expected ({Q.shape[1]},)")
    if frame is None:
        frame = affine_frame(Q)
    if frame.codim and float(frame.distance(p)[0]) > span_tol * max(1.0, frame.scale):
        raise SpanMismatch(f"point is {float(frame.distance(p)[0]):.3e} away from the affine span")
    if frame.dim != Q.shape[0] - 1:
        return BarycentricResult(None, True, 0.0)
    return affine_coordinates(frame.coordinates(Q), frame.coordinates(p), degeneracy_tol)
