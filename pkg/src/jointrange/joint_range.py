"""The range map h -> (<T_1 h, h>, ..., <T_d h, h>) and its elementary geometry."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch
from .linalg import HERMITIAN_TOL, as_hermitian, lambda_min, random_hermitian

# fixed so that clouds do not depend on how sampling is split across workers
SAMPLE_CHUNK = 4096


class OperatorTuple:
    """``d`` Hermitian ``n x n`` matrices sharing one dimension.

    Matrices are validated on construction and stored exactly symmetrized,
    so every expectation value is real up to round-off.
    """

    def __init__(self, operators, tol: float = HERMITIAN_TOL):
        ops = [as_hermitian(T, tol=tol) for T in operators]
        if not ops:
            raise DimensionMismatch("an operator tuple needs at least one operator")
        n = ops[0].shape[0]
        for k, T in enumerate(ops):
            if T.shape != (n, n):
                raise DimensionMismatch(f"operator {k} has shape {T.shape}, expected {(n, n)}")
        self.ops = np.stack(ops)
        self.ops.setflags(write=False)

    @property
    def d(self) -> int:
        return self.ops.shape[0]

    @property
    def n(self) -> int:
        return self.ops.shape[1]

    @property
    def scale(self) -> float:
        """Largest operator Frobenius norm (at least 1); the natural tolerance unit."""
        return max(1.0, float(np.max(np.linalg.norm(self.ops, axis=(1, 2)))))

    def combine(self, g) -> np.ndarray:
        """``sum_k g_k T_k``."""
        g = np.asarray(g, dtype=float)
        if g.shape != (self.d,):
            raise DimensionMismatch(f"direction has shape {g.shape}, expected ({self.d},)")
        return np.tensordot(g, self.ops, axes=1)

    def spectral_box(self) -> np.ndarray:
        """``(d, 2)`` array of ``[lambda_min(T_k), lambda_max(T_k)]``."""
        w = np.linalg.eigvalsh(self.ops)
        return np.stack([w[:, 0], w[:, -1]], axis=1)

    def __call__(self, H) -> np.ndarray:
        """Range coordinates of one vector (shape ``(d,)``) or of rows of ``H``."""
        H = np.asarray(H, dtype=complex)
        if H.shape[-1] != self.n:
            raise DimensionMismatch(f"vector length {H.shape[-1]} does not match n={self.n}")
        if H.ndim == 1:
            return np.einsum("i,kij,j->k", H.conj(), self.ops, H).real
        return np.einsum("mi,kij,mj->mk", H.conj(), self.ops, H, optimize=True).real

    def __repr__(self):
        return f"OperatorTuple(d={self.d}, n={self.n})"

    @classmethod
    def random(cls, d: int, n: int, rng) -> "OperatorTuple":
        rng = np.random.default_rng(rng)
        return cls([random_hermitian(n, rng) for _ in range(d)])


def pauli() -> OperatorTuple:
    """The Pauli triple (sigma_x, sigma_y, sigma_z)."""
    return OperatorTuple(
        [
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ]
    )


@dataclass(frozen=True)
class RangePoint:
    coords: np.ndarray
    witness: np.ndarray | None = None


def evaluate(Ts: OperatorTuple, h) -> RangePoint:
    """Range point of the unit vector ``h``, carrying ``h`` as witness."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (Ts.n,):
        raise DimensionMismatch(f"vector has shape {h.shape}, expected ({Ts.n},)")
    vals = np.einsum("i,kij,j->k", h.conj(), Ts.ops, h)
    assert np.max(np.abs(vals.imag), initial=0.0) <= 1e-12 * Ts.scale * max(1.0, float(np.vdot(h, h).real))
    return RangePoint(vals.real.copy(), h)


def sample_vectors(n: int, N: int, seed) -> np.ndarray:
    """``N`` normalized complex Gaussian vectors, generated chunk-wise.

    Chunk ``c`` uses the ``c``-th child of ``SeedSequence(seed)``, so the
    result depends only on ``(n, N, seed)``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    n_chunks = -(-N // SAMPLE_CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    out = np.empty((N, n), dtype=complex)
    for c, ss in enumerate(children):
        lo = c * SAMPLE_CHUNK
        m = min(SAMPLE_CHUNK, N - lo)
        rng = np.random.Generator(np.random.PCG64(ss))
        z = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        out[lo : lo + m] = z / np.linalg.norm(z, axis=1, keepdims=True)
    return out


def sample_points(Ts: OperatorTuple, N: int, seed=0, return_witnesses: bool = False):
    """Array version of :func:`sample_range`: ``(N, d)`` coordinates."""
    H = sample_vectors(Ts.n, N, seed)
    X = Ts(H)
    return (X, H) if return_witnesses else X


def sample_range(Ts: OperatorTuple, N: int, seed=0) -> list[RangePoint]:
    X, H = sample_points(Ts, N, seed, return_witnesses=True)
    return [RangePoint(x, h) for x, h in zip(X, H)]


def support_min(Ts: OperatorTuple, g) -> tuple[float, RangePoint]:
    """Minimum of ``g . x`` over the joint range and a point attaining it.

    The minimum is ``lambda_min(sum_k g_k T_k)``, attained at the
    eigenvector.
    """
    val, v = lambda_min(Ts.combine(g))
    return val, evaluate(Ts, v)
