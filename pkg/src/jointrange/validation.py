"""Input validation shared by the estimator wrappers."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DimensionMismatch
from .joint_range import OperatorTuple


def check_operators(X) -> OperatorTuple:
    """Accept an :class:`OperatorTuple` or a ``(d, n, n)`` array-like of Hermitian matrices."""
    if isinstance(X, OperatorTuple):
        return X
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimensionMismatch(f"expected operators of shape (d, n, n), got {arr.shape}")
    return OperatorTuple(list(arr))


def check_points(P, d: int) -> np.ndarray:
    """Points as a finite ``(m, d)`` float array; a single 1-d point is promoted."""
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P[None, :]
    P = check_array(P, dtype=float, ensure_all_finite=True)
    if P.shape[1] != d:
        raise DimensionMismatch(f"points have {P.shape[1]} coordinates, operators have d={d}")
    return P
