"""scikit-learn style wrappers.

``fit`` takes the operator tuple (a ``(d, n, n)`` array or an
:class:`~jointrange.joint_range.OperatorTuple`); the query methods take
points of R^d row-wise.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .hull import MAX_ITER, project_to_hull
from .reduce import DECOMPOSITION_TOL, decompose, theorem_bound
from .validation import check_operators, check_points


class HullMembership(BaseEstimator):
    """Classifies points as inside or outside the convex hull of the joint range.

    Parameters
    ----------
    eps : float or None
        Membership tolerance; ``None`` means ``1e-8 * (1 + |p|)`` per point.
    max_iter : int
        Iteration cap of the projection.
    """

    def __init__(self, eps=None, max_iter=MAX_ITER):
        self.eps = eps
        self.max_iter = max_iter

    def fit(self, X, y=None):
        self.operators_ = check_operators(X)
        self.n_features_in_ = self.operators_.d
        return self

    def project(self, P):
        """Full :class:`~jointrange.hull.HullProjection` for every row of ``P``."""
        check_is_fitted(self)
        P = check_points(P, self.n_features_in_)
        return [project_to_hull(self.operators_, p, self.eps, self.max_iter) for p in P]

    def predict(self, P) -> np.ndarray:
        return np.array([r.is_member for r in self.project(P)])

    def decision_function(self, P) -> np.ndarray:
        """Distance reached by the projection; 0 up to ``eps`` for members."""
        return np.array([r.distance for r in self.project(P)])


class CaratheodoryDecomposer(TransformerMixin, BaseEstimator):
    """Short convex decompositions of points over the joint range.

    ``transform`` returns the decomposition weights, sorted in decreasing
    order and zero-padded to ``bound_`` columns; ``decompose`` returns the
    full :class:`~jointrange.reduce.ConvexDecomposition` objects.
    """

    def __init__(self, target="auto", tol=DECOMPOSITION_TOL, eps=None, max_iter=MAX_ITER, random_state=0):
        self.target = target
        self.tol = tol
        self.eps = eps
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        self.operators_ = check_operators(X)
        self.n_features_in_ = self.operators_.d
        self.bound_ = (
            theorem_bound(self.operators_.d, self.operators_.n) if self.target == "auto" else int(self.target)
        )
        return self

    def decompose(self, P):
        check_is_fitted(self)
        P = check_points(P, self.n_features_in_)
        return [
            decompose(
                self.operators_,
                p,
                target=self.target,
                tol=self.tol,
                eps=self.eps,
                max_iter=self.max_iter,
                seed=self.random_state,
            )
            for p in P
        ]

    def transform(self, P) -> np.ndarray:
        decs = self.decompose(P)
        out = np.zeros((len(decs), self.bound_))
        for i, dec in enumerate(decs):
            w = np.sort(dec.weights)[::-1]
            out[i, : len(w)] = w
        return out
