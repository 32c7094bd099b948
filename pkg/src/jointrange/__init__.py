"""Joint numerical ranges of Hermitian tuples, hull membership and short convex decompositions."""
from .estimators import CaratheodoryDecomposer, HullMembership
from .exceptions import (
    ConstraintViolation,
    DimensionMismatch,
    EventScanFailed,
    InconsistentInput,
    InsufficientDimension,
    JointRangeError,
    NonMember,
    NotHermitianError,
    PathTrackingFailed,
    PreconditionError,
    ReductionStalled,
    SpanMismatch,
)
from .hull import Atom, HullProjection, check_separation, hull_distance, project_to_hull
from .joint_range import OperatorTuple, RangePoint, evaluate, pauli, sample_points, sample_range, support_min
from .linalg import affine_frame, barycentric, eig_hermitian, jacobi_eigh, lambda_min, slerp
from .paths import PathConstraint, WitnessPath, codim1_path, codim2_path, path_residual, sphere_path
from .reduce import (
    ConvexDecomposition,
    caratheodory_experiment,
    classical_reduce,
    connected_reduce_step,
    decompose,
    theorem_bound,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "CaratheodoryDecomposer",
    "HullMembership",
    "ConstraintViolation",
    "DimensionMismatch",
    "EventScanFailed",
    "InconsistentInput",
    "InsufficientDimension",
    "JointRangeError",
    "NonMember",
    "NotHermitianError",
    "PathTrackingFailed",
    "PreconditionError",
    "ReductionStalled",
    "SpanMismatch",
    "Atom",
    "HullProjection",
    "check_separation",
    "hull_distance",
    "project_to_hull",
    "OperatorTuple",
    "RangePoint",
    "evaluate",
    "pauli",
    "sample_points",
    "sample_range",
    "support_min",
    "affine_frame",
    "barycentric",
    "eig_hermitian",
    "jacobi_eigh",
    "lambda_min",
    "slerp",
    "PathConstraint",
    "WitnessPath",
    "codim1_path",
    "codim2_path",
    "path_residual",
    "sphere_path",
    "ConvexDecomposition",
    "caratheodory_experiment",
    "classical_reduce",
    "connected_reduce_step",
    "decompose",
    "theorem_bound",
    "verify",
]
