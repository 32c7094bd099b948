"""Exception hierarchy shared by all modules."""


class JointRangeError(Exception):
    """Base class for every error raised by this package."""


class NotHermitianError(JointRangeError, ValueError):
    pass


class DimensionMismatch(JointRangeError, ValueError):
    pass


class SpanMismatch(JointRangeError, ValueError):
    """A point does not lie in the affine span it is expressed against."""


class ConstraintViolation(JointRangeError, ValueError):
    """A path endpoint does not satisfy its constraint set."""


class InsufficientDimension(JointRangeError, ValueError):
    """The codimension-2 path needs a Hilbert space of dimension >= 3."""


class PathTrackingFailed(JointRangeError, RuntimeError):
    pass


class EventScanFailed(JointRangeError, RuntimeError):
    pass


class InconsistentInput(JointRangeError, ValueError):
    """Atoms do not reproduce the target point they claim to represent."""


class PreconditionError(JointRangeError, ValueError):
    pass


class NonMember(JointRangeError):
    """The requested point is outside the convex hull of the joint range.

    Carries the separating direction and its (positive) margin.
    """

    def __init__(self, certificate, margin, distance=None):
        self.certificate = certificate
        self.margin = margin
        self.distance = distance
        super().__init__(
            f"point is not in conv(W): separating direction {list(certificate)} "
            f"with margin {margin:.3e}"
        )


class ReductionStalled(JointRangeError, RuntimeError):
    """The reduction loop stopped above its target atom count."""

    def __init__(self, message, state=None):
        self.state = state
        super().__init__(message)
