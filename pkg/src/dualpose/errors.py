"""Exception types shared across the package."""


class DualPoseError(Exception):
    """Base class for all package errors."""


class DegenerateInput(DualPoseError):
    """Input has no usable information (e.g. zero-norm quaternion, empty set)."""


class InvalidRotation(DualPoseError):
    """Matrix is not a rotation (non-orthogonal or reflection)."""


class DegenerateScale(DualPoseError):
    """Scale is zero, negative, or numerically unusable."""


class AlignmentUnderdetermined(DualPoseError):
    """Point sets are too small or too degenerate to fix a similarity transform."""


class InvalidGrid(DualPoseError):
    """Spherical grid resolution is unusable."""


class BandwidthExceedsGrid(DualPoseError):
    """Requested harmonic bandwidth is not resolvable on the grid."""


class NonRealSpectrum(DualPoseError):
    """Spectral coefficients violate the conjugate symmetry of a real signal."""


class ShapeMismatch(DualPoseError):
    """Operands have incompatible shapes or channel counts."""


class InvalidLoss(DualPoseError):
    """Backward pass was started from a non-scalar node."""


class NonFiniteValue(DualPoseError):
    """A NaN or Inf appeared in a graph node."""


class TrainingFault(DualPoseError):
    """Training step produced a non-finite loss."""


class RefineFault(DualPoseError):
    """Refinement produced a non-finite loss."""


class InvalidCategory(DualPoseError):
    """Unknown synthetic shape category."""


class DegenerateView(DualPoseError):
    """Rendering produced no visible points or the camera is inside the object."""


class ParseError(DualPoseError):
    """Malformed dataset or prediction record."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ChecksumMismatch(DualPoseError):
    """Checkpoint file failed its integrity check."""
