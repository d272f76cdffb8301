"""Exception types raised by the numeric kernels."""


class NumericDomainError(ValueError):
    """Input violates a mathematical domain requirement (e.g. not SPD)."""


class SingularMatrixError(ValueError):
    """A matrix that must be invertible is singular to working tolerance."""


class DegenerateSpectrumError(ValueError):
    """A closed form requires a nondegenerate spectrum and the gap vanished."""


class NormalizationError(ValueError):
    """Eigenvector normalization failed (nonpositive norm-square)."""


class BoundaryIndeterminateError(NumericDomainError):
    """Region membership is undefined on this parameter boundary."""
