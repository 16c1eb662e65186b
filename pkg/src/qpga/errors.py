"""Exception hierarchy shared across the package."""


class QpgaError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(QpgaError):
    pass


class AntipodalPointError(QpgaError):
    """Log map direction undefined: the two points are (numerically) antipodal."""


class NonTangentError(QpgaError):
    """Vector handed to the exponential map is not orthogonal to its base point."""


class NoConvergenceError(QpgaError):
    pass


class DegenerateInputError(QpgaError):
    pass


class SingularKernelError(QpgaError):
    pass


class InsufficientDataError(QpgaError):
    pass


class ZeroVectorError(QpgaError):
    pass


class NonUnitNormError(QpgaError):
    pass


class InvalidKError(QpgaError):
    pass


class EmptySpectrumError(QpgaError):
    pass


class NotInvertibleError(QpgaError):
    pass


class TooManyAmplitudesError(QpgaError):
    pass


class IndexOutOfRangeError(QpgaError):
    pass


class NoiseOnPureStateError(QpgaError):
    pass


class UnsupportedGateError(QpgaError):
    pass


class NotConvergedError(QpgaError):
    pass


class EmptyFoldError(QpgaError):
    pass


class BadMagicError(QpgaError):
    pass


class TruncatedFileError(QpgaError):
    pass


class UnknownClassError(QpgaError):
    pass


class NotEnoughSamplesError(QpgaError):
    pass


class TooFewSamplesError(QpgaError):
    pass


class IoFailureError(QpgaError):
    pass


class ManifestMismatchError(QpgaError):
    pass
