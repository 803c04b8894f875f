"""Exception hierarchy shared by every module of the package."""


class TFDError(Exception):
    """Base class for all errors raised by tfdpdc."""


class ConfigError(TFDError, ValueError):
    """Invalid physical or numerical configuration."""


class MismatchedPartnerCutoff(ConfigError):
    def __init__(self, hat, tilde, hat_cutoff, tilde_cutoff):
        self.pair = (hat, tilde)
        super().__init__(
            f"modes {hat}/{tilde} must share a cutoff, got {hat_cutoff} and {tilde_cutoff}"
        )


class DimensionTooLarge(ConfigError):
    pass


class OccupationOutOfRange(TFDError, IndexError):
    pass


class UnknownMode(TFDError, KeyError):
    pass


class BasisMismatch(TFDError, ValueError):
    pass


class DimensionMismatch(TFDError, ValueError):
    pass


class ZeroNorm(TFDError, ArithmeticError):
    pass


class ExpressionContainsTildeMode(TFDError, ValueError):
    pass


class NotAPartnerPair(TFDError, ValueError):
    pass


class SpectrumTooLong(TFDError, ValueError):
    pass


class OperatorTouchesTildeSector(TFDError, ValueError):
    pass


class ConvergenceFailure(TFDError, ArithmeticError):
    """The exponential series did not reach the requested tolerance."""
