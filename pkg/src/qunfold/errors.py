"""Exception hierarchy shared by every module of the package."""


class QUnfoldError(Exception):
    """Base class for all package errors."""


class ConfigError(QUnfoldError):
    pass


class NumericalError(QUnfoldError):
    """Raised when a solver cannot produce a result (CLI exit code 3)."""


# core
class BadIndex(QUnfoldError, ValueError):
    pass


class BadLabel(QUnfoldError, ValueError):
    pass


class ZeroColumn(QUnfoldError, ValueError):
    pass


class NotStochastic(QUnfoldError, ValueError):
    pass


class DimensionMismatch(QUnfoldError, ValueError):
    pass


# statesim
class BadTarget(QUnfoldError, ValueError):
    pass


class ZeroVector(QUnfoldError, ValueError):
    pass


class BadDistribution(QUnfoldError, ValueError):
    pass


class CircuitSyntaxError(ConfigError):
    pass


# calibration
class IncompleteRun(QUnfoldError, ValueError):
    def __init__(self, missing):
        self.missing = sorted(int(j) for j in missing)
        shown = self.missing[:16]
        more = "" if len(self.missing) <= 16 else f" (+{len(self.missing) - 16} more)"
        super().__init__(f"calibration run is missing columns {shown}{more}")


class ConflictingColumn(QUnfoldError, ValueError):
    pass


# synth
class BadRange(QUnfoldError, ValueError):
    pass


# unfold
class SingularMatrix(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class Infeasible(NumericalError):
    pass


class BadPrior(QUnfoldError, ValueError):
    pass


class BadSource(ConfigError):
    pass


class IllConditioned(UserWarning):
    """Emitted when matrix inversion runs on a badly conditioned response."""
