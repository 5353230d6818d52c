"""Exception hierarchy shared by every module."""


class ModKGError(Exception):
    """Base class for all package errors."""


class InvalidGrid(ModKGError, ValueError):
    pass


class NonFiniteValues(ModKGError, ValueError):
    pass


class NonFiniteSymbol(ModKGError, ValueError):
    pass


class InvalidExponent(ModKGError, ValueError):
    pass


class UnresolvedWindow(ModKGError, ValueError):
    pass


class BandOutOfRange(ModKGError, IndexError):
    pass


class SpectralLeakage(ModKGError):
    """Spectral mass outside the retained bands exceeds the tolerance."""

    def __init__(self, message, leakage=None):
        super().__init__(message)
        self.leakage = leakage


class EmptyTrajectory(ModKGError, ValueError):
    pass


class AlphaOutOfRange(ModKGError, ValueError):
    pass


class ThetaOutOfRange(ModKGError, ValueError):
    pass


class NoConvergence(ModKGError):
    """Picard iteration exhausted its sweeps or diverged."""

    def __init__(self, message, ratios=(), changes=()):
        super().__init__(message)
        self.ratios = list(ratios)
        self.changes = list(changes)


class HypothesisViolated(ModKGError):
    """Parameters do not satisfy the hypothesis of the named inequality."""

    def __init__(self, message, failed=None):
        super().__init__(message)
        self.failed = failed


class HorizonExceeded(ModKGError, ValueError):
    pass


class DegenerateFit(ModKGError, ValueError):
    pass


class FormatError(ModKGError, ValueError):
    pass


class ConfigParse(ModKGError, ValueError):
    pass
