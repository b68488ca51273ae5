"""Exception types raised across mu2lab."""


class Mu2Error(Exception):
    """Base class for every error the library raises on purpose."""


class ConfigError(Mu2Error, ValueError):
    pass


class SpecMismatch(Mu2Error, TypeError):
    pass


class NonUnit(Mu2Error, ArithmeticError):
    pass


class NotDivisible(Mu2Error, ArithmeticError):
    pass


class InsufficientPrecision(Mu2Error, ArithmeticError):
    pass


class InfiniteResidueField(Mu2Error):
    pass


class NonIntegralCoefficient(Mu2Error, ArithmeticError):
    """An exact division by p failed; this always means a bug upstream."""


NonIntegral = NonIntegralCoefficient


class WindowMismatch(Mu2Error, ValueError):
    pass


class InsufficientWindow(Mu2Error):
    pass


class WrongPrime(Mu2Error, ValueError):
    pass


class CaseNotApplicable(Mu2Error, ValueError):
    pass


class SearchSpaceTooLarge(Mu2Error):
    pass


class RamificationBound(Mu2Error, ValueError):
    pass


class ConditionCViolated(Mu2Error):
    pass


class NoCokernelSeries(Mu2Error):
    pass


class NoRootOfUnity(Mu2Error):
    pass


class NotAModel(Mu2Error, ValueError):
    pass


class Unsupported(Mu2Error):
    pass


class WitnessNotFound(Mu2Error):
    pass


class ConfigMismatch(Mu2Error, ValueError):
    pass
