"""Exception hierarchy shared by every module."""


class HyperHoloError(Exception):
    """Base class for all errors raised by hyperholo."""


class VariableMismatch(HyperHoloError):
    pass


class UnknownCoordinate(HyperHoloError):
    pass


class ParseError(HyperHoloError, SyntaxError):
    """Malformed expression text (also a ``SyntaxError``).  ``pos`` is the 0-based column of the offending token."""

    def __init__(self, message, text="", pos=0):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


class UnknownIdentifier(ParseError):
    pass


class ChartMismatch(HyperHoloError):
    pass


class NotAlmostComplex(HyperHoloError):
    pass


class NotIntegrable(HyperHoloError):
    pass


class NotQuaternionic(HyperHoloError):
    pass


class MetricNotSymmetric(HyperHoloError):
    pass


class ConstructionError(HyperHoloError):
    pass


class BackendMismatch(HyperHoloError):
    pass


class UnsupportedOnPoint(HyperHoloError):
    pass


class HypothesisViolated(HyperHoloError):
    def __init__(self, which, message=""):
        super().__init__(f"{which}: {message}" if message else which)
        self.which = which


class NotUnitVector(HyperHoloError):
    pass


class NoUnitMinor(HyperHoloError):
    pass


class NotInvolutive(HyperHoloError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotInSpan(HyperHoloError):
    pass


class NotStable(HyperHoloError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotLagrangian(HyperHoloError):
    pass


class NotLagrangianFoliation(HyperHoloError):
    pass


class NotStableFoliation(HyperHoloError):
    pass


class NotHypercomplex(HyperHoloError):
    pass


class NotHypercomplexBase(HyperHoloError):
    pass


class InvariantViolated(HyperHoloError):
    def __init__(self, which, message=""):
        super().__init__(f"{which}: {message}" if message else which)
        self.which = which


class NondegeneracyFailed(HyperHoloError):
    pass


class WrongShape(HyperHoloError):
    pass


class SchemaError(HyperHoloError):
    pass


class UnresolvedReference(HyperHoloError):
    pass


class UnknownCommand(HyperHoloError):
    pass


class UnknownName(HyperHoloError):
    pass
