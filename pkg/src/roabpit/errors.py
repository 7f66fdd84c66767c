"""Exception hierarchy shared by every module."""


class RoabpError(Exception):
    """Base class for all library errors."""


class ZeroInverse(RoabpError, ZeroDivisionError):
    pass


class ModulusMismatch(RoabpError, ValueError):
    pass


class CharacteristicTooSmall(RoabpError, ValueError):
    pass


class DegreeZeroInput(RoabpError, ValueError):
    pass


class DegreeTooLow(RoabpError, ValueError):
    pass


class NonSquare(RoabpError, ValueError):
    pass


class NonSplitSpectrum(RoabpError):
    """No F_p-rational eigenvalue / primary split was found."""


class RingMismatch(RoabpError, ValueError):
    pass


class ArityMismatch(RoabpError, ValueError):
    pass


class BudgetExceeded(RoabpError):
    pass


class InvalidParams(RoabpError, ValueError):
    pass


class ParseError(RoabpError, ValueError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class NotIdempotentModRadical(RoabpError):
    pass


class ZeroIdempotent(RoabpError):
    pass


class RankAlreadyOne(RoabpError):
    """Corner descent was asked to reduce a projector that is already rank one."""


class GridExhausted(RoabpError):
    pass


class NotFullAlgebra(RoabpError):
    pass


class ExtractionFailed(RoabpError):
    pass


class DegenerateSelector(RoabpError):
    pass


class WordCountMismatch(RoabpError, ValueError):
    pass


class ThresholdOverflow(RoabpError, OverflowError):
    pass


class NoCollisionFound(RoabpError):
    pass


class BaseTooSmall(RoabpError, ValueError):
    pass


class FieldTooSmall(RoabpError):
    pass


class AllRoots(RoabpError):
    pass


class DegreeBudgetExceeded(RoabpError):
    """A constraint polynomial exceeded its proven degree budget."""
