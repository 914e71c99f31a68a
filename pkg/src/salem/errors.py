"""Exception hierarchy shared by every module of the package."""


class SalemError(Exception):
    """Base class for all package errors."""


class FieldTableError(SalemError):
    """A multiplication table does not describe a commutative unital algebra."""

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = indices


class NonAssociativeTable(FieldTableError):
    pass


class NonCommutativeTable(FieldTableError):
    pass


class NoIdentity(FieldTableError):
    pass


class SingularGram(SalemError):
    pass


class ContextMismatch(SalemError):
    pass


class DivisionByZeroElement(SalemError, ZeroDivisionError):
    pass


class ZeroModulus(SalemError, ValueError):
    pass


class ZeroElement(SalemError, ValueError):
    pass


class NotIntegral(SalemError, ValueError):
    pass


class RootFindingFailure(SalemError):
    pass


class ScaleTooSmall(SalemError, ValueError):
    pass


class BoxTooLarge(SalemError):
    pass


class BudgetExceeded(SalemError):
    pass


class EmptyPool(SalemError):
    pass


class TauOutOfRange(SalemError, ValueError):
    pass


class ResolutionTooCoarse(SalemError, ValueError):
    pass


class TableTooSmall(SalemError, ValueError):
    pass


class InsufficientSupport(SalemError, ValueError):
    pass


class HypothesisViolated(SalemError):
    def __init__(self, envelope, s, margin):
        super().__init__(f"hypothesis envelope {envelope!r} violated at s={s} (margin {margin:.3e})")
        self.envelope = envelope
        self.s = s
        self.margin = margin


class BoundViolated(SalemError):
    def __init__(self, step, bound, s, margin):
        super().__init__(
            f"step {step}: bound {bound!r} violated at s={s} (margin {margin:.3e}); "
            "the schedule needs a larger next scale"
        )
        self.step = step
        self.bound = bound
        self.s = s
        self.margin = margin


class EmptyBand(SalemError, ValueError):
    pass


class DegenerateMask(SalemError, ValueError):
    pass


class ConfigInvalid(SalemError, ValueError):
    def __init__(self, field, reason):
        super().__init__(f"invalid config field {field!r}: {reason}")
        self.field = field
        self.reason = reason


class RunNotFound(SalemError, FileNotFoundError):
    pass
