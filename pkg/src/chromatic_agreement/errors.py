"""Exception hierarchy shared by all modules."""


class AgreementError(Exception):
    """Base class for every error raised by this package."""


class ComplexError(AgreementError, ValueError):
    """Malformed complex input (dangling or duplicate vertex ids)."""


class SimplexNotInComplex(AgreementError, KeyError):
    """A simplex was required to be a member of a complex and is not."""

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class NotChromaticError(AgreementError, ValueError):
    """An operation that needs a properly colored complex got one that is not."""


class NotPureError(AgreementError, ValueError):
    pass


class InvariantViolation(AgreementError):
    """A protocol invariant failed at runtime. Never caught inside the package."""


class NoStartVertex(InvariantViolation):
    """A convergence complex had no vertex of the process's color."""


class ScheduleError(AgreementError):
    pass


class ScheduleExhausted(ScheduleError):
    """A scripted schedule or exhaustive cursor has no choice left."""


class LivenessViolation(AgreementError):
    """A run exceeded its round budget without every process deciding."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class IncompleteTrace(AgreementError, ValueError):
    pass
