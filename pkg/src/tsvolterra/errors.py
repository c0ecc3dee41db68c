"""Exception hierarchy shared by every module of the package."""


class TimeScaleVolterraError(Exception):
    """Base class for all errors raised by tsvolterra."""


class InputError(TimeScaleVolterraError):
    """Malformed or inconsistent user input (maps to CLI exit code 2)."""


class InvalidTimeScale(InputError):
    pass


class PointNotInTimeScale(InputError):
    def __init__(self, t):
        super().__init__(f"point {t!r} is not in the time scale")
        self.t = t


class InvalidStep(InputError):
    pass


class PointNotOnGrid(InputError):
    def __init__(self, t):
        super().__init__(f"point {t!r} is not a grid point")
        self.t = t


class GridMismatch(InputError):
    pass


class NonRegressive(InputError):
    def __init__(self, p, t, mu):
        super().__init__(f"p={p!r} is not regressive at t={t!r} (1 + mu*p = {1 + mu * p!r} <= 0)")
        self.p = p
        self.t = t
        self.mu = mu


class NotRightScattered(InputError):
    def __init__(self, t):
        super().__init__(f"point {t!r} is right-dense (mu = 0)")
        self.t = t


class ParseError(InputError):
    """Invalid expression text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at byte offset {offset}")
        self.message = message
        self.offset = offset


class UnknownIdentifier(ParseError):
    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r}", offset)
        self.name = name


class EvaluationError(TimeScaleVolterraError):
    pass


class UnboundVariable(EvaluationError, InputError):
    def __init__(self, name):
        super().__init__(f"variable {name!r} is referenced but not bound")
        self.name = name


class DomainError(EvaluationError):
    pass


class NumericOverflow(EvaluationError):
    pass


class SolverError(TimeScaleVolterraError):
    """Numerical solver failure (maps to CLI exit code 3)."""


class NoConvergence(SolverError):
    """Picard iteration hit ``max_iter``; the partial report is attached."""

    def __init__(self, message, report=None, solution=None):
        super().__init__(message)
        self.report = report
        self.solution = solution


class SingularDiagonal(SolverError):
    pass


class StabilityHypothesisError(TimeScaleVolterraError):
    """A certificate precondition does not hold (maps to CLI exit code 5)."""


class NonPositiveOmega(StabilityHypothesisError):
    pass


class HypothesisViolated(StabilityHypothesisError):
    pass


class ConditionFailed(StabilityHypothesisError):
    pass
