class FracRoundError(Exception):
    pass


class InputError(FracRoundError, ValueError):
    pass


class ParameterError(FracRoundError, ValueError):
    pass


class StructuralError(FracRoundError, ValueError):
    """Raised when a vector references edges the graph does not have."""


class CapabilityError(FracRoundError):
    pass


class PromiseViolation(FracRoundError, ValueError):
    pass


class InvariantViolation(FracRoundError, AssertionError):
    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class StatisticalFailure(FracRoundError, RuntimeError):
    pass


class RegimeError(FracRoundError, ValueError):
    pass
