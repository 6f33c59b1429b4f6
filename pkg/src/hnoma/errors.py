"""Exception types raised by the simulator."""


class InvalidParameterError(ValueError):
    """A parameter is outside its admissible range."""


class InfeasibleBudgetError(ArithmeticError):
    """Access losses alone already exceed the URLLC reliability target."""

    def __init__(self, message, p_access=None, eps_U=None):
        super().__init__(message)
        self.p_access = p_access
        self.eps_U = eps_U


class InfeasibleFronthaulError(ArithmeticError):
    """The fronthaul budget left for quantized samples is not positive."""


class InsufficientSamplesError(ValueError):
    """Too few samples to resolve the requested lower-tail quantile."""

    def __init__(self, message, required=None, available=None):
        super().__init__(message)
        self.required = required
        self.available = available


class PrecoderConvergenceError(RuntimeError):
    """The precoder power/fronthaul fixed point did not settle."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate
