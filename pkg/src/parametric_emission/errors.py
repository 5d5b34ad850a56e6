"""Exception hierarchy shared by the numerical modules."""


class ParameterError(ValueError):
    """Invalid physical parameters or arguments outside an operation's domain."""


class ConfigurationError(ValueError):
    """A required optional setting is missing or a config file is malformed."""


class BranchPointError(ValueError):
    """Evaluation requested exactly at a band-edge branch point."""


class PoleError(ArithmeticError):
    """Evaluation requested at (or numerically on top of) a pole."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConvergenceError(RuntimeError):
    """A root search or continuation failed to converge."""


class TrackBreakError(ConvergenceError):
    """Branch continuation could not proceed; carries the last good sample."""

    def __init__(self, message, last_sample=None):
        super().__init__(message)
        self.last_sample = last_sample


class AccuracyError(RuntimeError):
    """A quadrature missed its tolerance; ``estimate`` holds the best value."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class RegimeError(ValueError):
    """Operation requires the stable (or unstable) regime and got the other."""


class HorizonError(ValueError):
    """Requested time lies beyond the lattice oracle's reflection horizon."""
