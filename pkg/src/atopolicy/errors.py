"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid model parameters or malformed configuration input."""


class InstabilityError(RuntimeError):
    """The production system cannot keep up with demand in the long run."""


class ConvergenceError(RuntimeError):
    """An iterative computation did not converge within its budget."""


class ResourceLimitError(RuntimeError):
    """A computation exceeded its safety cap on state-space size."""
