"""Exception hierarchy shared by all modules."""


class OgdError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(OgdError, ValueError):
    """Array shapes do not agree."""


class InfeasibleError(OgdError):
    """An optimization problem or set construction has no feasible point."""

    def __init__(self, message, residual=None, instance=None):
        super().__init__(message)
        self.residual = residual
        self.instance = instance


class UnboundedError(OgdError):
    """A linear or quadratic objective is unbounded below on the feasible set."""


class ConvergenceError(OgdError):
    """A solver hit its iteration cap; ``diagnostics`` holds the last residuals."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class AssumptionError(OgdError):
    """A standing assumption of the controller is violated."""
