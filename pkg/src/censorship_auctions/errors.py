class InputError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class SolverError(RuntimeError):
    """Raised when a numerical solve cannot produce a trustworthy answer."""


class AssumptionViolation(SolverError):
    """A distribution fails a hypothesis the equilibrium construction needs.

    ``diagnostic`` carries the offending report so callers can show where the
    check broke down.
    """

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic
