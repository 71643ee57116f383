"""Exception hierarchy shared by all modules."""


class SwitchSurfError(Exception):
    """Base class for all package errors."""


class ContractViolation(SwitchSurfError, ValueError):
    """Input violates a documented precondition (shape, sign, range)."""


class NoUniqueSolution(SwitchSurfError):
    """The Lyapunov equation has no unique solution."""


class NoConvergence(SwitchSurfError):
    """Newton iteration failed to converge."""


class NotASwitchedEquilibrium(SwitchSurfError):
    """A root was found but its weight lies outside [0, 1]."""


class NoSwitchedEquilibrium(SwitchSurfError):
    """No switched equilibrium exists for the requested data."""


class CQLFError(SwitchSurfError):
    """A candidate P does not certify a common quadratic Lyapunov function."""

    def __init__(self, message, alpha=None):
        super().__init__(message)
        self.alpha = alpha


class DegenerateError(SwitchSurfError):
    """A construction needs a nonzero vector that turned out to be zero."""


class Divergence(SwitchSurfError):
    """The simulated state became non-finite."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
