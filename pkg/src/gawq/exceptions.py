"""Exception types raised by the simulator."""


class GawqError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(GawqError, ValueError):
    """Invalid chain configuration (one message per offending field)."""


class IllConditioned(GawqError, ArithmeticError):
    """The resolvent solve at a detuning is too ill-conditioned to trust.

    Usually means the detuning sits next to an exceptional point of the
    effective Hamiltonian.
    """

    def __init__(self, delta, condition):
        self.delta = delta
        self.condition = condition
        super().__init__(
            f"condition estimate {condition:.3e} at delta={delta!r} exceeds limit"
        )


class CoincidentPoints(GawqError, ValueError):
    """Two connection points share the same phase (within tolerance)."""


class SingularSystem(GawqError, ArithmeticError):
    """The real-space equations of motion could not be solved."""


class CountMismatch(GawqError, ValueError):
    """Mode and eigenstate counts differ."""


class NotNormalized(GawqError, ValueError):
    """A state vector does not have unit norm."""
