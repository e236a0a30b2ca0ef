"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a hard size/budget cap."""


class TableTooSmallError(ValueError):
    """A prime table does not cover the queried range."""


class EncodeOverflowError(OverflowError):
    """A Bohr encoding would exceed the 63-bit integer range."""


class LiftError(ValueError):
    """Lifting/pushing between Dirichlet and polydisc forms failed.

    ``offenders`` lists the multi-indices (or integers) that broke the
    precondition, when applicable.
    """

    def __init__(self, message, offenders=()):
        super().__init__(message)
        self.offenders = tuple(offenders)


class AliasingError(ValueError):
    """Circle-averaging order K does not exceed the polynomial degree."""


class WitnessUnavailableError(ValueError):
    """No extremal witness exists at the requested size."""


class PreconditionError(ValueError):
    """A caller-guaranteed normalization was detectably violated."""
