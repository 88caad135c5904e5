"""Exception hierarchy shared by all modules."""


class PolarLatticeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(PolarLatticeError, ValueError):
    """An input violates a documented precondition."""


class InstabilityError(PolarLatticeError):
    """The quadratic Hamiltonian left the stable (real-frequency) regime.

    Raised when a Bogoliubov eigenproblem produces complex eigenvalues,
    or when a squared mode frequency comes out negative.
    """


class NumericalError(PolarLatticeError):
    """An eigensolver or other numerical backend failed."""


class ConfigError(PolarLatticeError):
    """An experiment configuration file is invalid.

    The message names the offending field path (e.g. ``lattice.nx``).
    """
