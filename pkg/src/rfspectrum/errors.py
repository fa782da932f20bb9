"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters, malformed config files or violated preconditions."""


class NotHermitianError(ValueError):
    """A matrix failed the Hermitian symmetry check."""


class ConvergenceError(ArithmeticError):
    """The eigensolver did not reach its tolerance within the sweep cap."""
