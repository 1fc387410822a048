"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An argument is outside its admissible range."""


class DegenerateInputError(ValueError):
    """The data make the requested quantity ill defined."""


class NonFiniteInputError(ValueError):
    """Input contains NaN or infinite entries."""
