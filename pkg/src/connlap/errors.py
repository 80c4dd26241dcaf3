"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed arguments: bad simplices, degrees out of range, unknown presets."""


class DegenerateMetricError(ArithmeticError):
    """A simplex has (numerically) zero volume or a mass matrix is not positive definite."""


class MassDegenerateError(DegenerateMetricError):
    """The mass matrix of a pencil is not positive definite."""


class NumericalFailureError(RuntimeError):
    """An iterative numerical routine did not converge."""
