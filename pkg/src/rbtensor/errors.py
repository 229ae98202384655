"""Exception types shared across the library."""


class DimensionError(ValueError):
    """Operands have incompatible shapes or an index is out of range."""


class NumericalError(ArithmeticError):
    """A numerical routine failed (SVD non-convergence, non-finite values)."""
