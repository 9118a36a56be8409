"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operands have incompatible or invalid dimensions."""


class DomainError(ValueError):
    """A value lies outside the mathematical domain of an operation."""


class SupportViolationError(DomainError):
    """A distribution assigns weight where its reference has none."""


class InfeasibleTargetError(ValueError):
    """A constraint target cannot be met by any admissible posterior."""


class EigensolverError(RuntimeError):
    """The eigenvalue routine failed to converge.

    iterations is None when the backend does not report a count.
    """

    def __init__(self, dim: int, iterations: int | None = None):
        self.dim = dim
        self.iterations = iterations
        detail = f"eigensolver failed to converge for dim={dim}"
        if iterations is not None:
            detail += f" after {iterations} iterations"
        super().__init__(detail)
