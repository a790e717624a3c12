"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class InternalInconsistency(ArithmeticError):
    """A self-check inside an exact computation failed; indicates a bug."""


class SingularMatrix(ArithmeticError):
    """Exact elimination ran out of nonzero pivots."""


class PoleProximity(ArithmeticError):
    """Evaluation point is too close to a singularity for the working precision."""
