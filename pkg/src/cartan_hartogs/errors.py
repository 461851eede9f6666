"""Exception hierarchy shared by all modules."""


class CartanHartogsError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(CartanHartogsError, ValueError):
    """Input array has the wrong shape for the requested domain."""


class SymmetryError(CartanHartogsError, ValueError):
    """A symmetry invariant (symmetric, skew, Hermitian) is violated."""


class DomainError(CartanHartogsError, ValueError):
    """A point lies outside the domain an operation requires."""


class BranchError(CartanHartogsError, ArithmeticError):
    """Principal branch of a fractional power is not available."""


class KernelZeroError(CartanHartogsError, ArithmeticError):
    """The Bergman kernel vanishes where a logarithm is needed."""


class MethodDisagreement(CartanHartogsError, ArithmeticError):
    """Two independent numerical routes produced inconsistent answers."""


class IllConditionedError(CartanHartogsError, ArithmeticError):
    """A numerical routine could not meet its accuracy contract."""


class IntegrationError(CartanHartogsError, ArithmeticError):
    """The ODE integrator failed (step underflow, wrong branch)."""


class DegenerateMetric(CartanHartogsError, ArithmeticError):
    """A metric tensor is not positive definite where it must be."""
