"""Exception hierarchy shared by all modules."""


class PrimeCFError(Exception):
    """Base class for errors raised by primecf."""


class DomainError(PrimeCFError, ValueError):
    """Argument outside the mathematical domain of the function."""


class PoleError(DomainError):
    """Argument sits on a pole or logarithmic singularity."""


class DivergenceError(DomainError):
    """Series requested outside its disk of convergence."""


class OnSupportError(DomainError):
    """Stieltjes transform evaluated on the support of its measure."""


class OutOfRangeError(PrimeCFError, ValueError):
    """Query exceeds the range covered by a sieve."""


class ResourceError(PrimeCFError, MemoryError):
    """Requested sieve exceeds the configured memory budget."""


class SingularityError(PrimeCFError, ZeroDivisionError):
    """A zero denominator turned up during a recurrence or closed form."""


class ExactnessError(PrimeCFError, TypeError):
    """An exact (rational) computation was handed an inexact coefficient."""


class IllConditionedError(PrimeCFError, ArithmeticError):
    """Moment data too ill-conditioned for the requested qd depth."""
