"""Exception hierarchy.

Everything raised on bad mathematical input derives from :class:`DomainError`;
the CLI maps those to exit status 3.
"""


class LameSpectraError(Exception):
    pass


class DomainError(LameSpectraError, ValueError):
    """Input lies outside the domain where an operation is defined."""


class DegenerateLatticeError(DomainError):
    pass


class LatticeProximityError(DomainError):
    pass


class BranchPointError(DomainError):
    pass


class QuadratureError(DomainError):
    pass


class DimensionError(DomainError):
    pass


class NotHermitianError(DomainError):
    pass


class GridCoverageError(DomainError):
    pass


class PhaseUnwindingError(DomainError):
    pass


class ContourError(DomainError):
    pass


class DegenerateSymbolError(DomainError):
    pass


class UndefinedAtJumpError(DomainError):
    """Heaviside-type quantities requested exactly at the jump point."""


class InconsistentTestFunctionError(DomainError):
    pass


class InfiniteValueError(DomainError):
    pass


class RootFinderWarning(RuntimeWarning):
    pass
