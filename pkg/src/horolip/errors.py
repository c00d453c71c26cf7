"""Exception hierarchy shared by every module."""


class HorolipError(Exception):
    pass


class GenerationError(HorolipError, ValueError):
    """A generating set fails to generate the full lattice."""


class DimensionError(HorolipError, ValueError):
    """Dimensions disagree, or a hull is not full-dimensional."""


class RankError(HorolipError, ValueError):
    """A sublattice is not of full rank."""


class PreconditionError(HorolipError, ValueError):
    pass


class InsufficientSampleError(HorolipError):
    pass


class InsufficientDataError(HorolipError):
    pass


class WindowExhaustedError(HorolipError):
    pass


class BudgetError(HorolipError):
    """A search or convergence budget ran out before its target was met."""


class CocycleMismatchError(HorolipError, ValueError):
    pass


class RegimeError(HorolipError, ValueError):
    pass


class NoSeparationError(HorolipError, ValueError):
    pass


class InvariantViolation(HorolipError, AssertionError):
    """A proven identity failed numerically; indicates a bug or too short a horizon."""
