"""Exception hierarchy shared by all modules."""


class SuperframesError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SuperframesError, ValueError):
    """A value violates the invariants of its type."""


class CompositionError(SuperframesError, ValueError):
    """Superpositions do not form a frame chain."""


class DegenerateStateError(SuperframesError, ValueError):
    """All amplitudes vanish, so no probability distribution exists."""


class SupportError(SuperframesError, LookupError):
    """A transform is not in the support of a superposition."""


class GroupError(SuperframesError, ValueError):
    """Group-algebra operands are inconsistent."""


class GridError(SuperframesError, ValueError):
    """Fields live on incompatible grids."""


class ClippingError(SuperframesError, RuntimeError):
    """Too much probability mass was mapped outside the grid."""


class SimulationError(SuperframesError, FloatingPointError):
    """Time evolution produced non-finite values."""


class ScenarioError(SuperframesError, ValueError):
    """A scenario file is malformed or inconsistent."""
