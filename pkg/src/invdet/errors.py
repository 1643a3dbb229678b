"""Exception hierarchy.

The CLI maps :class:`BudgetExceededError` to exit code 2 and every other
:class:`InvdetError` to exit code 1.
"""


class InvdetError(Exception):
    """Base class for all library errors."""


class CatalogMissError(InvdetError, KeyError):
    """Requested field or algebra name is not in the shipped catalog."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class CorruptedCatalogError(InvdetError):
    """A catalog record failed its load-time self-check."""


class CatalogIncompleteError(InvdetError):
    """The catalog lacks data needed for the requested computation."""


class DimensionMismatchError(InvdetError):
    pass


class UnsupportedSignatureError(InvdetError):
    """Field is neither totally real nor totally complex."""


class ScopeError(InvdetError):
    """Inputs fall outside the range where the bounds are stated."""


class BudgetExceededError(InvdetError):
    """Predicted work exceeds the configured budget."""


class NoPointsError(InvdetError):
    pass


class NVDViolationError(InvdetError):
    """A nonzero lattice point with (numerically) vanishing determinant."""


class SpanError(InvdetError):
    pass


class GridMismatchError(InvdetError):
    pass


class DegenerateOrderError(InvdetError):
    pass


class ZeroElementError(InvdetError):
    pass


class NotInOrderError(InvdetError):
    pass
