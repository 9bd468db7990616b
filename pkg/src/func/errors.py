"""Exceptions raised by the covering library.

Every library failure derives from :class:`CoverError` so the CLI can map
errors to exit codes in one place.
"""

from __future__ import annotations


class CoverError(ValueError):
    """Base class for input and validation errors (CLI exit code 2)."""


class DegenerateInput(CoverError):
    """Polygon has fewer than three non-collinear vertices or is otherwise invalid."""


class NotConvex(CoverError):
    """A convex polygon was required."""


class NotSimple(CoverError):
    """Polygon boundary intersects itself."""


class NoUniquePoint(CoverError):
    """Two segments overlap along a common sub-segment."""


class UnsupportedPhase(CoverError):
    """Hexagon phase is neither 0 nor pi/6."""


class IllConditioned(CoverError):
    """Three surfaces are (nearly) dependent; their intersection is not isolated."""


class FrameMismatch(CoverError):
    """Centers and polygon are obviously expressed in different frames."""


class MalformedFile(CoverError):
    """Input or covering file cannot be parsed.

    Parameters
    ----------
    field
        Name of the offending field.
    message
        Human-readable description.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class BudgetExceeded(RuntimeError):
    """The joint search would examine more surface triples than allowed (exit code 3)."""

    def __init__(self, triples: int, budget: int) -> None:
        super().__init__(
            f"{triples} surface triples exceed the budget of {budget}; "
            "shrink the instance or use the sweep algorithm"
        )
        self.triples = triples
        self.budget = budget
