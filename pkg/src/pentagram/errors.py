"""Exception hierarchy shared by the kernel, constructions and generators."""

from __future__ import annotations


class GeometryError(Exception):
    """Base class for degenerate-geometry failures.

    ``index`` is the 1-based construction index (subscript mod 5) at which
    the failure happened, when the failure is tied to one.
    """

    def __init__(self, message: str = "", index: int | None = None):
        self.message = message
        self.index = index
        super().__init__(self._render())

    def _render(self) -> str:
        name = type(self).__name__
        where = f"({self.index})" if self.index is not None else ""
        return f"{name}{where}: {self.message}" if self.message else f"{name}{where}"

    def at(self, index: int) -> "GeometryError":
        """Return a copy of this error tagged with a construction index."""
        err = type(self)(self.message, index=index)
        err.__cause__ = self
        return err


class CoincidentPoints(GeometryError):
    pass


class ParallelLines(GeometryError):
    pass


class CollinearPoints(GeometryError):
    pass


class DegenerateTriple(GeometryError):
    pass


class ConcentricCircles(GeometryError):
    pass


class TangentCircles(GeometryError):
    pass


class CommonPointNotOnCircles(GeometryError):
    pass


class NotConcyclic(GeometryError):
    pass


class NotConcurrent(GeometryError):
    pass


class CoincidentCenters(GeometryError):
    pass


class FivePointCircleViolation(GeometryError):
    pass


class RejectionBudgetExhausted(RuntimeError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class DegenerateDuringSolve(RuntimeError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
