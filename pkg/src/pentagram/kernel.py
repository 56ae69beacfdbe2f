"""Exact and numeric plane-geometry primitives.

Coordinates are plain Python numbers of one of three kinds:

* ``fractions.Fraction`` (or ``int``): exact rational arithmetic;
* ``float``: IEEE double, 53-bit mantissa;
* ``mpmath.mpf``: binary floating point at the working precision of the
  enclosing :meth:`Mode.context` (``mpmath.workprec``).

Every operation is generic over the kind; predicates decide exactly when the
inputs are rational and against a :class:`Tolerance` otherwise. Nothing ever
takes a square root of a coordinate: circles keep their squared radius and
second intersections are obtained by reflection, so rational inputs stay
rational.
"""

from __future__ import annotations

import contextlib
import enum
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Any, Iterator, Sequence, Union

import mpmath

from .errors import (
    CoincidentPoints,
    CollinearPoints,
    CommonPointNotOnCircles,
    ConcentricCircles,
    DegenerateTriple,
    ParallelLines,
    TangentCircles,
)

Scalar = Union[Fraction, int, float, mpmath.mpf]

EXTENDED_BITS = 256


def is_exact(value: Any) -> bool:
    return isinstance(value, numbers.Rational)


def precision_of(value: Any) -> int | None:
    """Mantissa bits in effect for ``value``; None for exact rationals."""
    if is_exact(value):
        return None
    if isinstance(value, mpmath.mpf):
        return mpmath.mp.prec
    return 53


def sqrt(value: Scalar) -> Scalar:
    """Square root in the value's own arithmetic (exact rationals go to float)."""
    if isinstance(value, mpmath.mpf):
        return mpmath.sqrt(value)
    return math.sqrt(value)


def degeneracy_eps(value: Any) -> float | mpmath.mpf:
    """Relative threshold under which numeric quantities count as zero."""
    bits = precision_of(value)
    if bits is None:
        return 0
    if isinstance(value, mpmath.mpf):
        return mpmath.ldexp(1, -(3 * bits) // 4)
    return math.ldexp(1.0, -(3 * bits) // 4)


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INDETERMINATE = "INDETERMINATE"
    DEGENERATE = "DEGENERATE"


def default_rel_pass(bits: int) -> float:
    """1e-8 at 53 bits, 1e-40 at 256 bits and above, log-linear between."""
    if bits <= 53:
        return 1e-8
    if bits >= EXTENDED_BITS:
        return 1e-40
    return 10.0 ** (-8 - 32 * (bits - 53) / (EXTENDED_BITS - 53))


@dataclass(frozen=True)
class Tolerance:
    """Residual bands for numeric verdicts.

    Residuals below ``rel_pass`` pass, residuals above ``rel_fail_floor``
    fail, anything in between is INDETERMINATE.
    """

    rel_pass: float = 1e-8
    rel_fail_floor: float = 1e-4

    def __post_init__(self) -> None:
        if not 0 < self.rel_pass < self.rel_fail_floor:
            raise ValueError(
                f"need 0 < rel_pass < rel_fail_floor, got {self.rel_pass}, {self.rel_fail_floor}"
            )

    @classmethod
    def for_bits(cls, bits: int) -> "Tolerance":
        return cls(rel_pass=default_rel_pass(bits))

    def classify(self, residual: Scalar) -> Verdict:
        if residual < self.rel_pass:
            return Verdict.PASS
        if residual > self.rel_fail_floor:
            return Verdict.FAIL
        return Verdict.INDETERMINATE

    def to_dict(self) -> dict:
        return {"rel_pass": self.rel_pass, "rel_fail_floor": self.rel_fail_floor}


@dataclass(frozen=True)
class Mode:
    """Arithmetic backend: exact rationals, or binary floats of ``bits`` bits."""

    exact: bool = True
    bits: int = 53

    def __post_init__(self) -> None:
        if self.bits < 2:
            raise ValueError("bits must be at least 2")

    @property
    def label(self) -> str:
        return "exact" if self.exact else f"float{self.bits}"

    def context(self) -> contextlib.AbstractContextManager:
        if self.exact or self.bits == 53:
            return contextlib.nullcontext()
        return mpmath.workprec(self.bits)

    def tolerance(self) -> Tolerance:
        return Tolerance.for_bits(self.bits)

    def scalar(self, value: Any) -> Scalar:
        """Convert ``value`` (int, Fraction, float, mpf or numeric string) to this backend.

        Float-mode conversion of non-53-bit values must run inside
        :meth:`context` to get the right precision.
        """
        if self.exact:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, (int, str)):
                return Fraction(value)
            if isinstance(value, float):
                return Fraction(value)
            if isinstance(value, mpmath.mpf):
                man, exp = value.man_exp
                return Fraction(int(man)) * Fraction(2) ** int(exp)
            raise TypeError(f"cannot convert {value!r} to an exact scalar")
        if self.bits == 53:
            if isinstance(value, mpmath.mpf):
                return float(value)
            return float(Fraction(value)) if isinstance(value, str) else float(value)
        if isinstance(value, numbers.Rational):
            return mpmath.mpf(value.numerator) / value.denominator
        return mpmath.mpf(value)

    def point(self, p: "Point") -> "Point":
        return Point(self.scalar(p.x), self.scalar(p.y))

    def points(self, ps: Sequence["Point"]) -> list["Point"]:
        return [self.point(p) for p in ps]


EXACT = Mode(exact=True)
FLOAT = Mode(exact=False, bits=53)
EXTENDED = Mode(exact=False, bits=EXTENDED_BITS)


@dataclass(frozen=True)
class Point:
    x: Scalar
    y: Scalar

    def __iter__(self) -> Iterator[Scalar]:
        yield self.x
        yield self.y

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def scaled(self, k: Scalar) -> "Point":
        return Point(self.x * k, self.y * k)


@dataclass(frozen=True)
class Line:
    """The locus ``a*x + b*y + c = 0``."""

    a: Scalar
    b: Scalar
    c: Scalar

    def __post_init__(self) -> None:
        if self.a == 0 and self.b == 0:
            raise ValueError("line needs (a, b) != (0, 0)")

    def evaluate(self, p: Point) -> Scalar:
        return self.a * p.x + self.b * p.y + self.c


@dataclass(frozen=True)
class Circle:
    center: Point
    r2: Scalar

    def __post_init__(self) -> None:
        if not self.r2 > 0:
            raise ValueError("circle needs a positive squared radius")

    def power(self, p: Point) -> Scalar:
        return dist2(p, self.center) - self.r2

    def relative_power(self, p: Point) -> Scalar:
        return abs(self.power(p)) / self.r2


@dataclass(frozen=True)
class Check:
    """Outcome of a predicate: a verdict, its normalized residual and a witness."""

    verdict: Verdict
    residual: Scalar
    witness: Any = field(default=None, compare=False)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.PASS


def dist2(p: Point, q: Point) -> Scalar:
    dx = p.x - q.x
    dy = p.y - q.y
    return dx * dx + dy * dy


def cross(o: Point, p: Point, q: Point) -> Scalar:
    """Twice the signed area of the triangle (o, p, q)."""
    return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x)


def diameter2(points: Sequence[Point]) -> Scalar:
    """Largest pairwise squared distance."""
    return max((dist2(p, q) for p, q in combinations(points, 2)), default=0)


def _exact_ratio_report(num: Fraction, den: Fraction, squared: bool) -> float:
    # residuals of exact predicates are reported as floats
    if num == 0:
        return 0.0
    ratio = Fraction(num) / Fraction(den)
    return math.sqrt(ratio) if squared else float(ratio)


def _canonical_line(a: Fraction, b: Fraction, c: Fraction) -> Line:
    coeffs = [Fraction(a), Fraction(b), Fraction(c)]
    lcm = reduce(lambda m, f: m * f.denominator // math.gcd(m, f.denominator), coeffs, 1)
    ints = [int(f * lcm) for f in coeffs]
    g = reduce(math.gcd, (abs(v) for v in ints))
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    return Line(*(Fraction(v) for v in ints))


def canonical(line: Line) -> Line:
    """Integer, content-1, leading-positive form of an exact line."""
    return _canonical_line(line.a, line.b, line.c)


def same_point(p: Point, q: Point) -> bool:
    if is_exact(p.x) and is_exact(q.x):
        return p == q
    scale = max(abs(p.x), abs(p.y), abs(q.x), abs(q.y), 1)
    eps = degeneracy_eps(p.x + q.x)
    return dist2(p, q) <= (eps * scale) ** 2


def line_through(p: Point, q: Point) -> Line:
    if same_point(p, q):
        raise CoincidentPoints(f"{p} and {q}")
    a = p.y - q.y
    b = q.x - p.x
    c = p.x * q.y - p.y * q.x
    if is_exact(a) and is_exact(b) and is_exact(c):
        return _canonical_line(a, b, c)
    return Line(a, b, c)


def intersect_lines(l1: Line, l2: Line) -> Point:
    det = l1.a * l2.b - l2.a * l1.b
    if is_exact(det):
        if det == 0:
            raise ParallelLines("cross-determinant is zero")
    else:
        norms = sqrt((l1.a * l1.a + l1.b * l1.b) * (l2.a * l2.a + l2.b * l2.b))
        if abs(det) <= degeneracy_eps(det) * norms:
            raise ParallelLines(f"cross-determinant {det} is below tolerance")
    x = (l1.b * l2.c - l2.b * l1.c) / det
    y = (l1.c * l2.a - l2.c * l1.a) / det
    return Point(x, y)


def circumcircle(p: Point, q: Point, r: Point) -> Circle:
    if same_point(p, q) or same_point(q, r) or same_point(p, r):
        raise CoincidentPoints(f"{p}, {q}, {r}")
    d = 2 * cross(p, q, r)
    if is_exact(d):
        if d == 0:
            raise CollinearPoints(f"{p}, {q}, {r}")
    else:
        scale = max(dist2(p, q), dist2(q, r), dist2(p, r))
        if abs(d) <= 2 * degeneracy_eps(d) * scale:
            raise CollinearPoints(f"{p}, {q}, {r}")
    # work relative to p to keep magnitudes small
    bx, by = q.x - p.x, q.y - p.y
    cx, cy = r.x - p.x, r.y - p.y
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    center = Point(p.x + ux, p.y + uy)
    return Circle(center, ux * ux + uy * uy)


def reflect_across_line(p: Point, line: Line) -> Point:
    k = 2 * line.evaluate(p) / (line.a * line.a + line.b * line.b)
    return Point(p.x - k * line.a, p.y - k * line.b)


def second_intersection(c1: Circle, c2: Circle, common: Point) -> Point:
    """Other intersection point of two circles known to share ``common``."""
    if same_point(c1.center, c2.center):
        raise ConcentricCircles(f"both centered at {c1.center}")
    if is_exact(common.x) and is_exact(c1.r2) and is_exact(c2.r2):
        if c1.power(common) != 0 or c2.power(common) != 0:
            raise CommonPointNotOnCircles(f"{common}")
        if cross(c1.center, c2.center, common) == 0:
            raise TangentCircles(f"{common} is on the line of centers")
    else:
        tol = Tolerance.for_bits(precision_of(common.x))
        if c1.relative_power(common) >= tol.rel_pass or c2.relative_power(common) >= tol.rel_pass:
            raise CommonPointNotOnCircles(f"{common}")
        offset = abs(cross(c1.center, c2.center, common))
        if offset <= degeneracy_eps(offset) * sqrt(dist2(c1.center, c2.center) * c1.r2):
            raise TangentCircles(f"{common} is on the line of centers")
    return reflect_across_line(common, line_through(c1.center, c2.center))


def collinear3(
    p: Point, q: Point, r: Point, tol: Tolerance | None = None, scale: Scalar | None = None
) -> Check:
    """Collinearity of three points.

    The residual is |det| / (|pq| |pr|), the sine of the angle at ``p``; a
    duplicated point counts as collinear with residual 0. In numeric mode
    points closer than ``tol.rel_pass * scale`` are treated as duplicates.
    """
    det = cross(p, q, r)
    pq2 = dist2(p, q)
    pr2 = dist2(p, r)
    if is_exact(det):
        if pq2 == 0 or pr2 == 0:
            return Check(Verdict.PASS, 0.0)
        verdict = Verdict.PASS if det == 0 else Verdict.FAIL
        return Check(verdict, _exact_ratio_report(det * det, pq2 * pr2, squared=True))
    tol = tol or Tolerance.for_bits(precision_of(det))
    if scale is not None:
        near2 = (tol.rel_pass * scale) ** 2
        if pq2 <= near2 or pr2 <= near2 or dist2(q, r) <= near2:
            return Check(Verdict.PASS, 0 * det)
    if pq2 == 0 or pr2 == 0:
        return Check(Verdict.PASS, 0 * det)
    residual = abs(det) / sqrt(pq2 * pr2)
    return Check(tol.classify(residual), residual)


def incircle_det(p1: Point, p2: Point, p3: Point, p4: Point) -> Scalar:
    """Determinant of rows (x^2 + y^2, x, y, 1), reduced to 3x3 relative to ``p4``."""
    rows = []
    for p in (p1, p2, p3):
        dx = p.x - p4.x
        dy = p.y - p4.y
        rows.append((dx * dx + dy * dy, dx, dy))
    (a0, a1, a2), (b0, b1, b2), (c0, c1, c2) = rows
    return (
        a0 * (b1 * c2 - b2 * c1)
        - a1 * (b0 * c2 - b2 * c0)
        + a2 * (b0 * c1 - b1 * c0)
    )


def _fit_circle(p1: Point, p2: Point, p3: Point) -> Circle:
    try:
        return circumcircle(p1, p2, p3)
    except (CollinearPoints, CoincidentPoints) as err:
        raise DegenerateTriple(str(err)) from err


def concyclic4(p1: Point, p2: Point, p3: Point, p4: Point, tol: Tolerance | None = None) -> Check:
    circle = _fit_circle(p1, p2, p3)
    residual = circle.relative_power(p4)
    if is_exact(residual):
        det = incircle_det(p1, p2, p3, p4)
        verdict = Verdict.PASS if det == 0 else Verdict.FAIL
        return Check(verdict, float(residual), circle)
    tol = tol or Tolerance.for_bits(precision_of(residual))
    return Check(tol.classify(residual), residual, circle)


def concyclic_many(points: Sequence[Point], tol: Tolerance | None = None) -> Check:
    """Do all points lie on the circle through the first three?  Witness: that circle."""
    if len(points) < 4:
        raise ValueError("concyclic_many needs at least four points")
    circle = _fit_circle(points[0], points[1], points[2])
    powers = [circle.power(p) for p in points[3:]]
    if is_exact(circle.r2):
        verdict = Verdict.PASS if all(pw == 0 for pw in powers) else Verdict.FAIL
        return Check(verdict, float(max(abs(pw) for pw in powers) / circle.r2), circle)
    residual = max(abs(pw) for pw in powers) / circle.r2
    tol = tol or Tolerance.for_bits(precision_of(residual))
    return Check(tol.classify(residual), residual, circle)


def concurrent_lines(
    lines: Sequence[Line], tol: Tolerance | None = None, anchors: Sequence[Point] | None = None
) -> Check:
    """Do all lines pass through the intersection of the first two?  Witness: that point.

    The residual is the largest distance from the witness to a line, divided
    by the diameter of ``anchors`` (the points the lines were built from);
    without anchors distances are absolute.
    """
    if len(lines) < 3:
        raise ValueError("concurrent_lines needs at least three lines")
    x = intersect_lines(lines[0], lines[1])
    scale2 = diameter2(anchors) if anchors else 1
    values = [ln.evaluate(x) for ln in lines[2:]]
    if is_exact(x.x):
        verdict = Verdict.PASS if all(v == 0 for v in values) else Verdict.FAIL
        worst = max(
            Fraction(v * v) / ((ln.a * ln.a + ln.b * ln.b) * scale2) for v, ln in zip(values, lines[2:])
        )
        return Check(verdict, _exact_ratio_report(worst, 1, squared=True), x)
    residual = max(
        abs(v) / sqrt((ln.a * ln.a + ln.b * ln.b) * scale2) for v, ln in zip(values, lines[2:])
    )
    tol = tol or Tolerance.for_bits(precision_of(residual))
    return Check(tol.classify(residual), residual, x)
