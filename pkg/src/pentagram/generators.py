"""Input pentagons for each theorem's hypothesis.

Every generator is a pure function of ``(GeneratorSpec, draw)``: the random
stream is seeded from a string built from the generator name, the seed and
the draw index, so trials can be produced in any order or process.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import mpmath
import numpy as np

from . import kernel
from .constructions import (
    N,
    build_configuration,
    dual_centers,
    k_star_and_e_points,
    require_distinct_centers,
    side_intersections,
    takada_construction,
)
from .errors import (
    DegenerateDuringSolve,
    GeometryError,
    NoConvergence,
    RejectionBudgetExhausted,
)
from .kernel import Point, circumcircle, cross, diameter2, intersect_lines, line_through

SOLVER_TOLERANCE = 1e-12
START_NOISE = 0.1


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int = 0
    coord_bound: int = 10
    denom_bound: int = 64
    convex_required: bool = True
    max_rejections: int = 10000

    def __post_init__(self) -> None:
        if self.coord_bound <= 0 or self.denom_bound <= 0:
            raise ValueError("coordinate and denominator bounds must be positive")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolveReport:
    iterations: int
    final_residual: float
    step_norms: list[float] = field(default_factory=list)
    converged: bool = False
    residual_history: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _rng(tag: str, spec: GeneratorSpec, draw: int) -> random.Random:
    return random.Random(f"{tag}:{spec.seed}:{draw}")


def _rational(rng: random.Random, bound: int, denom_bound: int) -> Fraction:
    den = rng.randint(1, denom_bound)
    return Fraction(rng.randint(-bound * den, bound * den), den)


def in_convex_position(A: Sequence[Point]) -> bool:
    """True if A is a strictly convex polygon in the given cyclic order."""
    signs = set()
    for i, j, k in combinations(range(len(A)), 3):
        c = cross(A[i], A[j], A[k])
        if c == 0:
            return False
        signs.add(c > 0)
    return len(signs) == 1


def admissible(A: Sequence[Point], cyclic: bool = False) -> bool:
    """Does the full construction pipeline run on A without a degeneracy?"""
    try:
        cfg = build_configuration(A)
        require_distinct_centers(cfg)
        dual_centers(cfg.A, cfg.B, cfg.C)
        if cyclic:
            takada_construction(A)
    except GeometryError:
        return False
    return True


def _draw_until(spec: GeneratorSpec, attempt: Callable[[int], object | None]):
    for rejection in range(spec.max_rejections):
        result = attempt(rejection)
        if result is not None:
            return result
    raise RejectionBudgetExhausted(f"no admissible draw in {spec.max_rejections} attempts")


def random_pentagon(spec: GeneratorSpec, draw: int = 0) -> list[Point]:
    rng = _rng("random_pentagon", spec, draw)

    def attempt(_: int):
        A = [
            Point(_rational(rng, spec.coord_bound, spec.denom_bound),
                  _rational(rng, spec.coord_bound, spec.denom_bound))
            for _ in range(N)
        ]
        if spec.convex_required and not in_convex_position(A):
            return None
        return A if admissible(A) else None

    return _draw_until(spec, attempt)


def circle_point(center: Point, radius: Fraction, t: Fraction) -> Point:
    """Rational point of the circle at parameter t (t = tan of half the angle)."""
    d = 1 + t * t
    return Point(center.x + radius * (1 - t * t) / d, center.y + radius * 2 * t / d)


def _draw_cyclic(rng: random.Random, spec: GeneratorSpec) -> list[Point] | None:
    center = Point(_rational(rng, spec.coord_bound, spec.denom_bound),
                   _rational(rng, spec.coord_bound, spec.denom_bound))
    den = rng.randint(1, spec.denom_bound)
    radius = Fraction(rng.randint(1, spec.coord_bound * den), den)
    ts = {_rational(rng, spec.coord_bound, spec.denom_bound) for _ in range(N)}
    if len(ts) < N:
        return None
    return [circle_point(center, radius, t) for t in sorted(ts)]


def cyclic_pentagon(spec: GeneratorSpec, draw: int = 0) -> list[Point]:
    rng = _rng("cyclic_pentagon", spec, draw)

    def attempt(_: int):
        A = _draw_cyclic(rng, spec)
        if A is None or not in_convex_position(A):
            return None
        return A if admissible(A, cyclic=True) else None

    return _draw_until(spec, attempt)


def pentagon_from_points_of_star(B: Sequence[Point]) -> list[Point]:
    """The pentagon whose side lines meet in the given star points.

    A_i = B_i B_{i+2} ∩ B_{i+1} B_{i+3}, so that line A_i A_{i+1} = B_{i+1} B_{i+3}.
    """
    return [
        intersect_lines(
            line_through(B[i], B[(i + 2) % N]), line_through(B[(i + 1) % N], B[(i + 3) % N])
        )
        for i in range(N)
    ]


def pentagon_from_star(spec: GeneratorSpec, draw: int = 0) -> tuple[list[Point], list[Point]]:
    rng = _rng("pentagon_from_star", spec, draw)

    def attempt(_: int):
        B = _draw_cyclic(rng, spec)
        if B is None:
            return None
        try:
            A = pentagon_from_points_of_star(B)
            if side_intersections(A) != B:
                return None
        except GeometryError:
            return None
        if spec.convex_required and not in_convex_position(A):
            return None
        return (A, B) if admissible(A) else None

    return _draw_until(spec, attempt)


def regular_pentagon(mode: kernel.Mode = kernel.FLOAT, radius=1) -> list[Point]:
    """A_k = radius * (cos(2 pi k / 5), sin(2 pi k / 5)) for k = 1..5 (float modes only)."""
    if mode.exact:
        raise ValueError("the regular pentagon has irrational coordinates")
    if mode.bits == 53:
        return [
            Point(radius * math.cos(2 * math.pi * k / N), radius * math.sin(2 * math.pi * k / N))
            for k in range(1, N + 1)
        ]
    r = mode.scalar(radius)
    return [
        Point(r * mpmath.cos(2 * mpmath.pi * k / N), r * mpmath.sin(2 * mpmath.pi * k / N))
        for k in range(1, N + 1)
    ]


def perturb(A: Sequence[Point], index: int, delta) -> list[Point]:
    """Translate A_index (1-based) by (delta, 0)."""
    if delta == 0:
        raise ValueError("delta must be nonzero")
    if not 1 <= index <= N:
        raise ValueError("index must be in 1..5")
    out = list(A)
    p = out[index - 1]
    out[index - 1] = Point(p.x + delta, p.y)
    return out


def side_length_spread(A: Sequence[Point]) -> float:
    sides = [math.sqrt(float(kernel.dist2(A[i], A[(i + 1) % N]))) for i in range(N)]
    return max(sides) - min(sides)


def k_residuals(A: Sequence[Point]) -> list:
    """Powers of K_4 and K_5 with respect to the circle (K_1 K_2 K_3), over radius times diameter.

    Near the circle this is about twice the distance to it in units of the
    diameter of K. Dividing by r2 instead would let the residual vanish as
    K_1, K_2, K_3 become collinear, which the iteration then heads for.
    """
    K = build_configuration(A).K
    circle = circumcircle(K[0], K[1], K[2])
    norm = kernel.sqrt(circle.r2 * diameter2(K))
    return [circle.power(K[j]) / norm for j in (3, 4)]


def _as_points(x: np.ndarray) -> list[Point]:
    return [Point(float(x[2 * i]), float(x[2 * i + 1])) for i in range(N)]


def _residual_vector(x: np.ndarray) -> np.ndarray:
    return np.array([float(r) for r in k_residuals(_as_points(x))])


def solver_start(spec: GeneratorSpec, draw: int = 0, attempt: int = 0) -> list[Point]:
    """Regular pentagon with each coordinate moved by uniform noise in [-0.1, 0.1]."""
    tag = "solve_concyclic_centers" if attempt == 0 else f"solve_concyclic_centers~{attempt}"
    rng = _rng(tag, spec, draw)
    return [
        Point(p.x + rng.uniform(-START_NOISE, START_NOISE), p.y + rng.uniform(-START_NOISE, START_NOISE))
        for p in regular_pentagon(kernel.FLOAT)
    ]


def solve_concyclic_centers(
    spec: GeneratorSpec,
    start: Sequence[Point] | None = None,
    draw: int = 0,
    max_iter: int = 200,
    tolerance: float = SOLVER_TOLERANCE,
) -> tuple[list[Point], SolveReport]:
    """Gauss-Newton search for a pentagon whose five centers K_i are concyclic.

    Minimum-norm steps on the two residuals of ``k_residuals``, Jacobian by
    central differences (step 1e-6 times the pentagon diameter), each step
    halved up to 30 times until the max-abs residual decreases.
    """
    if start is None:
        start = solver_start(spec, draw)
    x = np.array([float(c) for p in start for c in p])
    report = SolveReport(iterations=0, final_residual=math.inf)
    try:
        r = _residual_vector(x)
    except GeometryError as err:
        raise DegenerateDuringSolve(f"start is degenerate: {err}", report) from err
    norm = float(np.max(np.abs(r)))
    report.final_residual = norm
    report.residual_history.append(norm)

    while norm >= tolerance:
        if report.iterations >= max_iter:
            raise NoConvergence(
                f"residual {norm:.3e} after {report.iterations} iterations", report
            )
        h = 1e-6 * math.sqrt(float(diameter2(_as_points(x))))
        try:
            cols = []
            for k in range(2 * N):
                e = np.zeros(2 * N)
                e[k] = h
                cols.append((_residual_vector(x + e) - _residual_vector(x - e)) / (2 * h))
        except GeometryError as err:
            raise DegenerateDuringSolve(f"degenerate Jacobian stencil: {err}", report) from err
        jac = np.column_stack(cols)
        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        for _ in range(31):
            try:
                r_new = _residual_vector(x + step)
                new_norm = float(np.max(np.abs(r_new)))
            except GeometryError:
                new_norm = math.inf
            if np.isfinite(new_norm) and new_norm < norm:
                break
            step = step / 2
        else:
            raise NoConvergence(f"no decrease after 30 halvings at residual {norm:.3e}", report)
        x = x + step
        r, norm = r_new, new_norm
        report.iterations += 1
        report.step_norms.append(float(np.linalg.norm(step)))
        report.residual_history.append(norm)
        report.final_residual = norm

    A = _as_points(x)
    _require_solved_shape(A, report)
    report.converged = True
    return A, report


def _require_solved_shape(A: list[Point], report: SolveReport) -> None:
    # a K "circle" of huge radius is the collinear limit, not a solution
    try:
        cfg = build_configuration(A)
        require_distinct_centers(cfg)
        circle = circumcircle(*cfg.K[:3])
        k_star_and_e_points(cfg.K)
    except GeometryError as err:
        raise DegenerateDuringSolve(f"solution is degenerate: {err}", report) from err
    if circle.r2 > 1e6 * float(diameter2(A)):
        raise DegenerateDuringSolve("K points converged to a line", report)


SOLVE_ATTEMPTS = 20


def solved_pentagon(spec: GeneratorSpec, draw: int = 0, max_iter: int = 200) -> list[Point]:
    """A converged, admissible K-concyclic pentagon; failed starts are redrawn."""
    attempts = min(spec.max_rejections, SOLVE_ATTEMPTS)
    last: Exception | None = None
    for attempt in range(attempts):
        try:
            A, _ = solve_concyclic_centers(spec, solver_start(spec, draw, attempt), max_iter=max_iter)
        except (NoConvergence, DegenerateDuringSolve) as err:
            last = err
            continue
        if admissible(A):
            return A
    raise RejectionBudgetExhausted(f"no solver start converged in {attempts} attempts (last: {last})")
