"""Derived objects of the pentagon/pentagram configurations.

Arrays are Python sequences of length 5 where position ``k`` holds the
object with subscript ``k + 1``; all subscripts are taken mod 5, so index
shifts read the same in either convention. This module is the only place
that knows about the shifts. Error indices are reported 1-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import kernel
from .errors import (
    CoincidentCenters,
    FivePointCircleViolation,
    GeometryError,
    NotConcurrent,
    NotConcyclic,
)
from .kernel import (
    Check,
    Circle,
    Point,
    Tolerance,
    Verdict,
    circumcircle,
    concurrent_lines,
    concyclic_many,
    intersect_lines,
    line_through,
    second_intersection,
    same_point,
)

N = 5


def _at(i: int, err: GeometryError) -> GeometryError:
    return err.at(i % N + 1)


def _mode_label(p: Point) -> str:
    bits = kernel.precision_of(p.x)
    return "exact" if bits is None else f"float{bits}"


@dataclass(frozen=True)
class PentagramConfiguration:
    A: tuple[Point, ...]
    B: tuple[Point, ...]
    C: tuple[Point, ...]
    K: tuple[Point, ...]
    L: tuple[Point, ...]
    # side_circles[j] is the circle centered at K_{j+1}, i.e. (A_i A_{i+1} B_{i+2}) with j = i + 2
    side_circles: tuple[Circle, ...]
    mode: str
    D: tuple[Point, ...] | None = None
    E: tuple[Point, ...] | None = None
    O: Point | None = None
    J: Point | None = None
    X: Point | None = None
    circleA: Circle | None = None
    circleB: Circle | None = None
    circleC: Circle | None = None
    circleK: Circle | None = None
    circleE: Circle | None = None

    def points(self) -> dict[str, list[Point]]:
        """Every present point, keyed by symbol (single points as 1-element lists)."""
        out: dict[str, list[Point]] = {}
        for name in ("A", "B", "C", "K", "L", "D", "E"):
            value = getattr(self, name)
            if value is not None:
                out[name] = list(value)
        for name in ("O", "J", "X"):
            value = getattr(self, name)
            if value is not None:
                out[name] = [value]
        return out


@dataclass(frozen=True)
class TakadaConfiguration:
    A: tuple[Point, ...]
    Q: tuple[Point, ...]
    T: tuple[tuple[Point, Point, Point], ...]
    circles: tuple[Circle, ...]
    S: tuple[Point, ...]
    circleS: Circle | None
    incidences: tuple[Check, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class DualCenters:
    L: tuple[Point, ...]
    K: tuple[Point, ...]
    circles: tuple[Circle, ...]
    # checks[i] covers C_{i+2} and B_{i+4} on circles[i]
    checks: tuple[Check, ...] = field(default=(), compare=False)


class Anchor(str, enum.Enum):
    B_CIRCLE = "B"
    A_CIRCLE = "A"
    K_CIRCLE = "K"


def side_intersections(A: Sequence[Point]) -> list[Point]:
    """B_{i+3} = A_i A_{i+1} ∩ A_{i+2} A_{i+3}."""
    B: list[Point | None] = [None] * N
    for i in range(N):
        try:
            l1 = line_through(A[i], A[(i + 1) % N])
            l2 = line_through(A[(i + 2) % N], A[(i + 3) % N])
            B[(i + 3) % N] = intersect_lines(l1, l2)
        except GeometryError as err:
            raise _at(i, err) from err
    return B  # type: ignore[return-value]


def side_circles(A: Sequence[Point], B: Sequence[Point]) -> list[Circle]:
    """Circles (A_i A_{i+1} B_{i+2}), stored at the index of their center K_{i+2}."""
    circles: list[Circle | None] = [None] * N
    for i in range(N):
        try:
            circles[(i + 2) % N] = circumcircle(A[i], A[(i + 1) % N], B[(i + 2) % N])
        except GeometryError as err:
            raise _at(i, err) from err
    return circles  # type: ignore[return-value]


def centers_K(A: Sequence[Point], B: Sequence[Point]) -> list[Point]:
    return [c.center for c in side_circles(A, B)]


def _miquel_from_circles(A: Sequence[Point], circles: Sequence[Circle]) -> list[Point]:
    C: list[Point | None] = [None] * N
    for i in range(N):
        c1 = circles[(i + 2) % N]  # (A_i A_{i+1} B_{i+2})
        c2 = circles[(i + 3) % N]  # (A_{i+1} A_{i+2} B_{i+3})
        try:
            C[(i + 1) % N] = second_intersection(c1, c2, A[(i + 1) % N])
        except GeometryError as err:
            raise _at(i, err) from err
    return C  # type: ignore[return-value]


def miquel_points(A: Sequence[Point], B: Sequence[Point]) -> list[Point]:
    """C_{i+1}: second intersection of (A_i A_{i+1} B_{i+2}) and (A_{i+1} A_{i+2} B_{i+3})."""
    return _miquel_from_circles(A, side_circles(A, B))


def centers_L(B: Sequence[Point], C: Sequence[Point]) -> list[Point]:
    """L_i: center of (C_{i+1} B_{i+2} B_{i+3})."""
    L = []
    for i in range(N):
        try:
            L.append(circumcircle(C[(i + 1) % N], B[(i + 2) % N], B[(i + 3) % N]).center)
        except GeometryError as err:
            raise _at(i, err) from err
    return L


def build_configuration(A: Sequence[Point]) -> PentagramConfiguration:
    """A, B, C, K, L for five input points."""
    if len(A) != N:
        raise ValueError("need exactly five points")
    A = tuple(A)
    B = side_intersections(A)
    circles = side_circles(A, B)
    C = _miquel_from_circles(A, circles)
    L = centers_L(B, C)
    return PentagramConfiguration(
        A=A,
        B=tuple(B),
        C=tuple(C),
        K=tuple(c.center for c in circles),
        L=tuple(L),
        side_circles=tuple(circles),
        mode=_mode_label(A[0]),
    )


def require_distinct_centers(cfg: PentagramConfiguration) -> None:
    for i in range(N):
        if same_point(cfg.K[i], cfg.L[i]):
            raise CoincidentCenters(f"K and L coincide at {cfg.K[i]}", index=i + 1)


def kl_lines(cfg: PentagramConfiguration):
    require_distinct_centers(cfg)
    return [line_through(cfg.K[i], cfg.L[i]) for i in range(N)]


def dual_centers(
    A: Sequence[Point],
    B: Sequence[Point],
    C: Sequence[Point],
    tol: Tolerance | None = None,
    strict: bool = True,
) -> DualCenters:
    """Centers L'_i of (A_i C_{i+1} A_{i+2}) and circles (K'_i) through B_{i+1}, C_i, A_{i+1}.

    Each (K'_i) must also carry C_{i+2} and B_{i+4}; in exact mode a violation
    raises FivePointCircleViolation unless ``strict`` is off.
    """
    L, circles, checks = [], [], []
    for i in range(N):
        try:
            L.append(circumcircle(A[i], C[(i + 1) % N], A[(i + 2) % N]).center)
            five = [B[(i + 1) % N], C[i], A[(i + 1) % N], C[(i + 2) % N], B[(i + 4) % N]]
            check = concyclic_many(five, tol)
        except GeometryError as err:
            raise _at(i, err) from err
        if strict and kernel.is_exact(check.witness.r2) and not check.holds:
            raise FivePointCircleViolation(f"residual {check.residual}", index=i + 1)
        circles.append(check.witness)
        checks.append(check)
    return DualCenters(
        L=tuple(L), K=tuple(c.center for c in circles), circles=tuple(circles), checks=tuple(checks)
    )


def takada_construction(
    A: Sequence[Point], tol: Tolerance | None = None, check_cyclic: bool = True
) -> TakadaConfiguration:
    """Diagonal points Q_i = A_i A_{i+2} ∩ A_{i+1} A_{i+3}, tip triangles (A_i, Q_{i-1}, Q_{i-2}),
    and the second points S_i of adjacent tip circles, which meet at Q_{i-1}."""
    A = tuple(A)
    if check_cyclic:
        cyclic = concyclic_many(A, tol)
        if not cyclic.holds:
            raise NotConcyclic(f"input pentagon residual {cyclic.residual}")
    Q = []
    for i in range(N):
        try:
            Q.append(
                intersect_lines(
                    line_through(A[i], A[(i + 2) % N]),
                    line_through(A[(i + 1) % N], A[(i + 3) % N]),
                )
            )
        except GeometryError as err:
            raise _at(i, err) from err
    T = tuple((A[i], Q[(i - 1) % N], Q[(i - 2) % N]) for i in range(N))
    circles = []
    for i in range(N):
        try:
            circles.append(circumcircle(*T[i]))
        except GeometryError as err:
            raise _at(i, err) from err
    incidences = []
    S = []
    for i in range(N):
        shared = Q[(i - 1) % N]
        c1, c2 = circles[i], circles[(i + 1) % N]
        incidence = _on_both(c1, c2, shared, tol)
        if incidence.verdict is Verdict.FAIL:
            raise GeometryError(f"Q{(i - 1) % N + 1} is not on both tip circles", index=i + 1)
        incidences.append(incidence)
        try:
            S.append(second_intersection(c1, c2, shared))
        except GeometryError as err:
            raise _at(i, err) from err
    try:
        circleS = circumcircle(S[0], S[1], S[2])
    except GeometryError:
        circleS = None
    return TakadaConfiguration(
        A=A, Q=tuple(Q), T=T, circles=tuple(circles), S=tuple(S), circleS=circleS,
        incidences=tuple(incidences),
    )


def _on_both(c1: Circle, c2: Circle, p: Point, tol: Tolerance | None) -> Check:
    residual = max(c1.relative_power(p), c2.relative_power(p))
    if kernel.is_exact(residual):
        return Check(Verdict.PASS if residual == 0 else Verdict.FAIL, float(residual))
    tol = tol or Tolerance.for_bits(kernel.precision_of(residual))
    return Check(tol.classify(residual), residual)


def k_star_and_e_points(K: Sequence[Point]) -> tuple[list[Point], list[Point]]:
    """Star points of the K pentagon and the second points E of its tip circles.

    D_i = K_i K_{i+2} ∩ K_{i+1} K_{i+3}; E_i is the second intersection of
    (D_i D_{i+1} K_{i+2}) and (D_{i+1} D_{i+2} K_{i+3}), which share D_{i+1}.
    """
    D = []
    for i in range(N):
        try:
            D.append(
                intersect_lines(
                    line_through(K[i], K[(i + 2) % N]),
                    line_through(K[(i + 1) % N], K[(i + 3) % N]),
                )
            )
        except GeometryError as err:
            raise _at(i, err) from err
    E = []
    for i in range(N):
        try:
            c1 = circumcircle(D[i], D[(i + 1) % N], K[(i + 2) % N])
            c2 = circumcircle(D[(i + 1) % N], D[(i + 2) % N], K[(i + 3) % N])
            E.append(second_intersection(c1, c2, D[(i + 1) % N]))
        except GeometryError as err:
            raise _at(i, err) from err
    return D, E


def with_chain(cfg: PentagramConfiguration) -> PentagramConfiguration:
    """Attach D and E to a configuration."""
    D, E = k_star_and_e_points(cfg.K)
    return replace(cfg, D=tuple(D), E=tuple(E))


def distinguished_points(
    cfg: PentagramConfiguration, anchor: Anchor | str, tol: Tolerance | None = None
) -> tuple[Point, Point, Point]:
    """O (center of the anchor circle), J and X (common point of the lines K_i L_i).

    J is the center of the C circle, except for the K anchor, where it is the
    center of the E circle.
    """
    anchor = Anchor(anchor)
    anchor_points = {Anchor.A_CIRCLE: cfg.A, Anchor.B_CIRCLE: cfg.B, Anchor.K_CIRCLE: cfg.K}[anchor]
    anchored = concyclic_many(anchor_points, tol)
    if not anchored.holds:
        raise NotConcyclic(f"{anchor.value} points, residual {anchored.residual}")
    if anchor is Anchor.K_CIRCLE:
        E = cfg.E if cfg.E is not None else k_star_and_e_points(cfg.K)[1]
        j_check = concyclic_many(E, tol)
        if not j_check.holds:
            raise NotConcyclic(f"E points, residual {j_check.residual}")
    else:
        j_check = concyclic_many(cfg.C, tol)
        if not j_check.holds:
            raise NotConcyclic(f"C points, residual {j_check.residual}")
    x_check = concurrent_lines(kl_lines(cfg), tol, anchors=cfg.K + cfg.L)
    if not x_check.holds:
        raise NotConcurrent(f"lines K_iL_i, residual {x_check.residual}")
    return anchored.witness.center, j_check.witness.center, x_check.witness
