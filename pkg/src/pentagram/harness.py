"""Theorem checkers and seeded verification suites."""

from __future__ import annotations

import enum
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Any, Callable, Sequence

import mpmath

from . import generators
from .configio import format_point, format_scalar
from .constructions import (
    N,
    PentagramConfiguration,
    build_configuration,
    dual_centers,
    kl_lines,
    side_intersections,
    takada_construction,
    with_chain,
)
from .errors import DegenerateDuringSolve, GeometryError, NoConvergence, RejectionBudgetExhausted
from .generators import GeneratorSpec
from .kernel import (
    EXACT,
    EXTENDED,
    Check,
    Mode,
    Point,
    Tolerance,
    Verdict,
    circumcircle,
    collinear3,
    concurrent_lines,
    concyclic_many,
    diameter2,
    dist2,
    is_exact,
    line_through,
    sqrt,
)

# solver configurations are only on the Theorem-6 manifold to about 1e-12
CHAIN_TOLERANCE = Tolerance(rel_pass=1e-9, rel_fail_floor=1e-4)


@dataclass(frozen=True)
class Perturbation:
    """A negative control: move point ``index`` (1-based) of ``target`` by a relative ``delta``.

    Targets and how the point moves:

    * ``"A"``: input vertex, by (delta * extent of A, 0) before construction;
    * ``"C"`` / ``"S"``: radially away from the circle through points 1..3 of
      the set, by delta times its radius (index must be 4 or 5);
    * ``"C_dual"``: C_k radially away from the five-point circle (K'_{k-2})
      on which it is claimed to lie, by delta times that radius;
    * ``"KL"``: the anchor of line K_kL_k nearer to the concurrency point,
      perpendicular to the line by delta times the diameter of K and L
      (index must be 3..5, since lines 1 and 2 define the point).

    The moves are normal to the locus each claim puts the point on, so the
    claim's residual grows at first order in delta.
    """

    target: str
    index: int
    delta: Any

    def apply(self, points: Sequence[Point], mode: Mode) -> list[Point]:
        xs = [p.x for p in points]
        ys = [p.y for p in points]
        extent = max(max(xs) - min(xs), max(ys) - min(ys))
        return generators.perturb(points, self.index, mode.scalar(self.delta) * extent)

    def radial(self, points: Sequence[Point], center: Point, mode: Mode) -> tuple[Point, ...]:
        out = list(points)
        p = out[self.index - 1]
        out[self.index - 1] = p + (p - center).scaled(mode.scalar(self.delta))
        return tuple(out)

    def to_dict(self) -> dict:
        return {"target": self.target, "index": self.index, "delta": format_scalar(self.delta)}


def control_index(target: str, draw: int) -> int:
    if target in ("C", "S"):
        return 4 + draw % 2
    if target == "KL":
        return 3 + draw % 3
    return draw % N + 1


def _tampered(cfg: PentagramConfiguration, pert: "Perturbation | None", mode: Mode) -> PentagramConfiguration:
    if pert is None or pert.target == "A":
        return cfg
    k = pert.index - 1
    if pert.target == "C":
        center = circumcircle(*cfg.C[:3]).center
        return replace(cfg, C=pert.radial(cfg.C, center, mode))
    if pert.target == "C_dual":
        i = (k - 2) % N
        center = circumcircle(cfg.B[(i + 1) % N], cfg.C[i], cfg.A[(i + 1) % N]).center
        return replace(cfg, C=pert.radial(cfg.C, center, mode))
    if pert.target == "KL":
        x = concurrent_lines(kl_lines(cfg)).witness
        K, L = list(cfg.K), list(cfg.L)
        direction = L[k] - K[k]
        length = math.sqrt(float(dist2(L[k], K[k])))
        shift = mode.scalar(float(pert.delta) * math.sqrt(float(diameter2(cfg.K + cfg.L))) / length)
        normal = Point(-direction.y * shift, direction.x * shift)
        if dist2(K[k], x) < dist2(L[k], x):
            K[k] = K[k] + normal
        else:
            L[k] = L[k] + normal
        return replace(cfg, K=tuple(K), L=tuple(L))
    raise ValueError(f"unknown perturbation target {pert.target!r}")


class Theorem(str, enum.Enum):
    MIQUEL_T1 = "MIQUEL_T1"
    TAKADA_T1A = "TAKADA_T1A"
    FIVE_CIRCLES_T2 = "FIVE_CIRCLES_T2"
    ELEVEN_CIRCLES_T3 = "ELEVEN_CIRCLES_T3"
    COLLINEAR_B_T4 = "COLLINEAR_B_T4"
    COLLINEAR_A_T5 = "COLLINEAR_A_T5"
    FIVE_CIRCLES_CHAIN_T6 = "FIVE_CIRCLES_CHAIN_T6"
    DUAL_T7 = "DUAL_T7"


@dataclass
class Assertion:
    name: str
    verdict: Verdict
    residual: Any = None
    hypothesis: bool = False
    detail: str = ""

    def to_dict(self, bits: int | None) -> dict:
        out: dict[str, Any] = {"name": self.name, "verdict": self.verdict.value}
        if self.residual is None:
            out["residual"] = None
        else:
            out["residual"] = float(self.residual)
            if isinstance(self.residual, mpmath.mpf):
                out["residual_hp"] = format_scalar(self.residual, bits)
        if self.hypothesis:
            out["hypothesis"] = True
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class TheoremReport:
    theorem: Theorem
    mode: Mode
    tolerance: Tolerance | None
    assertions: list[Assertion] = field(default_factory=list)
    witnesses: dict[str, Point] = field(default_factory=dict)
    seed: int | None = None
    draw: int | None = None
    perturbation: Perturbation | None = None
    elapsed: float = 0.0

    @property
    def verdict(self) -> Verdict:
        verdicts = {a.verdict for a in self.assertions}
        if not verdicts:
            return Verdict.DEGENERATE
        for v in (Verdict.DEGENERATE, Verdict.FAIL, Verdict.INDETERMINATE):
            if v in verdicts:
                return v
        return Verdict.PASS

    def assertion(self, name: str) -> Assertion:
        return next(a for a in self.assertions if a.name == name)

    def max_residual(self):
        values = [a.residual for a in self.assertions if a.residual is not None]
        return max(values) if values else None

    def to_dict(self, include_timing: bool = False) -> dict:
        bits = None if self.mode.exact else self.mode.bits
        out: dict[str, Any] = {
            "theorem": self.theorem.value,
            "mode": self.mode.label,
            "seed": self.seed,
            "draw": self.draw,
            "perturbation": self.perturbation.to_dict() if self.perturbation else None,
            "verdict": self.verdict.value,
            "assertions": [a.to_dict(bits) for a in self.assertions],
            "witnesses": {k: format_point(p, bits) for k, p in self.witnesses.items()},
        }
        if include_timing:
            out["elapsed"] = self.elapsed
        return out


# ---------------------------------------------------------------- assertions


def _from_check(name: str, check: Check, hypothesis: bool = False) -> Assertion:
    verdict = check.verdict
    if hypothesis and verdict is Verdict.FAIL:
        verdict = Verdict.DEGENERATE
    return Assertion(name, verdict, check.residual, hypothesis=hypothesis)


def _scale(points: Sequence[Point]):
    return sqrt(diameter2(points))


def _graded(residual, tol: Tolerance) -> Verdict:
    if is_exact(residual):
        return Verdict.PASS if residual == 0 else Verdict.FAIL
    return tol.classify(residual)


def eleven_circles_assertions(cfg: PentagramConfiguration, tol: Tolerance | None) -> tuple[list[Assertion], Point]:
    check = concurrent_lines(kl_lines(cfg), tol, anchors=cfg.K + cfg.L)
    return [_from_check("K_iL_i concurrent", check)], check.witness


def dual_assertions(cfg: PentagramConfiguration, tol: Tolerance | None) -> tuple[list[Assertion], Point]:
    dual = dual_centers(cfg.A, cfg.B, cfg.C, tol, strict=False)
    out = [_from_check(f"five-point circle (K'_{i + 1})", c) for i, c in enumerate(dual.checks)]
    lines = [line_through(dual.K[i], dual.L[i]) for i in range(N)]
    check = concurrent_lines(lines, tol, anchors=dual.K + dual.L)
    out.append(_from_check("K'_iL'_i concurrent", check))
    return out, check.witness


def collinearity_assertions(
    cfg: PentagramConfiguration, anchor: Sequence[Point], anchor_name: str, tol: Tolerance | None
) -> tuple[list[Assertion], dict[str, Point]]:
    circle_o = concyclic_many(anchor, tol)
    circle_j = concyclic_many(cfg.C, tol)
    x_check = concurrent_lines(kl_lines(cfg), tol, anchors=cfg.K + cfg.L)
    O, J, X = circle_o.witness.center, circle_j.witness.center, x_check.witness
    scale = _scale(cfg.A + cfg.B)
    out = [
        _from_check(f"{anchor_name} concyclic", circle_o, hypothesis=True),
        _from_check("C concyclic", circle_j),
        _from_check("K_iL_i concurrent", x_check),
        _from_check("O, J, X collinear", collinear3(O, J, X, tol, scale)),
    ]
    return out, {"O": O, "J": J, "X": X}


def chain_assertions(
    cfg: PentagramConfiguration, tol: Tolerance
) -> tuple[list[Assertion], dict[str, Point]]:
    if cfg.E is None:
        cfg = with_chain(cfg)
    k_check = concyclic_many(cfg.K, tol)
    circle_k = k_check.witness
    circle_c = concyclic_many(cfg.C, tol).witness
    identity = max(
        sqrt(dist2(circle_k.center, circle_c.center) / circle_k.r2),
        abs(circle_k.r2 - circle_c.r2) / circle_k.r2,
        max(circle_k.relative_power(c) for c in cfg.C),
    )
    e_check = concyclic_many(cfg.E, tol)
    x_check = concurrent_lines(kl_lines(cfg), tol, anchors=cfg.K + cfg.L)
    O, J, X = circle_k.center, e_check.witness.center, x_check.witness
    scale = _scale(cfg.A + cfg.K)
    out = [
        _from_check("K concyclic", k_check, hypothesis=True),
        Assertion("circle(K) = circle(C)", _graded(identity, tol), identity),
        _from_check("E concyclic", e_check),
    ]
    for i in range(N):
        out.append(_from_check(
            f"K_{i + 1}, L_{i + 1}, E_{i + 1} collinear",
            collinear3(cfg.K[i], cfg.L[i], cfg.E[i], tol, scale),
        ))
    out.append(_from_check("O, J, X collinear", collinear3(O, J, X, tol, scale)))
    return out, {"O": O, "J": J, "X": X}


# ------------------------------------------------------------------ checkers


def _run(
    theorem: Theorem,
    A: Sequence[Point],
    mode: Mode,
    tol: Tolerance | None,
    body: Callable[[list[Point], TheoremReport], None],
    seed: int | None = None,
    draw: int | None = None,
    perturbation: Perturbation | None = None,
) -> TheoremReport:
    tol = None if mode.exact else (tol or mode.tolerance())
    report = TheoremReport(
        theorem=theorem, mode=mode, tolerance=tol, seed=seed, draw=draw, perturbation=perturbation
    )
    start = time.perf_counter()
    with mode.context():
        points = mode.points(A)
        if perturbation is not None and perturbation.target == "A":
            points = perturbation.apply(points, mode)
        try:
            body(points, report)
        except GeometryError as err:
            report.assertions.append(Assertion("construction", Verdict.DEGENERATE, detail=str(err)))
    report.elapsed = time.perf_counter() - start
    return report


def _configure(points: list[Point], report: TheoremReport) -> PentagramConfiguration:
    cfg = build_configuration(points)
    if report.perturbation is not None and report.perturbation.target in ("D", "E"):
        cfg = with_chain(cfg)
    return _tampered(cfg, report.perturbation, report.mode)


def check_miquel(A, mode: Mode = EXACT, tol: Tolerance | None = None, **meta) -> TheoremReport:
    def body(points, report):
        cfg = _configure(points, report)
        report.assertions.append(_from_check("C concyclic", concyclic_many(cfg.C, report.tolerance)))

    return _run(Theorem.MIQUEL_T1, A, mode, tol, body, **meta)


def check_takada(A, mode: Mode = EXACT, tol: Tolerance | None = None, **meta) -> TheoremReport:
    def body(points, report):
        t = report.tolerance
        report.assertions.append(_from_check("A concyclic", concyclic_many(points, t), hypothesis=True))
        tk = takada_construction(points, t, check_cyclic=False)
        if report.perturbation is not None and report.perturbation.target == "S":
            center = circumcircle(*tk.S[:3]).center
            tk = replace(tk, S=report.perturbation.radial(tk.S, center, report.mode))
        for i, inc in enumerate(tk.incidences):
            q = (i - 1) % N + 1
            report.assertions.append(_from_check(
                f"Q_{q} on circles T_{i + 1}, T_{(i + 1) % N + 1}", inc
            ))
        report.assertions.append(_from_check("S concyclic", concyclic_many(tk.S, t)))

    return _run(Theorem.TAKADA_T1A, A, mode, tol, body, **meta)


def check_eleven_circles(A, mode: Mode = EXACT, tol: Tolerance | None = None, **meta) -> TheoremReport:
    def body(points, report):
        assertions, X = eleven_circles_assertions(_configure(points, report), report.tolerance)
        report.assertions.extend(assertions)
        report.witnesses["X"] = X

    return _run(Theorem.ELEVEN_CIRCLES_T3, A, mode, tol, body, **meta)


def check_dual(A, mode: Mode = EXACT, tol: Tolerance | None = None, **meta) -> TheoremReport:
    def body(points, report):
        assertions, X = dual_assertions(_configure(points, report), report.tolerance)
        report.assertions.extend(assertions)
        report.witnesses["X"] = X

    return _run(Theorem.DUAL_T7, A, mode, tol, body, **meta)


def check_collinear_B(
    A, B=None, mode: Mode = EXACT, tol: Tolerance | None = None, **meta
) -> TheoremReport:
    """O, J, X collinear when the star points B are concyclic.

    With ``B`` given (from ``pentagon_from_star``) the checker also asserts
    that the side intersections of A reproduce it.
    """
    def body(points, report):
        t = report.tolerance
        cfg = _configure(points, report)
        if B is not None:
            given = report.mode.points(B)
            gap = max(dist2(p, q) for p, q in zip(side_intersections(points), given))
            gap = gap / diameter2(given)
            residual = float(math.sqrt(gap)) if is_exact(gap) else sqrt(gap)
            verdict = (Verdict.PASS if gap == 0 else Verdict.FAIL) if is_exact(gap) else t.classify(residual)
            report.assertions.append(Assertion("side intersections reproduce B", verdict, residual))
        assertions, witnesses = collinearity_assertions(cfg, cfg.B, "B", t)
        report.assertions.extend(assertions)
        report.witnesses.update(witnesses)

    return _run(Theorem.COLLINEAR_B_T4, A, mode, tol, body, **meta)


def check_collinear_A(A, mode: Mode = EXACT, tol: Tolerance | None = None, **meta) -> TheoremReport:
    def body(points, report):
        cfg = _configure(points, report)
        assertions, witnesses = collinearity_assertions(cfg, cfg.A, "A", report.tolerance)
        report.assertions.extend(assertions)
        report.witnesses.update(witnesses)

    return _run(Theorem.COLLINEAR_A_T5, A, mode, tol, body, **meta)


def check_five_circles_chain(
    A, mode: Mode = EXTENDED, tol: Tolerance | None = None, **meta
) -> TheoremReport:
    """Theorem-6 chain on a (numerically) K-concyclic pentagon; float modes only."""
    if mode.exact:
        raise ValueError("the five-circles chain has no exact hypothesis class; use a float mode")

    def body(points, report):
        assertions, witnesses = chain_assertions(_configure(points, report), report.tolerance)
        report.assertions.extend(assertions)
        report.witnesses.update(witnesses)

    return _run(Theorem.FIVE_CIRCLES_CHAIN_T6, A, mode, tol or CHAIN_TOLERANCE, body, **meta)


CHECKERS: dict[Theorem, Callable[..., TheoremReport]] = {
    Theorem.MIQUEL_T1: check_miquel,
    Theorem.TAKADA_T1A: check_takada,
    Theorem.ELEVEN_CIRCLES_T3: check_eleven_circles,
    Theorem.DUAL_T7: check_dual,
    Theorem.COLLINEAR_B_T4: check_collinear_B,
    Theorem.COLLINEAR_A_T5: check_collinear_A,
    Theorem.FIVE_CIRCLES_CHAIN_T6: check_five_circles_chain,
}

DEFAULT_GENERATOR = {
    Theorem.MIQUEL_T1: "random",
    Theorem.TAKADA_T1A: "cyclic",
    Theorem.ELEVEN_CIRCLES_T3: "random",
    Theorem.DUAL_T7: "random",
    Theorem.COLLINEAR_B_T4: "star",
    Theorem.COLLINEAR_A_T5: "cyclic",
    Theorem.FIVE_CIRCLES_CHAIN_T6: "solved",
}

GENERATORS = ("random", "cyclic", "star", "solved")

# theorems 1, 3 and 7 hold for every pentagon, so their controls move derived points
NEGATIVE_CONTROL_TARGET = {
    Theorem.MIQUEL_T1: "C",
    Theorem.TAKADA_T1A: "S",
    Theorem.ELEVEN_CIRCLES_T3: "KL",
    Theorem.DUAL_T7: "C_dual",
    Theorem.COLLINEAR_B_T4: "C",
    Theorem.COLLINEAR_A_T5: "C",
    Theorem.FIVE_CIRCLES_CHAIN_T6: "A",
}


def default_mode(theorem: Theorem) -> Mode:
    return EXTENDED if theorem is Theorem.FIVE_CIRCLES_CHAIN_T6 else EXACT


def _resolve(theorem: Theorem | str) -> Theorem:
    theorem = Theorem(theorem)
    if theorem is Theorem.FIVE_CIRCLES_T2:
        raise ValueError("FIVE_CIRCLES_T2 is verified inside FIVE_CIRCLES_CHAIN_T6")
    return theorem


def run_trial(
    theorem: Theorem | str,
    spec: GeneratorSpec,
    draw: int,
    mode: Mode | None = None,
    tol: Tolerance | None = None,
    generator: str | None = None,
    perturbation=None,
    perturb_target: str | None = None,
) -> TheoremReport:
    """One seeded trial: draw a pentagon, optionally perturb a point, check it.

    A non-None ``perturbation`` is a relative delta applied to point
    ``draw % 5 + 1`` of ``perturb_target`` (default: the set the theorem's
    conclusion is about, see NEGATIVE_CONTROL_TARGET).
    """
    theorem = _resolve(theorem)
    mode = mode or default_mode(theorem)
    generator = generator or DEFAULT_GENERATOR[theorem]
    meta = {"seed": spec.seed, "draw": draw}
    B = None
    try:
        if generator == "random":
            A = generators.random_pentagon(spec, draw)
        elif generator == "cyclic":
            A = generators.cyclic_pentagon(spec, draw)
        elif generator == "star":
            A, B = generators.pentagon_from_star(spec, draw)
        elif generator == "solved":
            A = generators.solved_pentagon(spec, draw)
        else:
            raise ValueError(f"unknown generator {generator!r}")
    except (RejectionBudgetExhausted, NoConvergence, DegenerateDuringSolve) as err:
        report = TheoremReport(theorem, mode, None if mode.exact else tol, **meta)
        report.assertions.append(Assertion("generator", Verdict.DEGENERATE, detail=str(err)))
        return report
    if perturbation is not None:
        target = perturb_target or NEGATIVE_CONTROL_TARGET[theorem]
        meta["perturbation"] = Perturbation(target, control_index(target, draw), perturbation)
        if target == "A":
            B = None
    checker = CHECKERS[theorem]
    if theorem is Theorem.COLLINEAR_B_T4:
        return checker(A, B, mode=mode, tol=tol, **meta)
    return checker(A, mode=mode, tol=tol, **meta)


@dataclass
class SuiteReport:
    theorem: Theorem
    spec: GeneratorSpec
    mode: Mode
    tolerance: Tolerance | None
    generator: str
    perturbation: Any
    perturb_target: str | None
    trials: list[TheoremReport]

    @property
    def counts(self) -> dict[str, int]:
        out = {v.value: 0 for v in Verdict}
        for t in self.trials:
            out[t.verdict.value] += 1
        return out

    @property
    def max_residual(self):
        values = [r for t in self.trials if (r := t.max_residual()) is not None]
        return max(values) if values else None

    @property
    def all_pass(self) -> bool:
        return all(t.verdict is Verdict.PASS for t in self.trials)

    def to_dict(self, include_timing: bool = False) -> dict:
        bits = None if self.mode.exact else self.mode.bits
        max_res = self.max_residual
        return {
            "theorem": self.theorem.value,
            "mode": self.mode.label,
            "precision_bits": bits,
            "tolerance": self.tolerance.to_dict() if self.tolerance else None,
            "generator": self.generator,
            "spec": self.spec.to_dict(),
            "perturbation": None if self.perturbation is None else {
                "delta": format_scalar(self.perturbation), "target": self.perturb_target,
            },
            "counts": self.counts,
            "max_residual": None if max_res is None else float(max_res),
            "seeds": [{"seed": t.seed, "draw": t.draw} for t in self.trials],
            "trials": [t.to_dict(include_timing) for t in self.trials],
        }


def default_workers() -> int:
    env = os.environ.get("PENTAGRAM_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_suite(
    theorem: Theorem | str,
    spec: GeneratorSpec,
    trials: int,
    mode: Mode | None = None,
    tol: Tolerance | None = None,
    generator: str | None = None,
    perturbation=None,
    perturb_target: str | None = None,
    workers: int = 1,
) -> SuiteReport:
    """Run ``trials`` seeded trials (draws 0..trials-1), aggregated in draw order."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    theorem = _resolve(theorem)
    mode = mode or default_mode(theorem)
    if mode.exact and theorem is Theorem.FIVE_CIRCLES_CHAIN_T6:
        raise ValueError("the five-circles chain cannot run in exact mode")
    if not mode.exact and tol is None:
        tol = CHAIN_TOLERANCE if theorem is Theorem.FIVE_CIRCLES_CHAIN_T6 else mode.tolerance()
    generator = generator or DEFAULT_GENERATOR[theorem]
    if generator not in GENERATORS:
        raise ValueError(f"unknown generator {generator!r}")
    if perturbation is not None:
        perturb_target = perturb_target or NEGATIVE_CONTROL_TARGET[theorem]
    job = partial(run_trial, theorem, spec, mode=mode, tol=tol, generator=generator,
                  perturbation=perturbation, perturb_target=perturb_target)
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(job, range(trials), chunksize=max(1, trials // (4 * workers))))
    else:
        reports = [job(d) for d in range(trials)]
    return SuiteReport(
        theorem, spec, mode, None if mode.exact else tol, generator, perturbation, perturb_target, reports
    )
