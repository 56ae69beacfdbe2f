"""``pentagram`` command line: verify, solve, sample, normalize, render."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import generators, harness
from .configio import (
    SCHEMA_VERSION,
    ConfigDocument,
    SchemaError,
    document_to_dict,
    dumps,
    format_point,
    parse_documents,
)
from .constructions import build_configuration, k_star_and_e_points, kl_lines
from .errors import DegenerateDuringSolve, GeometryError, NoConvergence, RejectionBudgetExhausted
from .generators import GeneratorSpec
from .harness import CHECKERS, Theorem, TheoremReport
from .kernel import EXACT, Mode, Tolerance, Verdict, concurrent_lines, concyclic_many
from .svg import LAYERS, build_scene, render_svg

EXIT_OK, EXIT_FAIL, EXIT_DEGENERATE, EXIT_USAGE = 0, 1, 2, 3

THEOREMS = {
    "miquel": Theorem.MIQUEL_T1,
    "takada": Theorem.TAKADA_T1A,
    "eleven": Theorem.ELEVEN_CIRCLES_T3,
    "dual": Theorem.DUAL_T7,
    "collinear-b": Theorem.COLLINEAR_B_T4,
    "collinear-a": Theorem.COLLINEAR_A_T5,
    "five-circles-chain": Theorem.FIVE_CIRCLES_CHAIN_T6,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means DEGENERATE here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as err:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from err


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pentagram", description="Pentagon and pentagram incidence theorems, checked.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a seeded suite or check supplied configurations")
    v.add_argument("--theorem", required=True, choices=sorted(THEOREMS))
    v.add_argument("--mode", choices=("exact", "float"),
                   help="default: exact, or float at 256 bits for five-circles-chain")
    v.add_argument("--bits", type=int, help="float precision (default 53; 256 for the chain)")
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tolerance", type=float, help="relative pass threshold for float modes")
    v.add_argument("--json", metavar="PATH", help="write the full report as JSON")
    v.add_argument("--input", metavar="PATH", help="check the configurations in this document")
    v.add_argument("--generator", choices=harness.GENERATORS)
    v.add_argument("--perturb", type=_rational, metavar="DELTA",
                   help="negative control: relative displacement of one point per trial")
    v.add_argument("--perturb-target", choices=("A", "C", "S", "C_dual", "KL"))
    v.add_argument("--workers", type=_positive, help="worker processes (default PENTAGRAM_WORKERS or cores)")
    v.add_argument("--coord-bound", type=_positive, default=10)
    v.add_argument("--denom-bound", type=_positive, default=64)
    v.add_argument("--allow-nonconvex", action="store_true", help="do not require convex random pentagons")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", help="find pentagons whose centers K_i are concyclic")
    s.add_argument("--count", type=_positive, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iter", type=_positive, default=200)
    s.add_argument("--out", metavar="PATH", help="default: standard output")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("sample", help="write one generated input configuration")
    g.add_argument("--generator", choices=harness.GENERATORS + ("regular",), default="random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--draw", type=int, default=0)
    g.add_argument("--bits", type=int, default=53, help="precision of the regular pentagon")
    g.add_argument("--derive", action="store_true", help="include derived points")
    g.add_argument("--out", metavar="PATH")
    g.set_defaults(func=cmd_sample)

    n = sub.add_parser("normalize", help="re-emit a configuration document in canonical form")
    n.add_argument("--input", required=True, metavar="PATH")
    n.add_argument("--derive", action="store_true", help="fill in the derived-object cache")
    n.add_argument("--out", metavar="PATH")
    n.set_defaults(func=cmd_normalize)

    r = sub.add_parser("render", help="draw a configuration as SVG")
    r.add_argument("--input", required=True, metavar="PATH")
    r.add_argument("--out", metavar="PATH", help="default: standard output")
    r.add_argument("--show", default="", help=f"comma list among {','.join(LAYERS)} (default: A)")
    r.add_argument("--index", type=int, default=0, help="configuration within a collection")
    r.set_defaults(func=cmd_render)
    return parser


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_documents(path: str) -> list[ConfigDocument]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from err
    try:
        return parse_documents(text)
    except SchemaError as err:
        raise UsageError(f"{path}: {err}") from err


def _exit_code(verdicts: Sequence[Verdict]) -> int:
    if all(v is Verdict.PASS for v in verdicts):
        return EXIT_OK
    if Verdict.FAIL in verdicts:
        return EXIT_FAIL
    return EXIT_DEGENERATE


def _mode_from_flags(args, theorem: Theorem) -> Mode | None:
    chain = theorem is Theorem.FIVE_CIRCLES_CHAIN_T6
    if args.mode == "exact":
        if chain:
            raise UsageError("five-circles-chain has no exact hypothesis class; use --mode float")
        if args.bits is not None:
            raise UsageError("--bits only applies to --mode float")
        return EXACT
    if args.mode == "float" or args.bits is not None:
        bits = args.bits if args.bits is not None else (256 if chain else 53)
        if bits < 2:
            raise UsageError("--bits must be at least 2")
        return Mode(exact=False, bits=bits)
    return None


def _tolerance(args, mode: Mode | None) -> Tolerance | None:
    if args.tolerance is None:
        return None
    try:
        return Tolerance(rel_pass=args.tolerance)
    except ValueError as err:
        raise UsageError(f"--tolerance: {err}") from err


def _summary_line(report: TheoremReport, label: str) -> str:
    worst = report.max_residual()
    worst_text = "n/a" if worst is None else f"{float(worst):.3e}"
    failing = [a.name for a in report.assertions if a.verdict is not Verdict.PASS]
    tail = f"  [{'; '.join(failing)}]" if failing else ""
    return f"{label}: {report.verdict.value}  max residual {worst_text}{tail}"


def cmd_verify(args) -> int:
    theorem = THEOREMS[args.theorem]
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    mode = _mode_from_flags(args, theorem)
    tol = _tolerance(args, mode)
    if args.input:
        return _verify_documents(args, theorem, mode, tol)
    try:
        spec = GeneratorSpec(seed=args.seed, coord_bound=args.coord_bound, denom_bound=args.denom_bound,
                             convex_required=not args.allow_nonconvex)
    except ValueError as err:
        raise UsageError(str(err)) from err
    workers = args.workers or harness.default_workers()
    suite = harness.run_suite(
        theorem, spec, args.trials, mode=mode, tol=tol, generator=args.generator,
        perturbation=args.perturb, perturb_target=args.perturb_target, workers=workers,
    )
    counts = suite.counts
    worst = suite.max_residual
    print(f"{suite.theorem.value} {suite.mode.label} generator={suite.generator} "
          f"seed={spec.seed} trials={args.trials}")
    if suite.perturbation is not None:
        print(f"negative control: target {suite.perturb_target}, delta {suite.perturbation}")
    print("  " + "  ".join(f"{k} {n}" for k, n in counts.items()))
    print(f"  max residual {'n/a' if worst is None else f'{float(worst):.3e}'}")
    for t in suite.trials:
        if t.verdict is not Verdict.PASS:
            print("  " + _summary_line(t, f"draw {t.draw}"))
    if args.json:
        _write(dumps(suite.to_dict()), args.json)
    return _exit_code([t.verdict for t in suite.trials])


def _verify_documents(args, theorem: Theorem, mode: Mode | None, tol: Tolerance | None) -> int:
    docs = _read_documents(args.input)
    checker = CHECKERS[theorem]
    reports = []
    for i, doc in enumerate(docs):
        use = mode or doc.mode
        if mode is None and theorem is Theorem.FIVE_CIRCLES_CHAIN_T6:
            # the chain claims are judged at extended precision unless asked otherwise
            use = harness.default_mode(theorem)
        if theorem is Theorem.COLLINEAR_B_T4:
            report = checker(doc.points, doc.derived.get("B"), mode=use, tol=tol, draw=i)
        else:
            report = checker(doc.points, mode=use, tol=tol, draw=i)
        reports.append(report)
        line = _summary_line(report, f"{args.input}[{i}] {report.theorem.value} {use.label}")
        if "X" in report.witnesses:
            bits = None if use.exact else use.bits
            x = report.witnesses["X"]
            line += f"  X = ({', '.join(format_point(x, bits))})"
        print(line)
    if args.json:
        _write(dumps({
            "theorem": theorem.value,
            "input": args.input,
            "reports": [r.to_dict() for r in reports],
        }), args.json)
    return _exit_code([r.verdict for r in reports])


def cmd_solve(args) -> int:
    spec = GeneratorSpec(seed=args.seed)
    configurations, failures = [], []
    for draw in range(args.count):
        try:
            A, report = generators.solve_concyclic_centers(spec, draw=draw, max_iter=args.max_iter)
        except (NoConvergence, DegenerateDuringSolve) as err:
            failures.append({
                "draw": draw,
                "error": type(err).__name__,
                "message": str(err),
                "start": [format_point(p) for p in generators.solver_start(spec, draw)],
                "solve_report": err.report.to_dict(),
            })
            print(f"draw {draw}: {type(err).__name__}: {err}", file=sys.stderr)
            continue
        doc = ConfigDocument(
            mode=Mode(exact=False, bits=53), points=A,
            extra={"seed": spec.seed, "draw": draw, "solve_report": report.to_dict()},
        )
        configurations.append(document_to_dict(doc))
    out = {"schema_version": SCHEMA_VERSION, "configurations": configurations}
    if failures:
        out["failures"] = failures
    _write(dumps(out), args.out)
    print(f"{len(configurations)} of {args.count} converged", file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


def _derived(points, mode: Mode) -> dict:
    """Every derived object that can be built; skipped silently when degenerate."""
    out: dict = {}
    with mode.context():
        cfg = build_configuration(mode.points(points))
        out.update(B=list(cfg.B), C=list(cfg.C), K=list(cfg.K), L=list(cfg.L))
        try:
            D, E = k_star_and_e_points(cfg.K)
            out.update(D=D, E=E)
        except GeometryError:
            pass
        x = concurrent_lines(kl_lines(cfg), anchors=cfg.K + cfg.L)
        if x.holds:
            out["X"] = [x.witness]
        j = concyclic_many(cfg.C)
        if j.holds:
            out["J"] = [j.witness.center]
        for anchor in (cfg.B, cfg.A):
            o = concyclic_many(anchor)
            if o.holds:
                out["O"] = [o.witness.center]
                break
    return out


def _with_derived(doc: ConfigDocument) -> ConfigDocument:
    try:
        derived = _derived(doc.points, doc.mode)
    except GeometryError as err:
        raise UsageError(f"configuration is degenerate: {err}") from err
    return ConfigDocument(doc.mode, doc.points, derived, doc.extra)


def cmd_sample(args) -> int:
    spec = GeneratorSpec(seed=args.seed)
    extra = {"generator": args.generator, "seed": args.seed, "draw": args.draw}
    try:
        if args.generator == "regular":
            mode = Mode(exact=False, bits=args.bits)
            with mode.context():
                A = generators.regular_pentagon(mode)
            extra = {"generator": "regular"}
        elif args.generator == "solved":
            mode = Mode(exact=False, bits=53)
            A = generators.solved_pentagon(spec, args.draw)
        else:
            mode = EXACT
            A = {
                "random": generators.random_pentagon,
                "cyclic": generators.cyclic_pentagon,
                "star": lambda s, d: generators.pentagon_from_star(s, d)[0],
            }[args.generator](spec, args.draw)
    except (RejectionBudgetExhausted, NoConvergence, DegenerateDuringSolve) as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    doc = ConfigDocument(mode, A, {}, extra)
    if args.derive:
        doc = _with_derived(doc)
    _write(dumps(document_to_dict(doc)), args.out)
    return EXIT_OK


def cmd_normalize(args) -> int:
    docs = _read_documents(args.input)
    if args.derive:
        docs = [_with_derived(d) for d in docs]
    if len(docs) == 1:
        out = document_to_dict(docs[0])
    else:
        out = {"schema_version": SCHEMA_VERSION, "configurations": [document_to_dict(d) for d in docs]}
    _write(dumps(out), args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    docs = _read_documents(args.input)
    if not 0 <= args.index < len(docs):
        raise UsageError(f"--index {args.index} out of range (document holds {len(docs)})")
    show = [s.strip() for s in args.show.split(",") if s.strip()]
    unknown = [s for s in show if s not in LAYERS]
    if unknown:
        raise UsageError(f"unknown layers: {', '.join(unknown)}")
    doc = docs[args.index]
    with doc.mode.context():
        scene = build_scene(doc.points, show)
    _write(render_svg(scene), args.out)
    for problem in scene.problems:
        print(f"degenerate: {problem}", file=sys.stderr)
    return EXIT_DEGENERATE if scene.problems else EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"pentagram {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
