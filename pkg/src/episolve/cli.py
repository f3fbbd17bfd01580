"""Command-line driver: parse, ground, solve, query, and fuzz.

Exit codes: 0 at least one consistent world view; 1 parse or validation
error; 2 resource guard exceeded; 3 no consistent world view; 4 the supplied
splitting set does not split the program.  Fuzz runs exit 0 only when no
divergence was found.

Reports are byte-for-byte reproducible for a fixed input and seed; stage
timings therefore go to stderr, never into the report.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .limits import ResourceLimitError, SolveLimits
from .semantics import (
    LIT_ALL,
    belief_set_key,
    contains,
    enumerate_world_views,
    is_consistent_world_view,
    literal_key,
    satisfies_subjective,
    sort_world_views,
)
from .splitting import NotASplittingSet, PossiblyUnsafeSplit, solve_by_splitting
from .stratification import NotStratified, find_stratification, solve_stratified
from .syntax import (
    ObjectiveLiteral,
    Program,
    SourceError,
    SubjectiveLiteral,
    ground,
    parse_literal,
    parse_objective_literal,
    parse_program,
)
from .fuzz import CorpusEntry, FuzzConfig, run_fuzz

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_RESOURCE = 2
EXIT_NO_WORLD_VIEW = 3
EXIT_NOT_A_SPLITTING_SET = 4


@dataclass(frozen=True)
class SolveReport:
    mode: str
    engine: str
    world_views: tuple
    consistent: tuple[bool, ...]
    outcome: str  # "world_views" | "none"
    empty_fixpoint: bool
    fallbacks: tuple[str, ...]
    strata_sizes: tuple[int, ...] | None
    timings: tuple[tuple[str, float], ...]


def _format_belief_set(b) -> str:
    if b is LIT_ALL:
        return "Lit"
    return "{" + ", ".join(str(l) for l in sorted(b, key=literal_key)) + "}"


def _belief_set_json(b):
    if b is LIT_ALL:
        return "Lit"
    return [str(l) for l in sorted(b, key=literal_key)]


def _sorted_view(view) -> tuple:
    return tuple(sorted(view, key=belief_set_key))


def report_text(report: SolveReport) -> str:
    lines = [f"mode: {report.mode}", f"engine: {report.engine}"]
    if report.strata_sizes is not None:
        lines.append("strata sizes: " + " ".join(map(str, report.strata_sizes)))
    for event in report.fallbacks:
        lines.append(f"fallback: {event}")
    if report.outcome == "none":
        lines.append("no world view")
        if report.empty_fixpoint:
            lines.append("note: the empty collection satisfies the fixpoint equation")
    for i, view in enumerate(report.world_views, start=1):
        tag = "consistent" if report.consistent[i - 1] else "inconsistent"
        lines.append(f"world view {i} ({tag}):")
        for b in _sorted_view(view):
            lines.append(f"  {_format_belief_set(b)}")
    return "\n".join(lines) + "\n"


def report_json(report: SolveReport) -> str:
    doc = {
        "mode": report.mode,
        "engine": report.engine,
        "world_views": [
            [_belief_set_json(b) for b in _sorted_view(view)]
            for view in report.world_views
        ],
        "consistent": list(report.consistent),
        "outcome": report.outcome,
        "empty_fixpoint": report.empty_fixpoint,
        "fallbacks": list(report.fallbacks),
        "strata": list(report.strata_sizes) if report.strata_sizes is not None else None,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _read_split_set(path: str) -> frozenset[ObjectiveLiteral]:
    out = set()
    for raw in Path(path).read_text().splitlines():
        line = raw.split("%", 1)[0].strip()
        if line:
            out.add(parse_objective_literal(line))
    return frozenset(out)


def run_solve(
    program: Program,
    mode: str,
    split_set: frozenset[ObjectiveLiteral] | None,
    limits: SolveLimits,
    show_strata: bool = False,
) -> SolveReport:
    timings: list[tuple[str, float]] = []
    fallbacks: list[str] = []
    engine = mode
    views: tuple = ()
    empty_fixpoint = False
    strata_sizes: tuple[int, ...] | None = None

    def timed(stage, fn):
        start = time.perf_counter()
        result = fn()
        timings.append((stage, time.perf_counter() - start))
        return result

    def naive() -> tuple:
        nonlocal empty_fixpoint
        enum = timed("exhaustive", lambda: enumerate_world_views(program, limits))
        empty_fixpoint = enum.empty_fixpoint
        return enum.views

    if mode == "naive":
        views = naive()
    elif mode in ("stratified", "auto"):
        try:
            view = timed("stratified", lambda: solve_stratified(program, limits))
            views = (view,)
            engine = "stratified"
        except NotStratified:
            fallbacks.append("not stratified; using the exhaustive engine")
            engine = "naive"
            views = naive()
        except PossiblyUnsafeSplit as exc:
            fallbacks.append(f"possibly unsafe split ({exc}); using the exhaustive engine")
            engine = "naive"
            views = naive()
    elif mode == "split":
        assert split_set is not None
        try:
            result = timed(
                "split", lambda: solve_by_splitting(program, split_set, limits)
            )
            views = sort_world_views(result)
            engine = "split"
        except PossiblyUnsafeSplit as exc:
            fallbacks.append(f"possibly unsafe split ({exc}); using the exhaustive engine")
            engine = "naive"
            views = naive()
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown mode {mode!r}")

    if show_strata or engine == "stratified":
        strat = find_stratification(program)
        if strat is not None:
            strata_sizes = tuple(len(s) for s in strat.strata)

    consistent = tuple(is_consistent_world_view(w) for w in views)
    return SolveReport(
        mode=mode,
        engine=engine,
        world_views=sort_world_views(views),
        consistent=consistent,
        outcome="world_views" if views else "none",
        empty_fixpoint=empty_fixpoint,
        fallbacks=tuple(fallbacks),
        strata_sizes=strata_sizes,
        timings=tuple(timings),
    )


def query_lines(program: Program, report: SolveReport, literal_text: str) -> list[str]:
    lit = parse_literal(literal_text)
    universe = program.literals
    base = lit.base if isinstance(lit, SubjectiveLiteral) else lit
    lines = [f"query: {lit}"]
    if base not in universe:
        lines.append(f"warning: {base} does not occur in the program")
    per_view: list[bool] = []
    for view in report.world_views:
        if isinstance(lit, SubjectiveLiteral):
            if base in universe:
                value = satisfies_subjective(view, lit)
            else:
                inner = any(contains(b, base) and b is not LIT_ALL for b in view)
                value = (inner if lit.modality == "M" else False) != lit.negated
        else:
            value = all(
                (contains(b, lit) if b is not LIT_ALL else lit in universe)
                for b in view
            )
        per_view.append(value)
    for i, value in enumerate(per_view, start=1):
        lines.append(f"world view {i}: {'true' if value else 'false'}")
    if not per_view:
        lines.append("note: no world views; the query holds vacuously")
    lines.append(f"answer: {'true' if all(per_view) else 'false'}")
    return lines


def _load_fuzz_config(path: str, seed_override: int | None) -> FuzzConfig:
    doc = json.loads(Path(path).read_text())
    corpus = tuple(
        CorpusEntry(
            name=e.get("name", f"corpus-{i}"),
            program_text=e["program"],
            split_set=tuple(e.get("split_set", ())),
            detect_unsafe=e.get("detect_unsafe", True),
            engine=e.get("engine", "split"),
        )
        for i, e in enumerate(doc.pop("corpus", ()))
    )
    cfg = FuzzConfig(corpus=corpus, **doc)
    if seed_override is not None:
        cfg = FuzzConfig(**{**cfg.__dict__, "seed": seed_override})
    return cfg


def _fuzz_text(report) -> str:
    lines = [
        f"seed: {report.config.seed}",
        f"instances: {len(report.results)}",
        f"matches: {report.matches}",
        f"divergences: {len(report.divergences)}",
    ]
    for r in report.results:
        if r.status != "match":
            lines.append(f"[{r.index}] {r.name}: {r.status} {r.detail}".rstrip())
            if r.minimized_text:
                lines.append("  minimized:")
                for line in r.minimized_text.splitlines():
                    lines.append(f"    {line}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="episolve",
        description="Compute belief sets and world views of epistemic logic programs.",
    )
    parser.add_argument("file", nargs="?", help="program file")
    parser.add_argument(
        "--mode",
        choices=("auto", "naive", "split", "stratified"),
        default="auto",
    )
    parser.add_argument("--split-set", metavar="FILE",
                        help="splitting set, one objective literal per line")
    parser.add_argument("--query", metavar="LITERAL",
                        help="report the truth of an objective or modal literal")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--show-strata", action="store_true")
    parser.add_argument("--max-ground", type=int, default=5000)
    parser.add_argument("--max-modal", type=int, default=20)
    parser.add_argument("--max-lits", type=int, default=22)
    parser.add_argument("--fuzz", metavar="CONFIG",
                        help="run the differential harness from a JSON config")
    parser.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    limits = SolveLimits(
        max_ground=args.max_ground,
        max_modal=args.max_modal,
        max_lits=args.max_lits,
    )

    if args.fuzz:
        try:
            cfg = _load_fuzz_config(args.fuzz, args.seed)
            report = run_fuzz(cfg, limits)
        except (ValueError, ResourceLimitError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
        if args.format == "json":
            doc = {
                "seed": report.config.seed,
                "instances": len(report.results),
                "matches": report.matches,
                "divergences": [
                    {
                        "index": r.index,
                        "name": r.name,
                        "detail": r.detail,
                        "program": r.program_text,
                        "minimized": r.minimized_text,
                    }
                    for r in report.divergences
                ],
            }
            print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            print(_fuzz_text(report), end="")
        return report.exit_code

    if not args.file:
        print("error: a program file is required unless --fuzz is given", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.mode == "split" and not args.split_set:
        print("error: --mode split requires --split-set", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        program = ground(parse_program(text), limits.max_ground)
        split_set = _read_split_set(args.split_set) if args.split_set else None
        report = run_solve(program, args.mode, split_set, limits, args.show_strata)
    except SourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NotASplittingSet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_A_SPLITTING_SET

    for stage, seconds in report.timings:
        print(f"timing: {stage}: {seconds:.6f}s", file=sys.stderr)

    if args.query:
        try:
            lines = query_lines(program, report, args.query)
        except SourceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        if args.format == "json":
            print(json.dumps({"query": lines}, indent=2, sort_keys=True))
        else:
            print("\n".join(lines))
    elif args.format == "json":
        print(report_json(report), end="")
    else:
        print(report_text(report), end="")

    if any(report.consistent):
        return EXIT_OK
    return EXIT_NO_WORLD_VIEW


if __name__ == "__main__":
    sys.exit(main())
