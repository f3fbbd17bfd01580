"""Random program generation and differential checking of the engines.

Each generated instance is solved by the exhaustive engine and by the
splitting or stratified engine; canonical world-view sets must agree.  A
disagreement is minimized by greedily deleting rules, then constants, while
the divergence persists, and the minimized program is reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .limits import DEFAULT_LIMITS, ResourceLimitError, SolveLimits
from .semantics import (
    enumerate_world_views,
    is_consistent_world_view,
    world_view_key,
)
from .splitting import (
    PossiblyUnsafeSplit,
    is_guarded,
    is_splitting_set,
    solve_by_splitting,
)
from .stratification import NotStratified, find_stratification, solve_stratified
from .syntax import (
    Atom,
    ObjectiveLiteral,
    Program,
    Rule,
    SubjectiveLiteral,
    canonical_program_text,
    ground,
    literal_key,
    parse_objective_literal,
    parse_program,
)

_PREDICATES = ("p", "q", "r", "s", "t", "u0", "v0", "w0")
_CONSTANTS = ("a", "b", "c", "d", "e")


@dataclass(frozen=True)
class CorpusEntry:
    """A hand-picked instance run ahead of the generated ones."""

    name: str
    program_text: str
    split_set: tuple[str, ...] = ()
    detect_unsafe: bool = True
    engine: str = "split"  # "split" | "stratified"


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    count: int = 100
    max_predicates: int = 4
    max_constants: int = 3
    max_rules: int = 10
    p_disjunction: float = 0.25
    p_not: float = 0.2
    p_k: float = 0.15
    p_m: float = 0.15
    p_classical_neg: float = 0.25
    stratified_only: bool = False
    guarded_only: bool = False
    corpus: tuple[CorpusEntry, ...] = ()

    def validate(self) -> None:
        for name in ("p_disjunction", "p_not", "p_k", "p_m", "p_classical_neg"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be within [0, 1], got {value}")
        if self.p_k + self.p_m + self.p_not > 1.0:
            raise ValueError("p_k + p_m + p_not must not exceed 1")
        if self.max_predicates < 1 or self.max_predicates > len(_PREDICATES):
            raise ValueError("max_predicates out of range")
        if self.max_constants < 0 or self.max_constants > len(_CONSTANTS):
            raise ValueError("max_constants out of range")
        if self.max_rules < 1:
            raise ValueError("max_rules must be positive")


@dataclass(frozen=True)
class InstanceResult:
    index: int
    name: str
    status: str  # "match" | "divergence" | "skipped" | "flagged"
    detail: str = ""
    program_text: str = ""
    minimized_text: str = ""


@dataclass(frozen=True)
class FuzzReport:
    config: FuzzConfig
    results: tuple[InstanceResult, ...]

    @property
    def divergences(self) -> tuple[InstanceResult, ...]:
        return tuple(r for r in self.results if r.status == "divergence")

    @property
    def matches(self) -> int:
        return sum(1 for r in self.results if r.status == "match")

    @property
    def exit_code(self) -> int:
        return 0 if not self.divergences else 1


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def _atom_pool(rng: random.Random, cfg: FuzzConfig) -> list[Atom]:
    n_preds = rng.randint(1, cfg.max_predicates)
    n_consts = rng.randint(1, cfg.max_constants) if cfg.max_constants else 0
    pool: list[Atom] = []
    for pred in _PREDICATES[:n_preds]:
        if n_consts and rng.random() < 0.7:
            for const in _CONSTANTS[:n_consts]:
                pool.append(Atom(pred, (const,)))
        else:
            pool.append(Atom(pred))
    return pool


def _draw_literal(rng: random.Random, cfg: FuzzConfig, pool: Sequence[Atom]) -> ObjectiveLiteral:
    return ObjectiveLiteral(rng.choice(pool), rng.random() < cfg.p_classical_neg)


def generate_program(rng: random.Random, cfg: FuzzConfig) -> Program:
    """A random ground program within the configured size bounds."""
    pool = _atom_pool(rng, cfg)
    rules: list[Rule] = []
    for _ in range(rng.randint(1, cfg.max_rules)):
        head = {_draw_literal(rng, cfg, pool)}
        while rng.random() < cfg.p_disjunction and len(head) < 3:
            head.add(_draw_literal(rng, cfg, pool))
        body_pos: list = []
        body_neg: list = []
        for _ in range(rng.randint(0, 3)):
            base = _draw_literal(rng, cfg, pool)
            roll = rng.random()
            if roll < cfg.p_k:
                body_pos.append(SubjectiveLiteral(base, "K", rng.random() < 0.5))
            elif roll < cfg.p_k + cfg.p_m:
                body_pos.append(SubjectiveLiteral(base, "M", rng.random() < 0.5))
            elif roll < cfg.p_k + cfg.p_m + cfg.p_not:
                body_neg.append(base)
            else:
                body_pos.append(base)
        rules.append(Rule(frozenset(head), tuple(body_pos), tuple(body_neg)))
    return Program(tuple(rules))


def generate_stratified_program(rng: random.Random, cfg: FuzzConfig) -> Program:
    """A random program that is stratified by construction: atoms get layers,
    heads come from one layer, positive bodies from at most that layer, and
    ``not``/modal bodies from strictly lower layers."""
    pool = _atom_pool(rng, cfg)
    depth = rng.randint(1, 3)
    layer_of = {atom: rng.randrange(depth) for atom in pool}
    by_layer = [
        [a for a in pool if layer_of[a] <= d] for d in range(depth)
    ]
    rules: list[Rule] = []
    for _ in range(rng.randint(1, cfg.max_rules)):
        layer = rng.randrange(depth)
        same = [a for a in pool if layer_of[a] == layer]
        if not same:
            continue
        head = {ObjectiveLiteral(rng.choice(same), rng.random() < cfg.p_classical_neg)}
        while rng.random() < cfg.p_disjunction and len(head) < 3:
            head.add(ObjectiveLiteral(rng.choice(same), rng.random() < cfg.p_classical_neg))
        body_pos: list = []
        body_neg: list = []
        for _ in range(rng.randint(0, 3)):
            roll = rng.random()
            lower = by_layer[layer - 1] if layer else []
            if roll < cfg.p_k + cfg.p_m and lower:
                base = ObjectiveLiteral(rng.choice(lower), rng.random() < cfg.p_classical_neg)
                modality = "K" if roll < cfg.p_k else "M"
                body_pos.append(SubjectiveLiteral(base, modality, rng.random() < 0.5))
            elif roll < cfg.p_k + cfg.p_m + cfg.p_not and lower:
                body_neg.append(
                    ObjectiveLiteral(rng.choice(lower), rng.random() < cfg.p_classical_neg)
                )
            else:
                base = ObjectiveLiteral(
                    rng.choice(by_layer[layer]), rng.random() < cfg.p_classical_neg
                )
                body_pos.append(base)
        rules.append(Rule(frozenset(head), tuple(body_pos), tuple(body_neg)))
    if not rules:
        rules.append(Rule(frozenset({ObjectiveLiteral(pool[0])})))
    return Program(tuple(rules))


def candidate_splitting_sets(p: Program) -> tuple[frozenset[ObjectiveLiteral], ...]:
    """Nontrivial splitting sets read off the dependency condensation: every
    prefix of a topological order of the requirement graph is head-closed,
    and complements are merged so the sets stay complement-closed."""
    if not p.rules or not p.is_ground:
        return ()
    universe = sorted(
        {l for lit in p.literals for l in (lit, lit.complement())}, key=literal_key
    )
    group_of: dict[ObjectiveLiteral, ObjectiveLiteral] = {}
    for lit in universe:
        comp = lit.complement()
        rep = min(lit, comp, key=literal_key)
        group_of[lit] = rep
    requires: dict[ObjectiveLiteral, set[ObjectiveLiteral]] = {
        g: set() for g in set(group_of.values())
    }
    for rule in p.rules:
        for h in rule.head:
            for x in rule.lit():
                if group_of[x] != group_of[h]:
                    requires[group_of[h]].add(group_of[x])
    groups = sorted(requires, key=literal_key)
    placed: list[ObjectiveLiteral] = []
    ready = set()
    while len(placed) < len(groups):
        progress = False
        for g in groups:
            if g in ready:
                continue
            if requires[g] <= ready:
                placed.append(g)
                ready.add(g)
                progress = True
        if not progress:
            # requirement cycle: place one unplaced group with its closure
            remaining = [g for g in groups if g not in ready]
            closure = set()
            stack = [remaining[0]]
            while stack:
                g = stack.pop()
                if g in closure or g in ready:
                    continue
                closure.add(g)
                stack.extend(requires[g])
            for g in sorted(closure, key=literal_key):
                placed.append(g)
                ready.add(g)
    members: dict[ObjectiveLiteral, list[ObjectiveLiteral]] = {}
    for lit in universe:
        members.setdefault(group_of[lit], []).append(lit)
    out = []
    acc: set[ObjectiveLiteral] = set()
    for g in placed[:-1]:
        acc |= set(members[g])
        u = frozenset(acc)
        dec_bottom = [r for r in p.rules if r.lit() <= u]
        if not dec_bottom or len(dec_bottom) == len(p.rules):
            continue
        if is_splitting_set(u, p):
            out.append(u)
    return tuple(out)


# ---------------------------------------------------------------------------
# Differential comparison and minimization
# ---------------------------------------------------------------------------


def _consistent_views(p: Program, limits: SolveLimits) -> tuple:
    return enumerate_world_views(p, limits).consistent_views()


def split_divergence(
    p: Program,
    u: frozenset[ObjectiveLiteral],
    limits: SolveLimits,
    detect_unsafe: bool,
) -> str | None:
    """Non-None description when the splitting engine disagrees with the
    exhaustive one on the consistent world views of ``p``."""
    if not is_splitting_set(u, p):
        return None
    naive = set(_consistent_views(p, limits))
    try:
        via_split = set(
            w
            for w in solve_by_splitting(p, u, limits, detect_unsafe=detect_unsafe)
            if is_consistent_world_view(w)
        )
    except PossiblyUnsafeSplit:
        return None
    if via_split == naive:
        return None
    return (
        f"split engine found {len(via_split)} consistent world view(s), "
        f"exhaustive engine found {len(naive)}"
    )


def stratified_divergence(p: Program, limits: SolveLimits) -> str | None:
    if find_stratification(p) is None:
        return None
    naive = set(_consistent_views(p, limits))
    try:
        view = solve_stratified(p, limits)
    except PossiblyUnsafeSplit:
        return None
    produced = {view} if is_consistent_world_view(view) else set()
    if produced == naive:
        return None
    return (
        f"stratified engine found {len(produced)} world view(s), "
        f"exhaustive engine found {len(naive)}"
    )


def minimize_program(p: Program, still_diverges: Callable[[Program], bool]) -> Program:
    """Greedy delete-one-rule then delete-one-constant passes, to a fixpoint."""
    current = p
    changed = True
    while changed:
        changed = False
        for rule in list(current.rules):
            candidate = Program(tuple(r for r in current.rules if r != rule))
            if candidate.rules and still_diverges(candidate):
                current = candidate
                changed = True
        for const in sorted(current.constants):
            kept = tuple(
                r
                for r in current.rules
                if all(const not in l.atom.args for l in r.lit())
            )
            candidate = Program(kept)
            if candidate.rules and still_diverges(candidate):
                current = candidate
                changed = True
    return current


# ---------------------------------------------------------------------------
# The harness
# ---------------------------------------------------------------------------


def _run_corpus_entry(
    index: int, entry: CorpusEntry, limits: SolveLimits
) -> InstanceResult:
    program = ground(parse_program(entry.program_text), limits.max_ground)
    text = canonical_program_text(program)
    if entry.engine == "stratified":
        detail = stratified_divergence(program, limits)
        predicate = lambda q: stratified_divergence(q, limits) is not None
    else:
        u = frozenset(parse_objective_literal(t) for t in entry.split_set)
        detail = split_divergence(program, u, limits, entry.detect_unsafe)
        predicate = (
            lambda q: split_divergence(q, u, limits, entry.detect_unsafe) is not None
        )
    if detail is None:
        return InstanceResult(index, entry.name, "match", program_text=text)
    minimized = minimize_program(program, predicate)
    return InstanceResult(
        index,
        entry.name,
        "divergence",
        detail=detail,
        program_text=text,
        minimized_text=canonical_program_text(minimized),
    )


def run_fuzz(cfg: FuzzConfig, limits: SolveLimits = DEFAULT_LIMITS) -> FuzzReport:
    cfg.validate()
    rng = random.Random(cfg.seed)
    results: list[InstanceResult] = []
    for i, entry in enumerate(cfg.corpus):
        results.append(_run_corpus_entry(i, entry, limits))
    base = len(cfg.corpus)
    for i in range(cfg.count):
        index = base + i
        name = f"gen-{i}"
        try:
            if cfg.stratified_only:
                program = generate_stratified_program(rng, cfg)
                result = _stratified_instance(index, name, program, limits)
            else:
                program = generate_program(rng, cfg)
                result = _split_instance(index, name, program, cfg, limits)
        except ResourceLimitError as exc:
            result = InstanceResult(index, name, "skipped", detail=f"resource guard: {exc}")
        results.append(result)
    return FuzzReport(cfg, tuple(results))


def _stratified_instance(
    index: int, name: str, program: Program, limits: SolveLimits
) -> InstanceResult:
    text = canonical_program_text(program)
    if find_stratification(program) is None:
        return InstanceResult(index, name, "skipped", "not stratified", text)
    try:
        view = solve_stratified(program, limits)
    except PossiblyUnsafeSplit as exc:
        return InstanceResult(index, name, "flagged", str(exc), text)
    naive = _consistent_views(program, limits)
    if (
        len(naive) == 1
        and is_consistent_world_view(view)
        and view == naive[0]
    ):
        return InstanceResult(index, name, "match", program_text=text)
    detail = (
        f"stratified engine produced {world_view_key(view)!r}; exhaustive engine "
        f"found {len(naive)} consistent world view(s)"
    )
    minimized = minimize_program(
        program, lambda q: stratified_divergence(q, limits) is not None
    )
    return InstanceResult(index, name, "divergence", detail, text,
                          canonical_program_text(minimized))


def _split_instance(
    index: int,
    name: str,
    program: Program,
    cfg: FuzzConfig,
    limits: SolveLimits,
) -> InstanceResult:
    text = canonical_program_text(program)
    candidates = candidate_splitting_sets(program)
    if cfg.guarded_only:
        candidates = tuple(
            u for u in candidates if is_guarded(program, u) is True
        )
    if not candidates:
        return InstanceResult(index, name, "skipped", "no usable splitting set", text)
    u = candidates[0]
    guarded = is_guarded(program, u)
    naive = set(_consistent_views(program, limits))
    try:
        via_split = set(
            w
            for w in solve_by_splitting(program, u, limits, detect_unsafe=True)
            if is_consistent_world_view(w)
        )
    except PossiblyUnsafeSplit as exc:
        if guarded is True:
            # the detector must stay silent on guarded instances
            return InstanceResult(
                index, name, "divergence",
                f"unsafety detector fired on a guarded split: {exc}", text,
            )
        return InstanceResult(index, name, "flagged", str(exc), text)
    if via_split == naive:
        return InstanceResult(index, name, "match", program_text=text)
    detail = (
        f"split engine found {len(via_split)} consistent world view(s), "
        f"exhaustive engine found {len(naive)}"
    )
    minimized = minimize_program(
        program,
        lambda q: split_divergence(q, u, limits, detect_unsafe=True) is not None,
    )
    return InstanceResult(index, name, "divergence", detail, text,
                          canonical_program_text(minimized))
