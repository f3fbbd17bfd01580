"""Splitting sets: decomposition, reducts, multi-views, and combined solving.

A splitting set cuts a program into a bottom whose rules mention only
splitting-set literals and a top whose rule heads avoid them.  The combined
solver evaluates the bottom first, specializes the top against each bottom
belief set (restricted reduct for modal literals over the set, partial
evaluation for objective ones), joins the specialized tops through a common
multi-view, and unions compatible belief sets back together.

The combination is only sound when every bottom belief set extends
consistently through the top.  The exact precondition is intractable, so two
substitutes are provided: a bounded search for the checkable "guarded"
sufficient condition, and a runtime detector that aborts the combination when
some specialized top admits only the inconsistent belief set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .limits import DEFAULT_LIMITS, ResourceLimitError, SolveLimits
from .semantics import (
    INCONSISTENT_VIEW,
    LIT_ALL,
    ModalGuess,
    belief_set_key,
    belief_sets,
    enumerate_world_views,
    is_consistent_literal_set,
    is_consistent_world_view,
    modal_domain,
    objective_true,
    reduce_by_guess,
    satisfies_subjective,
    sort_world_views,
    world_view_key,
)
from .syntax import (
    ObjectiveLiteral,
    Program,
    Rule,
    SubjectiveLiteral,
    literal_key,
)


class NotASplittingSet(Exception):
    pass


class SubjectiveOverlap(Exception):
    """Partial evaluation applied where its literals occur under a modality."""


class PossiblyUnsafeSplit(Exception):
    """A bottom belief set has no consistent extension through the top."""

    def __init__(self, message: str, belief_set=None):
        super().__init__(message)
        self.belief_set = belief_set


class _UnknownType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "unknown"


UNKNOWN = _UnknownType()


@dataclass(frozen=True)
class SplitDecomposition:
    u: frozenset[ObjectiveLiteral]
    bottom: Program
    top: Program


@dataclass(frozen=True)
class MultiView:
    """A joint fixpoint collection of several programs.

    ``restricted_views[i]`` is the set of belief sets the i-th program's
    modal reduct has with respect to the joint collection.
    """

    collection: frozenset
    restricted_views: tuple

    @property
    def consistent(self) -> bool:
        return self.collection != INCONSISTENT_VIEW


@dataclass(frozen=True)
class GuardSearchLimits:
    max_collection_size: int = 3
    max_universe: int = 12
    max_collections: int = 100_000


DEFAULT_GUARD_LIMITS = GuardSearchLimits()


def is_splitting_set(u: Iterable[ObjectiveLiteral], p: Program) -> bool:
    """Heads inside ``u`` pull their whole rule in; with modalities present,
    ``u`` must be complement-closed over the program's literals."""
    u = frozenset(u)
    for rule in p.rules:
        if rule.head & u and not rule.lit() <= u:
            return False
    if p.has_modal:
        for lit in p.literals & u:
            if lit.complement() not in u:
                return False
    return True


def split(p: Program, u: Iterable[ObjectiveLiteral]) -> SplitDecomposition:
    u = frozenset(u)
    if not is_splitting_set(u, p):
        raise NotASplittingSet(f"{{{', '.join(sorted(map(str, u)))}}} does not split the program")
    bottom = tuple(r for r in p.rules if r.lit() <= u)
    top = tuple(r for r in p.rules if not r.lit() <= u)
    return SplitDecomposition(u, Program(bottom), Program(top))


def restricted_reduct(p: Program, u: Iterable[ObjectiveLiteral], w: Iterable) -> Program:
    """Resolve only the modal literals whose base lies in ``u`` against ``w``:
    rules with a false one are dropped, true ones are stripped, modal literals
    over other bases survive untouched."""
    u = frozenset(u)
    w = tuple(w)
    out = []
    for rule in p.rules:
        keep = True
        new_pos = []
        for elem in rule.body_pos:
            if isinstance(elem, SubjectiveLiteral) and elem.base in u:
                if not satisfies_subjective(w, elem):
                    keep = False
                    break
                continue
            new_pos.append(elem)
        if keep:
            out.append(Rule(rule.head, tuple(new_pos), rule.body_neg))
    return Program(tuple(out))


def partial_eval(
    p: Program,
    u: Iterable[ObjectiveLiteral],
    x: Iterable[ObjectiveLiteral],
) -> Program:
    """Specialize ``p`` against one belief set ``x`` of the bottom: keep a rule
    iff its positive body over ``u`` is inside ``x`` and its ``not``-body over
    ``u`` avoids ``x``, then erase all body occurrences of ``u`` literals."""
    u = frozenset(u)
    x = frozenset(x)
    bases = {s.base for rule in p.rules for s in rule.subjective()}
    overlap = bases & (u | x)
    if overlap:
        raise SubjectiveOverlap(
            f"literals occur subjectively: {', '.join(sorted(map(str, overlap)))}"
        )
    out = []
    for rule in p.rules:
        if not {e for e in rule.objective_body() if e in u} <= x:
            continue
        if any(l in u and l in x for l in rule.body_neg):
            continue
        new_pos = tuple(
            e
            for e in rule.body_pos
            if isinstance(e, SubjectiveLiteral) or e not in u
        )
        new_neg = tuple(l for l in rule.body_neg if l not in u)
        out.append(Rule(rule.head, new_pos, new_neg))
    return Program(tuple(out))


def restrict(collection: Iterable, u: Iterable[ObjectiveLiteral]) -> frozenset:
    """Intersect every set in the collection with ``u`` (duplicates collapse)."""
    u = frozenset(u)
    return frozenset(u if a is LIT_ALL else a & u for a in collection)


def multi_views(
    programs: Sequence[Program], limits: SolveLimits = DEFAULT_LIMITS
) -> frozenset[MultiView]:
    """Joint fixpoints of several programs under one shared collection.

    Guesses range over the modal atoms of all programs together; a candidate
    is the union of the per-program belief sets minus the all-literal set
    when some program's answer is consistent, the inconsistent collection
    otherwise, and it is kept iff it reproduces the guess.
    """
    programs = tuple(programs)
    if not programs:
        raise ValueError("multi_views needs at least one program")
    domain = modal_domain(programs)
    if len(domain) > limits.max_modal:
        raise ResourceLimitError(
            f"programs have {len(domain)} modal atoms, limit is {limits.max_modal}"
        )
    out = set()
    for bits in range(1 << len(domain)):
        guess = ModalGuess.from_bits(domain, bits)
        answers = tuple(
            belief_sets(reduce_by_guess(prog, guess), limits) for prog in programs
        )
        if any(is_consistent_world_view(b) for b in answers):
            collection = frozenset().union(*answers) - {LIT_ALL}
        else:
            collection = INCONSISTENT_VIEW
        if ModalGuess.observed(domain, collection) == guess:
            out.add(MultiView(frozenset(collection), answers))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Guarded check
# ---------------------------------------------------------------------------


def _body_true(w: tuple, rule: Rule) -> bool:
    return (
        all(objective_true(w, e) for e in rule.objective_body())
        and all(satisfies_subjective(w, s) for s in rule.subjective())
        and all(not objective_true(w, l) for l in rule.body_neg)
    )


def _satisfies_rule(w: tuple, rule: Rule) -> bool:
    if not _body_true(w, rule):
        return True
    return any(objective_true(w, h) for h in rule.head)


def _contrary_head_pairs(rules: Sequence[Rule]) -> list[tuple[Rule, Rule]]:
    pairs = []
    for i, r1 in enumerate(rules):
        for r2 in rules[i:]:
            if any(h.complement() in r2.head for h in r1.head):
                pairs.append((r1, r2))
    return pairs


def find_guard_counterexample(
    p: Program,
    u: Iterable[ObjectiveLiteral],
    search: GuardSearchLimits = DEFAULT_GUARD_LIMITS,
) -> tuple | None:
    """Bounded search for a collection that satisfies the bottom and the
    bodies of two contrary-headed top rules.  Returns the first witness in
    canonical order, or None if the bounded space holds none."""
    dec = split(p, u)
    pairs = _contrary_head_pairs(dec.top.rules)
    if not pairs:
        return None
    lits = sorted(p.literals, key=literal_key)
    if len(lits) > search.max_universe:
        return None
    subsets = [
        frozenset(l for i, l in enumerate(lits) if mask >> i & 1)
        for mask in range(1 << len(lits))
    ]
    checked = 0
    for size in range(1, search.max_collection_size + 1):
        for combo in itertools.combinations(range(len(subsets)), size):
            checked += 1
            if checked > search.max_collections:
                return None
            w = tuple(subsets[i] for i in combo)
            if not all(_satisfies_rule(w, r) for r in dec.bottom.rules):
                continue
            for r1, r2 in pairs:
                if _body_true(w, r1) and _body_true(w, r2):
                    return w
    return None


def is_guarded(
    p: Program,
    u: Iterable[ObjectiveLiteral],
    search: GuardSearchLimits = DEFAULT_GUARD_LIMITS,
):
    """True when no pair of contrary-headed top rules can fire together under
    any collection satisfying the bottom; modal-free programs are always
    guarded.  Returns UNKNOWN when only the bounded witness search could
    decide and it exhausted its budget."""
    if not p.has_modal:
        return True
    dec = split(p, u)
    if not _contrary_head_pairs(dec.top.rules):
        return True
    if find_guard_counterexample(p, u, search) is not None:
        return False
    return UNKNOWN


# ---------------------------------------------------------------------------
# Combined solving
# ---------------------------------------------------------------------------


def solve_by_splitting(
    p: Program,
    u: Iterable[ObjectiveLiteral],
    limits: SolveLimits = DEFAULT_LIMITS,
    detect_unsafe: bool = True,
) -> frozenset:
    """Consistent world views assembled from bottom world views and top
    multi-views.  With ``detect_unsafe`` the combination aborts with
    PossiblyUnsafeSplit as soon as some bottom belief set's specialized top
    has only the inconsistent belief set; without it the combination runs to
    the end and may return collections that are not world views when the
    split is unsafe."""
    u = frozenset(u)
    dec = split(p, u)
    result = set()
    for x in enumerate_world_views(dec.bottom, limits).views:
        if not is_consistent_world_view(x):
            continue
        top = restricted_reduct(dec.top, u, x)
        xs = sorted(x, key=belief_set_key)
        parts = [partial_eval(top, u, xj) for xj in xs]
        for mv in multi_views(parts, limits):
            if not mv.consistent:
                continue
            if detect_unsafe:
                for xj, ext in zip(xs, mv.restricted_views):
                    if ext == INCONSISTENT_VIEW:
                        raise PossiblyUnsafeSplit(
                            "belief set {%s} of the bottom has no consistent "
                            "extension through the top"
                            % ", ".join(sorted(map(str, xj))),
                            belief_set=xj,
                        )
            combined = set()
            for xj, ext in zip(xs, mv.restricted_views):
                for yk in ext:
                    if yk is LIT_ALL:
                        continue
                    merged = xj | yk
                    if is_consistent_literal_set(merged):
                        combined.add(merged)
            if combined:
                result.add(frozenset(combined))
    return frozenset(result)
