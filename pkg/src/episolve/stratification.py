"""Layering of programs by dependency, and stratum-by-stratum solving.

A stratification partitions the complement-closed literal universe into
layers such that a literal and its complement share a layer, co-head
literals share a layer, positive objective body dependencies never point
upward, and ``not``/modal dependencies point strictly downward.  Each
cumulative union of layers is then a splitting set, so a stratified program
can be solved one layer at a time: the restricted reduct resolves every
modal literal of a layer against the view computed below it, leaving a
modal-free top whose multi-view is just the union of the partial
evaluations' belief sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .limits import DEFAULT_LIMITS, SolveLimits
from .semantics import (
    INCONSISTENT_VIEW,
    LIT_ALL,
    belief_set_key,
    belief_sets,
    is_consistent_literal_set,
)
from .splitting import (
    PossiblyUnsafeSplit,
    is_splitting_set,
    multi_views,
    partial_eval,
    restricted_reduct,
)
from .syntax import ObjectiveLiteral, Program, Rule, literal_key


class NotStratified(Exception):
    pass


class ChainInvalid(Exception):
    """A derived cumulative layer failed the splitting-set check (a bug)."""


@dataclass(frozen=True)
class Stratification:
    strata: tuple[frozenset[ObjectiveLiteral], ...]
    rule_strata: tuple[tuple[Rule, ...], ...]
    splitting_chain: tuple[frozenset[ObjectiveLiteral], ...]


def _union_find(items):
    parent = {x: x for x in items}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    return find, union


def _sccs(nodes: Sequence, edges: dict) -> list[list]:
    """Tarjan with an explicit stack; components come out in reverse
    topological order of the condensation."""
    index: dict = {}
    lowlink: dict = {}
    on_stack: set = set()
    stack: list = []
    counter = [0]
    out: list[list] = []
    for start in nodes:
        if start in index:
            continue
        work = [(start, 0)]
        while work:
            node, ei = work.pop()
            if ei == 0:
                index[node] = lowlink[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                on_stack.add(node)
            succs = edges.get(node, ())
            advanced = False
            for k in range(ei, len(succs)):
                succ = succs[k]
                if succ not in index:
                    work.append((node, k + 1))
                    work.append((succ, 0))
                    advanced = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index[succ])
            if advanced:
                continue
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                out.append(comp)
    return out


def is_valid_stratification(
    p: Program, strata: Sequence[Iterable[ObjectiveLiteral]]
) -> bool:
    """Machine check of the layering conditions against the program."""
    level: dict[ObjectiveLiteral, int] = {}
    for i, stratum in enumerate(strata):
        for lit in stratum:
            if lit in level:
                return False  # not a partition
            level[lit] = i
    universe = {l for lit in p.literals for l in (lit, lit.complement())}
    if set(level) != universe:
        return False
    for lit in universe:
        if level[lit] != level[lit.complement()]:
            return False
    for rule in p.rules:
        heads = sorted(level[h] for h in rule.head)
        if heads[0] != heads[-1]:
            return False
        i = heads[0]
        if any(level[e] > i for e in rule.objective_body()):
            return False
        if any(level[s.base] >= i for s in rule.subjective()):
            return False
        if any(level[l] >= i for l in rule.body_neg):
            return False
    return True


def splitting_chain(
    strata: Sequence[Iterable[ObjectiveLiteral]], p: Program
) -> tuple[frozenset[ObjectiveLiteral], ...]:
    """Cumulative unions of the layers, each verified to split the program."""
    chain: list[frozenset[ObjectiveLiteral]] = []
    acc: frozenset[ObjectiveLiteral] = frozenset()
    for i, stratum in enumerate(strata):
        acc = acc | frozenset(stratum)
        if not is_splitting_set(acc, p):
            raise ChainInvalid(f"cumulative layer {i} is not a splitting set")
        chain.append(acc)
    return tuple(chain)


def find_stratification(p: Program) -> Stratification | None:
    """Greedy-earliest layering of the dependency condensation, or None when
    some dependency cycle contains a strict (``not``/modal) edge."""
    if not p.is_ground:
        raise ValueError("stratification is defined for ground programs only")
    universe = sorted(
        {l for lit in p.literals for l in (lit, lit.complement())}, key=literal_key
    )
    find, union = _union_find(universe)
    for lit in universe:
        union(lit, lit.complement())
    for rule in p.rules:
        heads = sorted(rule.head, key=literal_key)
        for other in heads[1:]:
            union(heads[0], other)
    weak: set[tuple] = set()
    strict: set[tuple] = set()
    for rule in p.rules:
        head = find(next(iter(rule.head)))
        for e in rule.objective_body():
            weak.add((find(e), head))
        for s in rule.subjective():
            strict.add((find(s.base), head))
        for l in rule.body_neg:
            strict.add((find(l), head))
    groups = sorted({find(l) for l in universe}, key=literal_key)
    adjacency = {g: [] for g in groups}
    for a, b in sorted(weak | strict, key=lambda e: (literal_key(e[0]), literal_key(e[1]))):
        if a != b or (a, b) in strict:
            adjacency[a].append(b)
    components = _sccs(groups, adjacency)
    comp_of = {g: ci for ci, comp in enumerate(components) for g in comp}
    for a, b in strict:
        if comp_of[a] == comp_of[b]:
            return None
    # reverse topological emission order: process successors-first backwards
    level = [0] * len(components)
    for ci in range(len(components) - 1, -1, -1):
        best = 0
        for a, b in weak:
            if comp_of[b] == ci and comp_of[a] != ci:
                best = max(best, level[comp_of[a]])
        for a, b in strict:
            if comp_of[b] == ci:
                best = max(best, level[comp_of[a]] + 1)
        level[ci] = best
    members: dict[ObjectiveLiteral, int] = {}
    for lit in universe:
        members[lit] = level[comp_of[find(lit)]]
    depth = max(level) + 1 if level else 1
    strata = tuple(
        frozenset(l for l, lv in members.items() if lv == i) for i in range(depth)
    )
    rule_strata: list[list[Rule]] = [[] for _ in range(depth)]
    for rule in p.rules:
        rule_strata[members[next(iter(rule.head))]].append(rule)
    result = Stratification(
        strata=strata,
        rule_strata=tuple(tuple(rs) for rs in rule_strata),
        splitting_chain=splitting_chain(strata, p),
    )
    if not is_valid_stratification(p, result.strata):
        raise ChainInvalid("derived layering failed validation")
    return result


def solve_stratified(
    p: Program, limits: SolveLimits = DEFAULT_LIMITS
) -> frozenset:
    """The world view of a stratified program, built one layer at a time.

    Raises NotStratified when no layering exists and PossiblyUnsafeSplit when
    a layer's belief sets collapse to the inconsistent one, which voids the
    premise under which the stagewise construction is sound and unique.
    """
    strat = find_stratification(p)
    if strat is None:
        raise NotStratified("the program has no stratification")
    view = belief_sets(Program(strat.rule_strata[0]), limits)
    if view == INCONSISTENT_VIEW:
        raise PossiblyUnsafeSplit(
            "the bottom layer has only the inconsistent belief set",
            belief_set=LIT_ALL,
        )
    for i in range(1, len(strat.strata)):
        u = strat.splitting_chain[i - 1]
        top = restricted_reduct(Program(strat.rule_strata[i]), u, view)
        if top.has_modal:
            raise ChainInvalid(f"layer {i} kept a modal literal after its reduct")
        xs = sorted(view, key=belief_set_key)
        parts = [partial_eval(top, u, xj) for xj in xs]
        mvs = multi_views(parts, limits)
        if len(mvs) != 1:
            raise ChainInvalid(f"layer {i} produced {len(mvs)} joint views")
        mv = next(iter(mvs))
        combined = set()
        for xj, ext in zip(xs, mv.restricted_views):
            if ext == INCONSISTENT_VIEW:
                raise PossiblyUnsafeSplit(
                    "belief set {%s} has no consistent extension at layer %d"
                    % (", ".join(sorted(map(str, xj))), i),
                    belief_set=xj,
                )
            for yk in ext:
                merged = xj | yk
                if is_consistent_literal_set(merged):
                    combined.add(merged)
        if not combined:
            raise PossiblyUnsafeSplit(f"no consistent combination at layer {i}")
        view = frozenset(combined)
    return view
