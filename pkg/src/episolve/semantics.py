"""Belief sets and world views, computed by exhaustive enumeration.

This module is the reference engine: belief sets of positive programs are
found by enumerating consistent subsets of the literal universe, belief sets
of disjunctive programs with ``not`` by guess-and-check over the same
candidates, and world views by enumerating truth assignments to the modal
atoms of the program and keeping the assignments whose induced belief-set
collection satisfies the fixpoint equation.  Guessing modal-atom truth values
is sound and complete because the modal reduct depends on a collection only
through the truth of the program's modal literals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .limits import DEFAULT_LIMITS, ResourceLimitError, SolveLimits
from .syntax import (
    ObjectiveLiteral,
    Program,
    Rule,
    SubjectiveLiteral,
    literal_key,
)


class _LitAllType:
    """The distinguished inconsistent belief set holding every literal."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Lit"


LIT_ALL = _LitAllType()

BeliefSet = frozenset[ObjectiveLiteral] | _LitAllType
WorldView = frozenset  # frozenset of belief sets

INCONSISTENT_VIEW: frozenset = frozenset({LIT_ALL})


def is_consistent_belief_set(b) -> bool:
    return b is not LIT_ALL


def is_consistent_world_view(w: Iterable) -> bool:
    """A collection is consistent iff it does not contain the all-literal set."""
    return LIT_ALL not in w


def contains(belief_set, lit: ObjectiveLiteral) -> bool:
    """Membership with the all-literal set standing for the whole universe."""
    if belief_set is LIT_ALL:
        return True
    return lit in belief_set


def objective_true(w: Iterable, lit: ObjectiveLiteral) -> bool:
    """An objective literal is true w.r.t. a collection iff it is in every set."""
    return all(contains(a, lit) for a in w)


def satisfies_subjective(w: Iterable, s: SubjectiveLiteral) -> bool:
    """Truth of a modal literal with respect to a collection of literal sets."""
    w = tuple(w)
    if s.modality == "K":
        value = all(contains(a, s.base) for a in w)
    else:
        value = any(contains(a, s.base) for a in w)
    return value != s.negated


def belief_set_key(b) -> tuple:
    if b is LIT_ALL:
        return (1, ())
    return (0, tuple(sorted(literal_key(l) for l in b)))


def world_view_key(w: Iterable) -> tuple:
    return tuple(sorted(belief_set_key(b) for b in w))


def sort_world_views(views: Iterable) -> tuple:
    return tuple(sorted(views, key=world_view_key))


def format_belief_set(b) -> str:
    if b is LIT_ALL:
        return "Lit"
    return "{" + ", ".join(str(l) for l in sorted(b, key=literal_key)) + "}"


def format_world_view(w: Iterable) -> str:
    return "{" + ", ".join(format_belief_set(b) for b in sorted(w, key=belief_set_key)) + "}"


def format_world_views(views: Iterable) -> str:
    return "{" + ", ".join(format_world_view(w) for w in sort_world_views(views)) + "}"


def is_consistent_literal_set(lits: Iterable[ObjectiveLiteral]) -> bool:
    lits = frozenset(lits)
    return not any(l.complement() in lits for l in lits)


# ---------------------------------------------------------------------------
# Modal guesses
# ---------------------------------------------------------------------------

ModalAtom = tuple[str, ObjectiveLiteral]


def modal_domain(programs: Program | Sequence[Program]) -> tuple:
    """The (modality, literal) pairs occurring in one or more programs, sorted."""
    if isinstance(programs, Program):
        programs = (programs,)
    atoms = {
        (s.modality, s.base) for p in programs for s in p.subjective_literals
    }
    return tuple(sorted(atoms, key=lambda a: (literal_key(a[1]), a[0])))


class ModalGuess:
    """A truth assignment to modal atoms; outer negation reads off the entry."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Mapping):
        self._map = dict(mapping)

    @classmethod
    def from_bits(cls, domain: Sequence, bits: int) -> "ModalGuess":
        return cls({atom: bool(bits >> i & 1) for i, atom in enumerate(domain)})

    @classmethod
    def observed(cls, domain: Sequence, w: Iterable) -> "ModalGuess":
        """The truth values the collection ``w`` gives to the domain's atoms."""
        w = tuple(w)
        return cls(
            {
                (modality, base): satisfies_subjective(
                    w, SubjectiveLiteral(base, modality)
                )
                for modality, base in domain
            }
        )

    def truth(self, s: SubjectiveLiteral) -> bool:
        return self._map[(s.modality, s.base)] != s.negated

    def items(self):
        return self._map.items()

    def __eq__(self, other) -> bool:
        return isinstance(other, ModalGuess) and self._map == other._map

    def __repr__(self) -> str:
        parts = ", ".join(
            f"{m} {l}={'T' if v else 'F'}" for (m, l), v in sorted(
                self._map.items(), key=lambda kv: (literal_key(kv[0][1]), kv[0][0])
            )
        )
        return f"ModalGuess({parts})"


def _reduce_subjective(p: Program, keep) -> Program:
    """Drop rules with a false modal literal, strip modal literals elsewhere."""
    out = []
    for rule in p.rules:
        subj = rule.subjective()
        if all(keep(s) for s in subj):
            out.append(Rule(rule.head, rule.objective_body(), rule.body_neg))
    return Program(tuple(out))


def reduce_by_guess(p: Program, guess: ModalGuess) -> Program:
    return _reduce_subjective(p, guess.truth)


def modal_reduct(p: Program, w: Iterable) -> Program:
    """The program reduced by a collection of literal sets."""
    w = tuple(w)
    return _reduce_subjective(p, lambda s: satisfies_subjective(w, s))


def gl_reduct(p: Program, belief_set) -> Program:
    """Delete rules blocked by ``not L`` with L in the set; strip the rest."""
    if p.has_modal:
        raise ValueError("reduct by a literal set is defined for modal-free programs")
    out = []
    for rule in p.rules:
        if any(contains(belief_set, l) for l in rule.body_neg):
            continue
        out.append(Rule(rule.head, rule.body_pos, ()))
    return Program(tuple(out))


# ---------------------------------------------------------------------------
# Belief sets
# ---------------------------------------------------------------------------


class _Universe:
    """Bit indexing of a ground literal universe, in canonical order."""

    def __init__(self, literals: Iterable[ObjectiveLiteral]):
        self.lits = tuple(sorted(literals, key=literal_key))
        self.index = {l: i for i, l in enumerate(self.lits)}
        self.full = (1 << len(self.lits)) - 1

    def mask(self, lits: Iterable[ObjectiveLiteral]) -> int:
        m = 0
        for l in lits:
            m |= 1 << self.index[l]
        return m

    def literal_set(self, mask: int) -> frozenset[ObjectiveLiteral]:
        return frozenset(l for i, l in enumerate(self.lits) if mask >> i & 1)

    def consistent_masks(self) -> Iterator[int]:
        """Every subset that contains no complementary pair, as a bitmask."""
        seen: set[int] = set()
        options: list[tuple[int, ...]] = []
        for i, lit in enumerate(self.lits):
            if i in seen:
                continue
            j = self.index.get(lit.complement())
            if j is None:
                options.append((0, 1 << i))
            else:
                seen.add(j)
                options.append((0, 1 << i, 1 << j))
        for combo in itertools.product(*options):
            m = 0
            for bit in combo:
                m |= bit
            yield m


def _rule_masks(p: Program, universe: _Universe) -> list[tuple[int, int, int]]:
    masks = []
    for rule in p.rules:
        if rule.subjective():
            raise ValueError("belief sets are defined for modal-free programs")
        masks.append(
            (
                universe.mask(rule.head),
                universe.mask(rule.objective_body()),
                universe.mask(rule.body_neg),
            )
        )
    return masks


def _closed(candidate: int, reduct_of: int, masks: list[tuple[int, int, int]]) -> bool:
    """Is ``candidate`` closed under the rules surviving the reduct by ``reduct_of``?"""
    for head, body, neg in masks:
        if neg & reduct_of:
            continue
        if body & ~candidate == 0 and head & candidate == 0:
            return False
    return True


def _check_ground_edlp(p: Program, limits: SolveLimits) -> _Universe:
    if not p.is_ground:
        raise ValueError("belief sets are defined for ground programs only")
    universe = _Universe(p.literals)
    if len(universe.lits) > limits.max_lits:
        raise ResourceLimitError(
            f"literal universe has {len(universe.lits)} literals, "
            f"limit is {limits.max_lits}"
        )
    return universe


def belief_sets_positive(p: Program, limits: SolveLimits = DEFAULT_LIMITS) -> frozenset:
    """Minimal consistent closed literal sets, or the all-literal set if none."""
    universe = _check_ground_edlp(p, limits)
    masks = _rule_masks(p, universe)
    if any(neg for _, _, neg in masks):
        raise ValueError("positive belief sets are defined for 'not'-free programs")
    closed = [m for m in universe.consistent_masks() if _closed(m, 0, masks)]
    minimal = [
        m for m in closed if not any(o != m and o & m == o for o in closed)
    ]
    if not minimal:
        return INCONSISTENT_VIEW
    return frozenset(universe.literal_set(m) for m in minimal)


def belief_sets(p: Program, limits: SolveLimits = DEFAULT_LIMITS) -> frozenset:
    """Belief sets of a disjunctive program with ``not``: guess and check.

    A consistent candidate is accepted iff it is a minimal closed set of its
    own reduct; the all-literal set is accepted iff the reduct by the full
    universe has no consistent closed set.
    """
    universe = _check_ground_edlp(p, limits)
    masks = _rule_masks(p, universe)
    out = []
    consistent_closed_under_full = False
    for cand in universe.consistent_masks():
        if _closed(cand, universe.full, masks):
            consistent_closed_under_full = True
        if not _closed(cand, cand, masks):
            continue
        minimal = True
        if cand:
            sub = (cand - 1) & cand
            while True:
                if _closed(sub, cand, masks):
                    minimal = False
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & cand
        if minimal:
            out.append(universe.literal_set(cand))
    result = set(out)
    if not consistent_closed_under_full:
        result.add(LIT_ALL)
    return frozenset(result)


# ---------------------------------------------------------------------------
# World views
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WorldViewEnumeration:
    """All world views in canonical order, plus whether the empty collection
    satisfied the fixpoint equation (reported separately, never as a view)."""

    views: tuple
    empty_fixpoint: bool

    def consistent_views(self) -> tuple:
        return tuple(w for w in self.views if is_consistent_world_view(w))


def enumerate_world_views(
    p: Program, limits: SolveLimits = DEFAULT_LIMITS
) -> WorldViewEnumeration:
    if not p.is_ground:
        raise ValueError("world views are defined for ground programs only")
    if len(p.literals) > limits.max_lits:
        raise ResourceLimitError(
            f"literal universe has {len(p.literals)} literals, limit is {limits.max_lits}"
        )
    domain = modal_domain(p)
    if len(domain) > limits.max_modal:
        raise ResourceLimitError(
            f"program has {len(domain)} modal atoms, limit is {limits.max_modal}"
        )
    views = set()
    empty_fixpoint = False
    for bits in range(1 << len(domain)):
        guess = ModalGuess.from_bits(domain, bits)
        w = belief_sets(reduce_by_guess(p, guess), limits)
        observed = ModalGuess.observed(domain, w)
        if observed == guess:
            passes = True
        else:
            # the modal reduct by w coincides with reduction by the observed guess
            passes = belief_sets(reduce_by_guess(p, observed), limits) == w
        if passes:
            if w:
                views.add(w)
            else:
                empty_fixpoint = True
    return WorldViewEnumeration(sort_world_views(views), empty_fixpoint)


def world_views(p: Program, limits: SolveLimits = DEFAULT_LIMITS) -> frozenset:
    """All non-empty collections satisfying the world-view fixpoint equation."""
    return frozenset(enumerate_world_views(p, limits).views)
