"""Layering detection, the cumulative splitting chain, and stagewise solving."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from episolve.semantics import (
    belief_sets,
    is_consistent_world_view,
    world_views,
)
from episolve.splitting import PossiblyUnsafeSplit, is_splitting_set
from episolve.stratification import (
    NotStratified,
    find_stratification,
    is_valid_stratification,
    solve_stratified,
    splitting_chain,
)

from conftest import CHAIN_TEXT, lits, load, view


class TestFindStratification:
    def test_mutual_choice_is_not_stratified(self, mutual_choice):
        assert find_stratification(mutual_choice) is None

    def test_self_defeating_is_not_stratified(self, self_defeating):
        assert find_stratification(self_defeating) is None

    def test_cwa_choice_is_not_stratified(self, cwa_choice):
        # the head -p(x) shares a layer with the modal base p(x), so the
        # strict modal dependency cannot descend
        assert find_stratification(cwa_choice) is None

    def test_chain_program_layers(self, chain_program):
        strat = find_stratification(chain_program)
        assert strat is not None
        # greedy-earliest layering: the weak edge q -> {r,s} stays flat
        assert strat.strata == (
            lits("p", "-p"),
            lits("q", "-q", "r", "-r", "s", "-s"),
            lits("t", "-t"),
        )
        assert is_valid_stratification(chain_program, strat.strata)

    def test_emitted_layering_always_validates(self):
        programs = [
            "p.\nq :- K p.",
            "a :- not b.\nb or c.",
            "x.\ny :- x.\nz :- M y, not x.",
        ]
        for text in programs:
            program = load(text)
            strat = find_stratification(program)
            assert strat is not None
            assert is_valid_stratification(program, strat.strata)

    def test_complement_colocation(self):
        strat = find_stratification(load("p.\n-q :- K p."))
        level = {}
        for i, s in enumerate(strat.strata):
            for l in s:
                level[l] = i
        for lit in level:
            assert level[lit] == level[lit.complement()]

    def test_co_head_literals_share_a_layer(self):
        strat = find_stratification(load("a or b :- not c.\nc or d."))
        level = {}
        for i, s in enumerate(strat.strata):
            for l in s:
                level[l] = i
        assert level[next(iter(lits("a")))] == level[next(iter(lits("b")))]
        assert level[next(iter(lits("c")))] == level[next(iter(lits("d")))]

    def test_positive_loop_is_stratified(self):
        assert find_stratification(load("a :- b.\nb :- a.")) is not None

    def test_not_loop_is_not_stratified(self):
        assert find_stratification(load("a :- not b.\nb :- not a.")) is None


class TestSplittingChain:
    def test_chain_is_cumulative_and_verified(self, chain_program):
        strat = find_stratification(chain_program)
        chain = splitting_chain(strat.strata, chain_program)
        assert chain == strat.splitting_chain
        acc = frozenset()
        for stratum, u in zip(strat.strata, chain):
            acc = acc | stratum
            assert u == acc
            assert is_splitting_set(u, chain_program)

    def test_single_layer_program(self):
        program = load("a or b.\nc.")
        strat = find_stratification(program)
        assert len(strat.splitting_chain) == 1

    def test_chain_is_strictly_monotone_and_covers_heads(self, chain_program):
        strat = find_stratification(chain_program)
        chain = strat.splitting_chain
        for smaller, larger in zip(chain, chain[1:]):
            assert smaller < larger
        heads = frozenset().union(*(r.head for r in chain_program.rules))
        assert heads <= chain[-1]


class TestSolveStratified:
    def test_chain_program_matches_exhaustive(self, chain_program):
        result = solve_stratified(chain_program)
        assert result == view(("p", "q", "r", "t"), ("p", "q", "s", "t"))
        assert world_views(chain_program) == {result}

    def test_modal_free_stratified_program(self):
        program = load("a.\nb :- not c.")
        assert solve_stratified(program) == view(("a", "b"))
        assert world_views(program) == {view(("a", "b"))}

    def test_positive_single_layer_program(self):
        program = load("a or b.\nc.")
        assert solve_stratified(program) == belief_sets(program)

    def test_not_stratified_raises(self, mutual_choice):
        with pytest.raises(NotStratified):
            solve_stratified(mutual_choice)

    def test_inconsistent_bottom_layer_flags_unsafety(self):
        with pytest.raises(PossiblyUnsafeSplit):
            solve_stratified(load("p.\n-p."))

    def test_upper_layer_inconsistency_flags_unsafety(self):
        # the only belief set of the bottom has no consistent extension
        program = load("p.\nq :- K p.\n-q :- K p.")
        with pytest.raises(PossiblyUnsafeSplit):
            solve_stratified(program)

    def test_disjunctive_upper_layer(self):
        program = load("a or b.\nc :- K a.\nd :- M a.")
        result = solve_stratified(program)
        assert world_views(program) == {result}

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 100_000))
    def test_random_stratified_differential(self, seed):
        from episolve.fuzz import FuzzConfig, generate_stratified_program

        program = generate_stratified_program(
            random.Random(seed), FuzzConfig(max_rules=6)
        )
        assert find_stratification(program) is not None
        try:
            result = solve_stratified(program)
        except PossiblyUnsafeSplit:
            return
        naive = world_views(program)
        # unique consistent world view, and the engines agree on it
        assert naive == {result}
        assert is_consistent_world_view(result)
