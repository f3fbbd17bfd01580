"""Splitting sets, reducts, partial evaluation, multi-views, guardedness,
and the combined solver, checked against the exhaustive engine."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from episolve.semantics import (
    INCONSISTENT_VIEW,
    LIT_ALL,
    enumerate_world_views,
    is_consistent_world_view,
    world_views,
)
from episolve.splitting import (
    NotASplittingSet,
    PossiblyUnsafeSplit,
    SubjectiveOverlap,
    UNKNOWN,
    find_guard_counterexample,
    is_guarded,
    is_splitting_set,
    multi_views,
    partial_eval,
    restrict,
    restricted_reduct,
    solve_by_splitting,
    split,
)
from episolve.syntax import canonical_program_text, ground, parse_program

from conftest import (
    JOINT_A_TEXT,
    JOINT_B_TEXT,
    REDUCT_PROGRAM_TEXT,
    L,
    lits,
    load,
    published_cwa_view,
    view,
)

CWA_U = lits(
    "p(a)", "-p(a)", "p(b)", "-p(b)", "p(c)", "-p(c)", "q(d)", "-q(d)"
)


class TestIsSplittingSet:
    def test_unsafe_example_u_is_a_splitting_set(self, unsafe_split_program, unsafe_split_u):
        assert is_splitting_set(unsafe_split_u, unsafe_split_program)

    def test_empty_set_is_vacuously_splitting(self, unsafe_split_program, cwa_choice):
        assert is_splitting_set(frozenset(), unsafe_split_program)
        assert is_splitting_set(frozenset(), cwa_choice)

    def test_complement_closure_required_with_modalities(self, unsafe_split_program):
        assert not is_splitting_set(lits("p(c)"), unsafe_split_program)

    def test_complement_closure_not_required_without_modalities(self):
        program = load("p.\nq :- p, not r.")
        assert is_splitting_set(lits("p"), program)

    def test_head_pulls_whole_rule(self):
        program = load("a :- b.")
        assert not is_splitting_set(lits("a"), program)
        assert is_splitting_set(lits("a", "b"), program)


class TestSplit:
    def test_unsafe_example_decomposition(self, unsafe_split_program, unsafe_split_u):
        dec = split(unsafe_split_program, unsafe_split_u)
        assert canonical_program_text(dec.bottom) == canonical_program_text(
            load("p(a) or p(b).\np(c) :- M p(b).")
        )
        assert canonical_program_text(dec.top) == canonical_program_text(
            load("p(d) :- p(b).\n-p(d) :- p(b).")
        )

    def test_empty_set_puts_everything_on_top(self, cwa_choice):
        dec = split(cwa_choice, frozenset())
        assert dec.bottom.rules == ()
        assert dec.top == cwa_choice

    def test_full_closure_puts_everything_in_bottom(self, cwa_choice):
        u = frozenset(
            l for lit in cwa_choice.literals for l in (lit, lit.complement())
        )
        dec = split(cwa_choice, u)
        assert dec.top.rules == ()
        assert dec.bottom == cwa_choice

    def test_rejects_non_splitting_set(self, unsafe_split_program):
        with pytest.raises(NotASplittingSet):
            split(unsafe_split_program, lits("p(c)"))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_decomposition_soundness(self, seed):
        from episolve.fuzz import (
            FuzzConfig,
            candidate_splitting_sets,
            generate_program,
        )

        program = generate_program(random.Random(seed), FuzzConfig())
        for u in candidate_splitting_sets(program):
            dec = split(program, u)
            assert dec.bottom.rule_set | dec.top.rule_set == program.rule_set
            assert not (dec.bottom.rule_set & dec.top.rule_set)
            bottom_lits = frozenset().union(
                *(r.lit() for r in dec.bottom.rules)
            ) if dec.bottom.rules else frozenset()
            for rule in dec.top.rules:
                assert not (rule.head & bottom_lits)


# the restricted-reduct example: W, U, and the expected surviving rules
REDUCT_W = view(("a", "-b", "d"), ("a", "-d"))
REDUCT_U = lits("a", "-a", "b", "-b", "c", "-c")


class TestRestrictedReduct:
    def test_worked_example(self):
        program = load(REDUCT_PROGRAM_TEXT)
        result = restricted_reduct(program, REDUCT_U, REDUCT_W)
        # the two rules with in-scope modal literals resolve as printed;
        # the rule over the out-of-scope literal d survives untouched
        assert canonical_program_text(result) == canonical_program_text(
            load("e :- a, f.\ng :- h.\nj :- K d, k.")
        )

    def test_empty_u_is_identity(self):
        program = load(REDUCT_PROGRAM_TEXT)
        assert restricted_reduct(program, frozenset(), REDUCT_W) == program

    def test_out_of_scope_modal_survives(self):
        program = load("j :- K d, k.")
        result = restricted_reduct(program, lits("k", "-k"), view(("k",)))
        assert result == program

    def test_false_in_scope_modal_deletes(self):
        program = load("i :- M c.")
        assert restricted_reduct(program, REDUCT_U, REDUCT_W).rules == ()


class TestPartialEval:
    def test_unsatisfied_body_drops_rules(self, unsafe_split_program, unsafe_split_u):
        top = split(unsafe_split_program, unsafe_split_u).top
        result = partial_eval(top, unsafe_split_u, lits("p(a)", "p(c)"))
        assert result.rules == ()

    def test_satisfied_body_strips_to_facts(self, unsafe_split_program, unsafe_split_u):
        top = split(unsafe_split_program, unsafe_split_u).top
        result = partial_eval(top, unsafe_split_u, lits("p(b)", "p(c)"))
        assert canonical_program_text(result) == canonical_program_text(
            load("p(d).\n-p(d).")
        )

    def test_disjoint_u_is_identity(self):
        program = load("x :- y, not z.")
        assert partial_eval(program, lits("w"), frozenset()) == program

    def test_not_part_blocks_on_membership(self):
        program = load("x :- not y.")
        assert partial_eval(program, lits("y"), lits("y")).rules == ()
        assert partial_eval(program, lits("y"), frozenset()) == load("x.")

    def test_subjective_overlap_rejected(self):
        program = load("x :- K y.")
        with pytest.raises(SubjectiveOverlap):
            partial_eval(program, lits("y"), frozenset())
        with pytest.raises(SubjectiveOverlap):
            partial_eval(program, lits("z"), lits("y"))


class TestRestrict:
    def test_collapse(self):
        assert restrict(view(("a", "b"), ("a", "c")), lits("a")) == view(("a",))

    def test_empty_collection(self):
        assert restrict(frozenset(), lits("a")) == frozenset()

    def test_published_view_restricted(self):
        got = restrict(published_cwa_view(), lits("q(d)", "-q(d)"))
        assert got == view(("q(d)",))

    def test_lit_all_restricts_to_u(self):
        assert restrict(frozenset({LIT_ALL}), lits("a")) == view(("a",))


class TestMultiViews:
    def test_joint_example(self):
        p1, p2 = load(JOINT_A_TEXT), load(JOINT_B_TEXT)
        mvs = multi_views([p1, p2])
        assert len(mvs) == 1
        mv = next(iter(mvs))
        assert mv.collection == view(("a", "b"), ("a",))
        assert mv.restricted_views == (view(("a", "b")), view(("a",)))
        assert mv.consistent

    def test_single_modal_free_program(self):
        mvs = multi_views([load("p or q.")])
        assert {mv.collection for mv in mvs} == {view(("p",), ("q",))}

    def test_all_inconsistent_gives_lit(self):
        mvs = multi_views([load("p.\n-p.")])
        assert {mv.collection for mv in mvs} == {INCONSISTENT_VIEW}
        assert not next(iter(mvs)).consistent

    def test_incoherent_single_program_gives_empty_collection(self):
        mvs = multi_views([load("p :- not p.")])
        assert {mv.collection for mv in mvs} == {frozenset()}

    def test_every_multi_view_satisfies_the_equation(self):
        from episolve.semantics import belief_sets, modal_reduct

        programs = [load(JOINT_A_TEXT), load(JOINT_B_TEXT), load("d :- -M b.")]
        for mv in multi_views(programs):
            answers = [
                belief_sets(modal_reduct(p, mv.collection)) for p in programs
            ]
            if any(LIT_ALL not in b for b in answers):
                expected = frozenset().union(*answers) - {LIT_ALL}
            else:
                expected = INCONSISTENT_VIEW
            assert mv.collection == expected


class TestGuarded:
    def test_unsafe_example_not_guarded_with_hand_witness(
        self, unsafe_split_program, unsafe_split_u
    ):
        assert is_guarded(unsafe_split_program, unsafe_split_u) is False
        witness = find_guard_counterexample(unsafe_split_program, unsafe_split_u)
        assert witness == (frozenset(lits("p(b)", "p(c)")),)

    def test_modal_free_is_always_guarded(self):
        program = load("p.\n-p :- q.\nq :- not r.")
        assert is_guarded(program, lits("q", "r")) is True

    def test_no_contrary_head_pair_is_guarded(self, cwa_choice):
        assert is_guarded(cwa_choice, CWA_U) is True

    def test_unknown_when_search_space_too_large(self):
        text = "\n".join(f"x{i}." for i in range(13))
        program = load(text + "\na :- M x0.\n-a :- M x1.")
        u = frozenset(
            l
            for lit in load(text).literals
            for l in (lit, lit.complement())
        )
        assert is_guarded(program, u) is UNKNOWN


class TestSolveBySplitting:
    def test_unsafe_split_detected_and_raw_combination_wrong(
        self, unsafe_split_program, unsafe_split_u
    ):
        with pytest.raises(PossiblyUnsafeSplit) as err:
            solve_by_splitting(unsafe_split_program, unsafe_split_u)
        assert err.value.belief_set == lits("p(b)", "p(c)")
        raw = solve_by_splitting(
            unsafe_split_program, unsafe_split_u, detect_unsafe=False
        )
        assert raw == {view(("p(a)", "p(c)"))}
        assert world_views(unsafe_split_program) == {view(("p(a)",))}

    def test_cwa_choice_split_matches_exhaustive(self, cwa_choice):
        assert solve_by_splitting(cwa_choice, CWA_U) == world_views(cwa_choice)

    def test_modal_free_stratifiable_program(self):
        program = load("a.\nb :- a, not c.")
        result = solve_by_splitting(program, lits("a", "-a"))
        assert result == {view(("a", "b"))}
        assert result == world_views(program)

    def test_empty_splitting_set_degenerates_to_direct_solving(self, cwa_choice):
        result = solve_by_splitting(cwa_choice, frozenset())
        naive = {
            w
            for w in world_views(cwa_choice)
            if is_consistent_world_view(w)
        }
        assert result == naive

    def test_rejects_non_splitting_set(self, unsafe_split_program):
        with pytest.raises(NotASplittingSet):
            solve_by_splitting(unsafe_split_program, lits("p(c)"))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 100_000))
    def test_guarded_differential(self, seed):
        from episolve.fuzz import (
            FuzzConfig,
            candidate_splitting_sets,
            generate_program,
        )

        program = generate_program(random.Random(seed), FuzzConfig(max_rules=6))
        naive = {
            w
            for w in world_views(program)
            if is_consistent_world_view(w)
        }
        for u in candidate_splitting_sets(program):
            if is_guarded(program, u) is not True:
                continue
            # guarded implies the detector stays silent and results agree
            result = solve_by_splitting(program, u)
            assert result == naive
