"""The differential harness: generation, comparison, minimization."""

import random

import pytest

from episolve.fuzz import (
    CorpusEntry,
    FuzzConfig,
    candidate_splitting_sets,
    generate_program,
    generate_stratified_program,
    minimize_program,
    run_fuzz,
    split_divergence,
)
from episolve.limits import DEFAULT_LIMITS
from episolve.splitting import is_splitting_set
from episolve.stratification import find_stratification
from episolve.syntax import parse_program

from conftest import UNSAFE_SPLIT_TEXT, UNSAFE_SPLIT_U, lits, load


class TestGeneration:
    def test_generated_programs_are_ground_and_bounded(self):
        cfg = FuzzConfig(seed=7)
        rng = random.Random(cfg.seed)
        for _ in range(50):
            program = generate_program(rng, cfg)
            assert program.is_ground
            assert 1 <= len(program.rules) <= cfg.max_rules

    def test_stratified_generator_output_is_stratified(self):
        cfg = FuzzConfig(seed=11)
        rng = random.Random(cfg.seed)
        for _ in range(50):
            program = generate_stratified_program(rng, cfg)
            assert find_stratification(program) is not None

    def test_candidate_splitting_sets_are_valid_and_nontrivial(self):
        cfg = FuzzConfig(seed=3)
        rng = random.Random(cfg.seed)
        found = 0
        for _ in range(40):
            program = generate_program(rng, cfg)
            for u in candidate_splitting_sets(program):
                found += 1
                assert is_splitting_set(u, program)
                bottom = [r for r in program.rules if r.lit() <= u]
                assert 0 < len(bottom) < len(program.rules)
        assert found > 0


class TestConfig:
    def test_probabilities_validated(self):
        with pytest.raises(ValueError):
            FuzzConfig(p_not=1.5).validate()
        with pytest.raises(ValueError):
            FuzzConfig(p_k=0.5, p_m=0.4, p_not=0.3).validate()
        FuzzConfig().validate()

    def test_bounds_validated(self):
        with pytest.raises(ValueError):
            FuzzConfig(max_predicates=0).validate()
        with pytest.raises(ValueError):
            FuzzConfig(max_rules=0).validate()


class TestHarness:
    def test_determinism(self):
        cfg = FuzzConfig(seed=42, count=15)
        assert run_fuzz(cfg) == run_fuzz(cfg)

    def test_guarded_split_run_has_no_divergence(self):
        report = run_fuzz(FuzzConfig(seed=5, count=60, guarded_only=True))
        assert report.divergences == ()
        assert report.exit_code == 0
        assert report.matches > 0

    def test_stratified_run_has_no_divergence(self):
        report = run_fuzz(FuzzConfig(seed=6, count=60, stratified_only=True))
        assert report.divergences == ()
        assert report.matches > 0

    def test_unsafe_corpus_entry_flags_one_divergence(self):
        entry = CorpusEntry(
            name="unsafe-split",
            program_text=UNSAFE_SPLIT_TEXT,
            split_set=UNSAFE_SPLIT_U,
            detect_unsafe=False,
        )
        report = run_fuzz(FuzzConfig(seed=0, count=0, corpus=(entry,)))
        assert len(report.divergences) == 1
        assert report.exit_code == 1
        divergence = report.divergences[0]
        assert divergence.minimized_text
        minimized = load(divergence.minimized_text)
        u = lits(*UNSAFE_SPLIT_U)
        assert split_divergence(minimized, u, DEFAULT_LIMITS, False) is not None

    def test_detected_corpus_entry_matches(self):
        entry = CorpusEntry(
            name="unsafe-split-detected",
            program_text=UNSAFE_SPLIT_TEXT,
            split_set=UNSAFE_SPLIT_U,
            detect_unsafe=True,
        )
        report = run_fuzz(FuzzConfig(seed=0, count=0, corpus=(entry,)))
        assert report.divergences == ()


class TestMinimizer:
    def test_minimizer_preserves_divergence_and_shrinks(self, unsafe_split_program):
        u = lits(*UNSAFE_SPLIT_U)
        predicate = lambda q: split_divergence(q, u, DEFAULT_LIMITS, False) is not None
        assert predicate(unsafe_split_program)
        minimized = minimize_program(unsafe_split_program, predicate)
        assert predicate(minimized)
        assert len(minimized.rules) <= len(unsafe_split_program.rules)
