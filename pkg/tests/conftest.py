"""Shared fixtures: the golden programs and literal-set helpers."""

from __future__ import annotations

import pytest

from episolve.syntax import ground, parse_objective_literal, parse_program

# A disjunctive choice with a closed-world rule driven by -M.
CWA_CHOICE_TEXT = """
p(a) or p(b).
p(c).
q(d).
-p(X) :- -M p(X).
"""

# Two rules that disable each other through -M: two world views.
MUTUAL_CHOICE_TEXT = """
p(a) :- -M q(a).
q(a) :- -M p(a).
"""

# Self-defeating rule through -K: no world view.
SELF_DEFEATING_TEXT = "p(a) :- -K p(a).\n"

# The unsafe-split program: one bottom belief set has no consistent
# extension through the top.
UNSAFE_SPLIT_TEXT = """
p(a) or p(b).
p(c) :- M p(b).
p(d) :- p(b).
-p(d) :- p(b).
"""

UNSAFE_SPLIT_U = ("p(a)", "-p(a)", "p(b)", "-p(b)", "p(c)", "-p(c)")

# Restricted-reduct example data: the collection, the restriction set, and
# the program whose modal literals over the set get resolved.
REDUCT_PROGRAM_TEXT = """
e :- a, M -b, f.
g :- K a, h.
i :- M c.
j :- K d, k.
"""

# Multi-view example: two programs sharing one modal atom.
JOINT_A_TEXT = "a.\nb.\nc :- K b.\n"
JOINT_B_TEXT = "a.\nc :- K b.\n"

# Stratified chain exercising K, disjunction, and M across layers.
CHAIN_TEXT = "p.\nq :- K p.\nr or s :- q.\nt :- M r.\n"


def L(text: str):
    return parse_objective_literal(text)


def lits(*texts: str) -> frozenset:
    return frozenset(L(t) for t in texts)


def view(*belief_sets) -> frozenset:
    return frozenset(lits(*b) if isinstance(b, (tuple, list)) else b for b in belief_sets)


def load(text: str):
    return ground(parse_program(text))


@pytest.fixture
def cwa_choice():
    return load(CWA_CHOICE_TEXT)


@pytest.fixture
def mutual_choice():
    return load(MUTUAL_CHOICE_TEXT)


@pytest.fixture
def self_defeating():
    return load(SELF_DEFEATING_TEXT)


@pytest.fixture
def unsafe_split_program():
    return load(UNSAFE_SPLIT_TEXT)


@pytest.fixture
def unsafe_split_u():
    return lits(*UNSAFE_SPLIT_U)


@pytest.fixture
def chain_program():
    return load(CHAIN_TEXT)


# The world view published for the closed-world choice program.
PUBLISHED_CWA_VIEW = (
    ("q(d)", "p(a)", "p(c)", "-p(d)"),
    ("q(d)", "p(b)", "p(c)", "-p(d)"),
)


def published_cwa_view():
    return view(*PUBLISHED_CWA_VIEW)
