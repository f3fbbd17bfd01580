"""Syntax of epistemic logic programs: literals, rules, parsing, grounding.

Concrete syntax (UTF-8, ``%`` comments, ``.`` terminates a rule):

    rule     := [head] [":-" body] "."
    head     := objlit ("or" objlit)*
    body     := bodyelem ("," bodyelem)*
    bodyelem := objlit | "not" objlit | ["-"] ("K" | "M") objlit
    objlit   := ["-"] ident ["(" term ("," term)* ")"]
    term     := ident | VARIABLE            (VARIABLE starts uppercase)

``- K l`` and ``- M l`` write the outer-negated modal literals; ``K``/``M``
may also be glued to the literal (``Mp(X)``).  ``not`` in front of a modal
literal is accepted and folded into the outer modal negation, which is an
equivalent form; the AST keeps ``not`` for objective literals only.

A rule with an empty head is rewritten at parse time: its head becomes the
literal ``-true`` and the fact ``true.`` is added to the program once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Union

from .limits import ResourceLimitError

MODALITIES = ("K", "M")


class SourceError(Exception):
    """Error tied to a position in the program text."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ParseError(SourceError):
    pass


class ValidationError(SourceError):
    pass


def is_variable(term: str) -> bool:
    return term[:1].isupper()


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    @property
    def is_ground(self) -> bool:
        return not any(is_variable(t) for t in self.args)

    def variables(self) -> frozenset[str]:
        return frozenset(t for t in self.args if is_variable(t))

    def substitute(self, binding: dict[str, str]) -> "Atom":
        return Atom(self.predicate, tuple(binding.get(t, t) for t in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(self.args)})"


@dataclass(frozen=True)
class ObjectiveLiteral:
    atom: Atom
    negated: bool = False

    def complement(self) -> "ObjectiveLiteral":
        return ObjectiveLiteral(self.atom, not self.negated)

    @property
    def is_ground(self) -> bool:
        return self.atom.is_ground

    def variables(self) -> frozenset[str]:
        return self.atom.variables()

    def substitute(self, binding: dict[str, str]) -> "ObjectiveLiteral":
        return ObjectiveLiteral(self.atom.substitute(binding), self.negated)

    def __str__(self) -> str:
        return ("-" if self.negated else "") + str(self.atom)


@dataclass(frozen=True)
class SubjectiveLiteral:
    base: ObjectiveLiteral
    modality: str  # "K" or "M"
    negated: bool = False  # outer negation

    def flip(self) -> "SubjectiveLiteral":
        """The outer negation of this literal."""
        return SubjectiveLiteral(self.base, self.modality, not self.negated)

    def variables(self) -> frozenset[str]:
        return self.base.variables()

    def substitute(self, binding: dict[str, str]) -> "SubjectiveLiteral":
        return SubjectiveLiteral(self.base.substitute(binding), self.modality, self.negated)

    def __str__(self) -> str:
        return ("-" if self.negated else "") + f"{self.modality} {self.base}"


BodyElement = Union[ObjectiveLiteral, SubjectiveLiteral]


def literal_key(lit: ObjectiveLiteral) -> tuple:
    return (lit.atom.predicate, lit.atom.args, lit.negated)


def subjective_key(lit: SubjectiveLiteral) -> tuple:
    return (literal_key(lit.base), lit.modality, lit.negated)


def sublit_closure(literals: Iterable[ObjectiveLiteral]) -> frozenset[SubjectiveLiteral]:
    """All modal literals over the given objective literals (four per literal)."""
    return frozenset(
        SubjectiveLiteral(lit, modality, negated)
        for lit in literals
        for modality in MODALITIES
        for negated in (False, True)
    )


@dataclass(frozen=True)
class Rule:
    head: frozenset[ObjectiveLiteral]
    body_pos: tuple[BodyElement, ...] = ()
    body_neg: tuple[ObjectiveLiteral, ...] = ()

    def objective_body(self) -> tuple[ObjectiveLiteral, ...]:
        return tuple(e for e in self.body_pos if isinstance(e, ObjectiveLiteral))

    def subjective(self) -> tuple[SubjectiveLiteral, ...]:
        return tuple(e for e in self.body_pos if isinstance(e, SubjectiveLiteral))

    def pos(self) -> frozenset[ObjectiveLiteral]:
        """Objective body literals plus the bases of modal body literals."""
        return frozenset(
            e.base if isinstance(e, SubjectiveLiteral) else e for e in self.body_pos
        )

    def neg(self) -> frozenset[ObjectiveLiteral]:
        return frozenset(self.body_neg)

    def lit(self) -> frozenset[ObjectiveLiteral]:
        return self.head | self.pos() | self.neg()

    def variables(self) -> frozenset[str]:
        out: set[str] = set()
        for l in self.head:
            out |= l.variables()
        for e in self.body_pos:
            out |= e.variables()
        for l in self.body_neg:
            out |= l.variables()
        return frozenset(out)

    @property
    def is_ground(self) -> bool:
        return not self.variables()

    def substitute(self, binding: dict[str, str]) -> "Rule":
        return Rule(
            frozenset(l.substitute(binding) for l in self.head),
            tuple(e.substitute(binding) for e in self.body_pos),
            tuple(l.substitute(binding) for l in self.body_neg),
        )

    def __str__(self) -> str:
        head = " or ".join(str(l) for l in sorted(self.head, key=literal_key))
        body = [str(e) for e in self.body_pos] + [f"not {l}" for l in self.body_neg]
        if body:
            return f"{head} :- {', '.join(body)}."
        return f"{head}."


def canonical_rule_text(rule: Rule) -> str:
    """Rule text with head and every body section in canonical literal order."""
    head = " or ".join(str(l) for l in sorted(rule.head, key=literal_key))
    body = (
        [str(e) for e in sorted(rule.objective_body(), key=literal_key)]
        + [str(s) for s in sorted(rule.subjective(), key=subjective_key)]
        + [f"not {l}" for l in sorted(rule.body_neg, key=literal_key)]
    )
    if body:
        return f"{head} :- {', '.join(body)}."
    return f"{head}."


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(dict.fromkeys(self.rules)))

    @cached_property
    def constants(self) -> frozenset[str]:
        out: set[str] = set()
        for rule in self.rules:
            for lit in rule.head | rule.pos() | rule.neg():
                out.update(t for t in lit.atom.args if not is_variable(t))
        return frozenset(out)

    @cached_property
    def is_ground(self) -> bool:
        return all(r.is_ground for r in self.rules)

    @cached_property
    def literals(self) -> frozenset[ObjectiveLiteral]:
        """The ground literal universe: the union of lit(r) over all rules."""
        if not self.is_ground:
            raise ValueError("literal universe is defined for ground programs only")
        out: set[ObjectiveLiteral] = set()
        for r in self.rules:
            out |= r.lit()
        return frozenset(out)

    @cached_property
    def subjective_literals(self) -> frozenset[SubjectiveLiteral]:
        out: set[SubjectiveLiteral] = set()
        for r in self.rules:
            out.update(r.subjective())
        return frozenset(out)

    @property
    def has_modal(self) -> bool:
        return bool(self.subjective_literals)

    @property
    def rule_set(self) -> frozenset[Rule]:
        return frozenset(self.rules)

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules)


def canonical_program_text(program: Program) -> str:
    return "\n".join(sorted(canonical_rule_text(r) for r in program.rules))


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = {":-": "ARROW", ".": "DOT", ",": "COMMA", "(": "LPAREN", ")": "RPAREN", "-": "DASH"}


@dataclass(frozen=True)
class _Token:
    kind: str  # ARROW DOT COMMA LPAREN RPAREN DASH IDENT UWORD or not EOF
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith(":-", i):
            tokens.append(_Token("ARROW", ":-", line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            if word in ("or", "not"):
                kind = word
            elif is_variable(word):
                kind = "UWORD"
            else:
                kind = "IDENT"
            tokens.append(_Token(kind, word, line, col))
            col += len(word)
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

TRUE_LITERAL = ObjectiveLiteral(Atom("true"))
CONSTRAINT_HEAD = TRUE_LITERAL.complement()
TRUE_FACT = Rule(head=frozenset({TRUE_LITERAL}))


def _split_modality(word: str) -> tuple[str, str | None] | None:
    """Split a leading K/M off an uppercase word, if the rest can name an atom."""
    if word in MODALITIES:
        return word, None
    if word[0] in MODALITIES and (word[1].islower() or word[1] == "_"):
        return word[0], word[1:]
    return None


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {what}", tok.line, tok.col)
        return self.advance()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def parse_program(self) -> list[tuple[Rule, _Token]]:
        rules: list[tuple[Rule, _Token]] = []
        while self.peek().kind != "EOF":
            rules.append(self.parse_rule())
        return rules

    def parse_rule(self) -> tuple[Rule, _Token]:
        start = self.peek()
        head: list[ObjectiveLiteral] = []
        if self.peek().kind not in ("ARROW", "DOT"):
            head.append(self.parse_objective())
            while self.peek().kind == "or":
                self.advance()
                head.append(self.parse_objective())
        body_pos: list[BodyElement] = []
        body_neg: list[ObjectiveLiteral] = []
        if self.peek().kind == "ARROW":
            self.advance()
            while True:
                elem = self.parse_body_element()
                if isinstance(elem, tuple):
                    body_neg.append(elem[1])
                else:
                    body_pos.append(elem)
                if self.peek().kind != "COMMA":
                    break
                self.advance()
        if not head and not body_pos and not body_neg:
            raise ParseError("empty rule", start.line, start.col)
        self.expect("DOT", "'.' at end of rule")
        if not head:
            head = [CONSTRAINT_HEAD]
        return Rule(frozenset(head), tuple(body_pos), tuple(body_neg)), start

    def parse_body_element(self) -> BodyElement | tuple[str, ObjectiveLiteral]:
        tok = self.peek()
        if tok.kind == "not":
            self.advance()
            inner = self.parse_body_element()
            if isinstance(inner, tuple):
                raise ParseError("'not' cannot be nested", tok.line, tok.col)
            if isinstance(inner, SubjectiveLiteral):
                # equivalent outer negation of the modal literal
                return inner.flip()
            return ("not", inner)
        if tok.kind == "DASH" and self.peek(1).kind == "UWORD":
            split = _split_modality(self.peek(1).value)
            if split is None:
                nxt = self.peek(1)
                raise ParseError("variable cannot be classically negated", nxt.line, nxt.col)
            self.advance()
            return self.parse_modal(negated=True)
        if tok.kind == "UWORD":
            return self.parse_modal(negated=False)
        return self.parse_objective()

    def parse_modal(self, negated: bool) -> SubjectiveLiteral:
        tok = self.expect("UWORD", "modal operator")
        split = _split_modality(tok.value)
        if split is None:
            raise ParseError(f"unexpected variable {tok.value!r} in body", tok.line, tok.col)
        modality, glued = split
        if glued is None:
            base = self.parse_objective()
        else:
            base = ObjectiveLiteral(self.parse_atom_args(glued))
        return SubjectiveLiteral(base, modality, negated)

    def parse_objective(self) -> ObjectiveLiteral:
        negated = False
        if self.peek().kind == "DASH":
            self.advance()
            negated = True
        tok = self.peek()
        if tok.kind != "IDENT":
            raise self.error("expected a literal")
        self.advance()
        return ObjectiveLiteral(self.parse_atom_args(tok.value), negated)

    def parse_atom_args(self, predicate: str) -> Atom:
        args: list[str] = []
        if self.peek().kind == "LPAREN":
            self.advance()
            while True:
                tok = self.peek()
                if tok.kind not in ("IDENT", "UWORD"):
                    raise self.error("expected a term")
                self.advance()
                args.append(tok.value)
                if self.peek().kind == "COMMA":
                    self.advance()
                    continue
                break
            self.expect("RPAREN", "')'")
        return Atom(predicate, tuple(args))


def _validate(rules: list[tuple[Rule, _Token]]) -> None:
    arities: dict[str, tuple[int, _Token]] = {}
    for rule, tok in rules:
        for lit in rule.head | rule.pos() | rule.neg():
            seen = arities.get(lit.atom.predicate)
            if seen is None:
                arities[lit.atom.predicate] = (len(lit.atom.args), tok)
            elif seen[0] != len(lit.atom.args):
                raise ValidationError(
                    f"predicate {lit.atom.predicate!r} used with arity "
                    f"{len(lit.atom.args)} but first seen with arity {seen[0]} "
                    f"at line {seen[1].line}",
                    tok.line,
                    tok.col,
                )
        pos_vars: set[str] = set()
        for e in rule.body_pos:
            pos_vars |= e.variables()
        for lit in rule.head:
            unsafe = lit.variables() - pos_vars
            if unsafe:
                raise ValidationError(
                    f"unsafe variable {sorted(unsafe)[0]!r} in rule head",
                    tok.line,
                    tok.col,
                )
        for lit in rule.body_neg:
            unsafe = lit.variables() - pos_vars
            if unsafe:
                raise ValidationError(
                    f"unsafe variable {sorted(unsafe)[0]!r} under 'not'",
                    tok.line,
                    tok.col,
                )


def parse_program(text: str) -> Program:
    """Parse and validate a program; the result may contain variables."""
    parser = _Parser(_tokenize(text))
    rules = parser.parse_program()
    if any(CONSTRAINT_HEAD in rule.head for rule, _ in rules):
        if not any(rule == TRUE_FACT for rule, _ in rules):
            rules.append((TRUE_FACT, _Token("EOF", "", 0, 0)))
    _validate(rules)
    return Program(tuple(rule for rule, _ in rules))


def parse_literal(text: str) -> ObjectiveLiteral | SubjectiveLiteral:
    """Parse a single objective or modal literal, e.g. for queries."""
    parser = _Parser(_tokenize(text))
    elem = parser.parse_body_element()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError("trailing input after literal", tok.line, tok.col)
    if isinstance(elem, tuple):
        raise ParseError("'not' is not allowed here", 1, 1)
    return elem


def parse_objective_literal(text: str) -> ObjectiveLiteral:
    lit = parse_literal(text)
    if not isinstance(lit, ObjectiveLiteral):
        raise ParseError("expected an objective literal", 1, 1)
    return lit


# ---------------------------------------------------------------------------
# Grounding
# ---------------------------------------------------------------------------


def ground(program: Program, max_instances: int = 5000) -> Program:
    """Instantiate every rule over the program's constants.

    Ground input passes through unchanged.  Raises ResourceLimitError before
    materializing more than ``max_instances`` ground rules.
    """
    constants = sorted(program.constants)
    total = 0
    for rule in program.rules:
        nvars = len(rule.variables())
        total += len(constants) ** nvars if nvars else 1
        if total > max_instances:
            raise ResourceLimitError(
                f"grounding would produce more than {max_instances} rule instances"
            )
    out: list[Rule] = []
    for rule in program.rules:
        variables = sorted(rule.variables())
        if not variables:
            out.append(rule)
            continue
        for values in itertools.product(constants, repeat=len(variables)):
            out.append(rule.substitute(dict(zip(variables, values))))
    return Program(tuple(out))
