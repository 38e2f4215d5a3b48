"""Propositional sentences, truth tables and entailment checking.

Concrete syntax, loosest binding first::

    iff     := implies ( '<->' iff )?          right-associative
    implies := or ( '->' implies )?            right-associative
    or      := and ( '|' and )*
    and     := unary ( '&' unary )*
    unary   := '~' unary | atom
    atom    := NAME | '(' iff ')'

``¬ ∧ ∨ → ↔`` are accepted for ``~ & | -> <->``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .grover import WinnerScenario
from .metrics import ShotCounts, UndefinedMetricError, marking_factor
from .schemes import MARKING_SCHEMES, MAX_SCHEME_INPUTS, SchemeKind, run_scheme

MAX_SYMBOLS = MAX_SCHEME_INPUTS

# Decision cut between the no-winner marking factor and the nearest some-winner mean.
THRESHOLDS = {
    SchemeKind.SUBTLE_MARKING: -0.30,
    SchemeKind.NULL_MARKING: -0.15,
    SchemeKind.EIGENMARKING: 0.20,
}
DECISION_RULE = "calibrated-threshold"


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class MissingSymbolError(KeyError):
    pass


class SymbolBudgetError(ValueError):
    pass


# -- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Symbol:
    name: str


@dataclass(frozen=True)
class Not:
    arg: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff:
    left: Formula
    right: Formula


Formula = Union[Symbol, Not, And, Or, Implies, Iff]
Model = Mapping[str, bool]

_BINARY = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Symbol: 6}


# -- lexer / parser -----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?:(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op><->|->|[~&|()¬∧∨→↔]))"
)
_ALIASES = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "↔": "<->"}


@dataclass
class _Token:
    kind: str  # "name", an operator string, or "eof"
    text: str
    offset: int  # byte offset into the UTF-8 source


def tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    byte_at = lambda i: len(text[:i].encode())  # noqa: E731
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            tokens.append(_Token("eof", "", byte_at(pos)))
            return tokens
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unknown token {text[pos]!r}", byte_at(pos))
        if m.group("name"):
            tokens.append(_Token("name", m.group("name"), byte_at(pos)))
        else:
            op = _ALIASES.get(m.group("op"), m.group("op"))
            tokens.append(_Token(op, m.group("op"), byte_at(pos)))
        pos = m.end()


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0
        self.open_parens: list[int] = []

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def parse(self) -> Formula:
        if self.tok.kind == "eof":
            raise ParseError("empty formula", self.tok.offset)
        f = self.iff()
        if self.tok.kind == ")":
            raise ParseError("unbalanced parenthesis", self.tok.offset)
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected trailing input {self.tok.text!r}", self.tok.offset)
        return f

    def iff(self) -> Formula:
        left = self.implies()
        if self.tok.kind == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disj()
        if self.tok.kind == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.tok.kind == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.tok.kind == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.tok.kind == "~":
            self.take()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "name":
            self.take()
            return Symbol(t.text)
        if t.kind == "(":
            self.take()
            self.open_parens.append(t.offset)
            f = self.iff()
            if self.tok.kind != ")":
                if self.tok.kind == "eof":
                    raise ParseError("unbalanced parenthesis", self.open_parens[-1])
                raise ParseError(f"expected ')' but found {self.tok.text!r}", self.tok.offset)
            self.take()
            self.open_parens.pop()
            return f
        if t.kind == "eof":
            if self.open_parens:
                raise ParseError("unbalanced parenthesis", self.open_parens[-1])
            raise ParseError("unexpected end of input", t.offset)
        if t.kind == ")":
            raise ParseError("unbalanced parenthesis", t.offset)
        raise ParseError(f"expected a symbol or '(' but found {t.text!r}", t.offset)


def parse(text: str) -> Formula:
    return _Parser(tokenize(text)).parse()


def pretty(f: Formula) -> str:
    """ASCII rendering with the fewest parentheses that parse back to ``f``."""
    if isinstance(f, Symbol):
        return f.name
    if isinstance(f, Not):
        inner = pretty(f.arg)
        return "~" + (f"({inner})" if _PREC[type(f.arg)] < _PREC[Not] else inner)
    p = _PREC[type(f)]
    right_assoc = isinstance(f, (Implies, Iff))
    lp, rp = _PREC[type(f.left)], _PREC[type(f.right)]
    left = pretty(f.left)
    right = pretty(f.right)
    if lp < p or (right_assoc and lp == p):
        left = f"({left})"
    if rp < p or (not right_assoc and rp == p):
        right = f"({right})"
    return f"{left} {_BINARY[type(f)]} {right}"


# -- semantics -----------------------------------------------------------------


def symbols(f: Formula) -> set[str]:
    if isinstance(f, Symbol):
        return {f.name}
    if isinstance(f, Not):
        return symbols(f.arg)
    return symbols(f.left) | symbols(f.right)


def evaluate(f: Formula, m: Model) -> bool:
    if isinstance(f, Symbol):
        try:
            return bool(m[f.name])
        except KeyError:
            raise MissingSymbolError(f"model has no value for {f.name!r}") from None
    if isinstance(f, Not):
        return not evaluate(f.arg, m)
    a, b = evaluate(f.left, m), evaluate(f.right, m)
    if isinstance(f, And):
        return a and b
    if isinstance(f, Or):
        return a or b
    if isinstance(f, Implies):
        return (not a) or b
    return a == b


def models(names: list[str]) -> Iterator[dict[str, bool]]:
    """All assignments; the first name is the most significant bit."""
    for bits in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, bits))


def _as_formula(f: Formula | str) -> Formula:
    return parse(f) if isinstance(f, str) else f


def violation_set(alpha: Formula | str, beta: Formula | str) -> WinnerScenario:
    """Models of alpha & ~beta as n-bit winner labels over the sorted joint symbols."""
    alpha, beta = _as_formula(alpha), _as_formula(beta)
    names = sorted(symbols(alpha) | symbols(beta))
    if len(names) > MAX_SYMBOLS:
        raise SymbolBudgetError(f"{len(names)} symbols exceed the limit of {MAX_SYMBOLS}")
    winners = set()
    for m in models(names):
        if evaluate(alpha, m) and not evaluate(beta, m):
            winners.add("".join("1" if m[s] else "0" for s in names))
    return WinnerScenario(len(names), frozenset(winners))


def entails_classical(alpha: Formula | str, beta: Formula | str) -> bool:
    return not violation_set(alpha, beta).winners


@dataclass
class EntailmentResult:
    decision: bool | None
    marking_factor: float | None
    evidence: ShotCounts
    scheme: SchemeKind
    threshold: float
    scenario: WinnerScenario
    mode: str

    @property
    def indeterminate(self) -> bool:
        return self.decision is None

    @property
    def verdict(self) -> str:
        if self.decision is None:
            return "INDETERMINATE"
        return "ENTAILS" if self.decision else "DOES-NOT-ENTAIL"


def entails_quantum(
    alpha: Formula | str,
    beta: Formula | str,
    scheme: SchemeKind | str = SchemeKind.SUBTLE_MARKING,
    mode: str = "exact",
    shots: int = 1024,
    seed: int | None = None,
) -> EntailmentResult:
    """Decide alpha |= beta from a marking-scheme run over the violation set.

    Entailment is reported when the marking factor falls on the no-winner
    side of the scheme's threshold.
    """
    from .harness import expected_counts, sample_counts

    scheme = SchemeKind.parse(scheme)
    if scheme not in MARKING_SCHEMES:
        raise ValueError(f"entailment needs a marking scheme, got {scheme.value}")
    scn = violation_set(alpha, beta)
    reported = run_scheme(scheme, scn).reported
    if mode == "exact":
        counts = expected_counts(reported, shots)
    elif mode == "sampled":
        if seed is None:
            raise ValueError("sampled mode needs an explicit seed")
        counts = sample_counts(reported, shots, seed)
    else:
        raise ValueError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    threshold = THRESHOLDS[scheme]
    try:
        M = marking_factor(counts, scheme)
    except UndefinedMetricError:
        return EntailmentResult(None, None, counts, scheme, threshold, scn, mode)
    return EntailmentResult(bool(M < threshold), M, counts, scheme, threshold, scn, mode)
