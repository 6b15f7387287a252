"""PCTL formula ASTs, a concrete-syntax parser, and normalization helpers.

State formulas are boolean combinations of named atomic propositions plus
probability operators over path formulas (next, bounded until, unbounded
until).  The eventually operators are syntactic sugar and are rewritten by
:func:`desugar` before evaluation.

Concrete syntax (whitespace-insensitive)::

    state  := "true" | "false" | IDENT | "!" state | "(" state ")"
            | state "&" state | state "|" state | state "->" state
            | "P" REL PROB "[" path "]"
    path   := "X" state | state "U" state | state "U<=" INT state
            | "F" state | "F<=" INT state
    REL    := "<" | "<=" | ">" | ">="

``!`` binds tightest, then ``&``, then ``|``, then ``->`` (right-associative).
``true``, ``false``, ``P``, ``X``, ``F`` and ``U`` are reserved words and
cannot be used as atom identifiers.  Probability literals must lie in [0, 1]
and until bounds must be nonnegative integers; violations raise
:class:`FormulaSyntaxError`, never a silent clamp.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Atom",
    "And",
    "BoundedEventually",
    "BoundedUntil",
    "Eventually",
    "FalseFormula",
    "FormulaSyntaxError",
    "Implies",
    "Next",
    "Not",
    "Or",
    "PathFormula",
    "Prob",
    "StateFormula",
    "TrueFormula",
    "Until",
    "atom_names",
    "desugar",
    "parse",
    "pretty",
]

RELATIONS = ("<", "<=", ">", ">=")
RESERVED_WORDS = frozenset({"true", "false", "P", "X", "F", "U"})


class FormulaSyntaxError(ValueError):
    """Malformed formula text; carries the byte offset and expected tokens."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected " + ", ".join(sorted(expected)) + ")"
        super().__init__(detail)
        self.offset = offset
        self.expected = frozenset(expected)


# ---------------------------------------------------------------------------
# AST nodes.  All nodes are immutable and compare structurally, so formulas
# can be used as dict keys and round-tripped through the pretty-printer.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrueFormula:
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class FalseFormula:
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", self.name):
            raise ValueError(f"invalid atom identifier: {self.name!r}")
        if self.name in RESERVED_WORDS:
            raise ValueError(f"reserved word used as atom: {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    child: "StateFormula"

    def __str__(self) -> str:
        return f"!{self.child}"


@dataclass(frozen=True)
class And:
    left: "StateFormula"
    right: "StateFormula"

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or:
    left: "StateFormula"
    right: "StateFormula"

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Implies:
    left: "StateFormula"
    right: "StateFormula"

    def __str__(self) -> str:
        return f"({self.left} -> {self.right})"


@dataclass(frozen=True)
class Prob:
    """Probability operator: the path formula holds with probability ~ p."""

    rel: str
    p: float
    path: "PathFormula"

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {self.rel!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability bound must lie in [0, 1], got {self.p!r}")

    def __str__(self) -> str:
        return f"P{self.rel}{self.p!r}[{self.path}]"


@dataclass(frozen=True)
class Next:
    child: "StateFormula"

    def __str__(self) -> str:
        return f"X {self.child}"


@dataclass(frozen=True)
class BoundedUntil:
    left: "StateFormula"
    bound: int
    right: "StateFormula"

    def __post_init__(self):
        if not isinstance(self.bound, int) or self.bound < 0:
            raise ValueError(f"until bound must be a nonnegative integer, got {self.bound!r}")

    def __str__(self) -> str:
        return f"{self.left} U<={self.bound} {self.right}"


@dataclass(frozen=True)
class Until:
    left: "StateFormula"
    right: "StateFormula"

    def __str__(self) -> str:
        return f"{self.left} U {self.right}"


@dataclass(frozen=True)
class BoundedEventually:
    bound: int
    child: "StateFormula"

    def __post_init__(self):
        if not isinstance(self.bound, int) or self.bound < 0:
            raise ValueError(f"eventually bound must be a nonnegative integer, got {self.bound!r}")

    def __str__(self) -> str:
        return f"F<={self.bound} {self.child}"


@dataclass(frozen=True)
class Eventually:
    child: "StateFormula"

    def __str__(self) -> str:
        return f"F {self.child}"


StateFormula = Union[TrueFormula, FalseFormula, Atom, Not, And, Or, Implies, Prob]
PathFormula = Union[Next, BoundedUntil, Until, BoundedEventually, Eventually]


def pretty(f: StateFormula | PathFormula) -> str:
    """Canonical fully-parenthesized text form; ``parse(pretty(f)) == f``."""
    return str(f)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>\d+\.?\d*|\.\d+)
  | (?P<punct><=|>=|->|[<>&|!()\[\]-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        value = m.group()
        if m.lastgroup == "word":
            kind = value if value in RESERVED_WORDS else "ident"
        elif m.lastgroup == "number":
            kind = "number"
        else:
            kind = value
        tokens.append(_Token(kind, value, m.start()))
    tokens.append(_Token("end", "", len(text)))
    return tokens


# ---------------------------------------------------------------------------
# Recursive-descent parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.current
        if tok.kind != kind:
            raise FormulaSyntaxError(
                f"unexpected token {tok.text or '<end>'!r}", tok.offset, (kind,)
            )
        return self.advance()

    # state := implies-chain over | over & over !/primary
    def parse_state(self) -> StateFormula:
        left = self.parse_or()
        if self.current.kind == "->":
            self.advance()
            right = self.parse_state()  # right-associative
            return Implies(left, right)
        return left

    def parse_or(self) -> StateFormula:
        node = self.parse_and()
        while self.current.kind == "|":
            self.advance()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> StateFormula:
        node = self.parse_unary()
        while self.current.kind == "&":
            self.advance()
            node = And(node, self.parse_unary())
        return node

    def parse_unary(self) -> StateFormula:
        if self.current.kind == "!":
            self.advance()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> StateFormula:
        tok = self.current
        if tok.kind == "true":
            self.advance()
            return TrueFormula()
        if tok.kind == "false":
            self.advance()
            return FalseFormula()
        if tok.kind == "ident":
            self.advance()
            return Atom(tok.text)
        if tok.kind == "(":
            self.advance()
            node = self.parse_state()
            self.expect(")")
            return node
        if tok.kind == "P":
            self.advance()
            return self.parse_prob()
        raise FormulaSyntaxError(
            f"unexpected token {tok.text or '<end>'!r}",
            tok.offset,
            ("true", "false", "identifier", "!", "(", "P"),
        )

    def parse_prob(self) -> Prob:
        tok = self.current
        if tok.kind not in RELATIONS:
            raise FormulaSyntaxError(
                f"unexpected token {tok.text or '<end>'!r}", tok.offset, RELATIONS
            )
        rel = self.advance().text
        p = self.parse_probability()
        self.expect("[")
        path = self.parse_path()
        self.expect("]")
        return Prob(rel, p, path)

    def parse_probability(self) -> float:
        tok = self.current
        if tok.kind == "-":
            raise FormulaSyntaxError("probability literal outside [0, 1]", tok.offset)
        if tok.kind != "number":
            raise FormulaSyntaxError(
                f"unexpected token {tok.text or '<end>'!r}", tok.offset, ("probability",)
            )
        self.advance()
        value = float(tok.text)
        if value > 1.0:
            raise FormulaSyntaxError("probability literal outside [0, 1]", tok.offset)
        return value

    def parse_path(self) -> PathFormula:
        tok = self.current
        if tok.kind == "X":
            self.advance()
            return Next(self.parse_state())
        if tok.kind == "F":
            self.advance()
            if self.current.kind == "<=":
                self.advance()
                bound = self.parse_bound()
                return BoundedEventually(bound, self.parse_state())
            return Eventually(self.parse_state())
        left = self.parse_state()
        self.expect("U")
        if self.current.kind == "<=":
            self.advance()
            bound = self.parse_bound()
            return BoundedUntil(left, bound, self.parse_state())
        return Until(left, self.parse_state())

    def parse_bound(self) -> int:
        tok = self.current
        if tok.kind == "-":
            raise FormulaSyntaxError("bound must be a nonnegative integer", tok.offset)
        if tok.kind != "number":
            raise FormulaSyntaxError(
                f"unexpected token {tok.text or '<end>'!r}", tok.offset, ("integer",)
            )
        if not tok.text.isdigit():
            raise FormulaSyntaxError("bound must be a nonnegative integer", tok.offset)
        self.advance()
        return int(tok.text)


def parse(text: str) -> StateFormula:
    """Parse formula text into its unique AST under the stated precedence."""
    parser = _Parser(text)
    node = parser.parse_state()
    tok = parser.current
    if tok.kind != "end":
        raise FormulaSyntaxError(f"trailing input {tok.text!r}", tok.offset, ("end of input",))
    return node


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def desugar(f: StateFormula) -> StateFormula:
    """Rewrite eventually operators: F q becomes true U q, F<=k q becomes true U<=k q.

    Boolean connectives (including | and ->) are kept as-is since they have
    direct set semantics.  Idempotent.
    """
    if isinstance(f, (TrueFormula, FalseFormula, Atom)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.child))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Or(desugar(f.left), desugar(f.right))
    if isinstance(f, Implies):
        return Implies(desugar(f.left), desugar(f.right))
    if isinstance(f, Prob):
        return Prob(f.rel, f.p, _desugar_path(f.path))
    raise TypeError(f"not a state formula: {f!r}")


def _desugar_path(pf: PathFormula) -> PathFormula:
    if isinstance(pf, Next):
        return Next(desugar(pf.child))
    if isinstance(pf, BoundedUntil):
        return BoundedUntil(desugar(pf.left), pf.bound, desugar(pf.right))
    if isinstance(pf, Until):
        return Until(desugar(pf.left), desugar(pf.right))
    if isinstance(pf, BoundedEventually):
        return BoundedUntil(TrueFormula(), pf.bound, desugar(pf.child))
    if isinstance(pf, Eventually):
        return Until(TrueFormula(), desugar(pf.child))
    raise TypeError(f"not a path formula: {pf!r}")


def atom_names(f: StateFormula | PathFormula) -> set[str]:
    """All atom identifiers occurring in f, including inside path formulas."""
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, (TrueFormula, FalseFormula)):
        return set()
    if isinstance(f, (Not, Next, Eventually, BoundedEventually)):
        return atom_names(f.child)
    if isinstance(f, (And, Or, Implies, Until)):
        return atom_names(f.left) | atom_names(f.right)
    if isinstance(f, BoundedUntil):
        return atom_names(f.left) | atom_names(f.right)
    if isinstance(f, Prob):
        return atom_names(f.path)
    raise TypeError(f"not a formula: {f!r}")
