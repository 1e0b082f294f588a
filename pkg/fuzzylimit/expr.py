"""
Expression module for fuzzy functions.

Univariate expressions whose constants are fuzzy numbers: AST node types, a
regex tokenizer, a recursive-descent parser, a fully parenthesizing printer
and a scalar evaluator used as an oracle.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``*`` and ``/``)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' INT)*            right-associative
    primary := NUMBER | '(' a ',' b ',' c ')' | IDENT | FUNC '(' expr ')'
             | '(' expr ')' | '{' branch (';' branch)* '}'
    branch  := expr 'if' expr ('<' | '>' | '==') constant
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Union

from fuzzylimit.config import AlphaGridConfig
from fuzzylimit.exceptions import (
    DivisionByZeroIntervalError,
    DomainViolationError,
    LexError,
    ParseError,
    PreconditionError,
    ValidationError,
)
from fuzzylimit.fuzzy import FuzzyKind, FuzzyNumber, from_singleton, from_triangular

logger = logging.getLogger(__name__)

FUNCTIONS = ("exp", "sin", "abs", "sqrt")
KEYWORDS = ("if",)


# ============================================================================
# AST
# ============================================================================


class Comparison(str, Enum):
    LT = "<"
    GT = ">"
    EQ = "=="


@dataclass(frozen=True)
class Var:
    name: str = "x"


@dataclass(frozen=True)
class Const:
    value: FuzzyNumber


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class PowInt:
    base: "Expr"
    exponent: int

    def __post_init__(self) -> None:
        if self.exponent < 0:
            raise PreconditionError(f"integer power needs a nonnegative exponent, got {self.exponent}")


@dataclass(frozen=True)
class Unary:
    func: str
    operand: "Expr"

    def __post_init__(self) -> None:
        if self.func not in FUNCTIONS:
            raise PreconditionError(f"unknown function {self.func!r}")


@dataclass(frozen=True)
class Guard:
    """Branch condition ``subject op bound``; the subject is the variable unless substituted."""

    op: Comparison
    bound: FuzzyNumber
    subject: "Expr" = field(default_factory=Var)


@dataclass(frozen=True)
class Piecewise:
    branches: tuple[tuple[Guard, "Expr"], ...]


Expr = Union[Var, Const, Neg, Add, Sub, Mul, Div, PowInt, Unary, Piecewise]
BINARY_NODES = (Add, Sub, Mul, Div)
_SYMBOLS = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def children(e: Expr) -> list[Expr]:
    """Direct sub-expressions, guard subjects included."""
    if isinstance(e, BINARY_NODES):
        return [e.left, e.right]
    if isinstance(e, (Neg, Unary)):
        return [e.operand]
    if isinstance(e, PowInt):
        return [e.base]
    if isinstance(e, Piecewise):
        nodes: list[Expr] = []
        for guard, branch in e.branches:
            nodes.extend([guard.subject, branch])
        return nodes
    return []


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    yield e
    for child in children(e):
        yield from walk(child)


def variable_name(e: Expr) -> Optional[str]:
    """Name of the variable the expression uses, or None for constant expressions."""
    for node in walk(e):
        if isinstance(node, Var):
            return node.name
    return None


# ============================================================================
# Tokenizer
# ============================================================================


class TokenKind(str, Enum):
    NUMBER = "number"
    TRIANGLE = "triangular literal"
    IDENT = "identifier"
    IF = "'if'"
    PLUS = "'+'"
    MINUS = "'-'"
    STAR = "'*'"
    SLASH = "'/'"
    CARET = "'^'"
    LPAREN = "'('"
    RPAREN = "')'"
    LBRACE = "'{'"
    RBRACE = "'}'"
    SEMI = "';'"
    COMMA = "','"
    LT = "'<'"
    GT = "'>'"
    EQ = "'=='"
    END = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    position: int
    value: object = None


_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_RATIONAL = rf"-?{_NUMBER}(?:\s*/\s*{_NUMBER})?"
_TOKEN_RE = re.compile(
    rf"""
    (?P<space>\s+)
  | (?P<triangle>\(\s*(?P<a>{_RATIONAL})\s*,\s*(?P<b>{_RATIONAL})\s*,\s*(?P<c>{_RATIONAL})\s*\))
  | (?P<number>{_NUMBER})
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<eq>==)
  | (?P<op>[-+*/^(){{}};,<>])
    """,
    re.VERBOSE,
)
_OPERATORS = {
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "/": TokenKind.SLASH,
    "^": TokenKind.CARET,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "{": TokenKind.LBRACE,
    "}": TokenKind.RBRACE,
    ";": TokenKind.SEMI,
    ",": TokenKind.COMMA,
    "<": TokenKind.LT,
    ">": TokenKind.GT,
}


def _rational(text: str) -> float:
    """Exact rational (or decimal) literal converted once to binary floating point."""
    numerator, _, denominator = text.replace(" ", "").partition("/")
    value = Fraction(numerator)
    if denominator:
        value /= Fraction(denominator)
    return float(value)


def tokenize(src: str) -> list[Token]:
    """Split expression text into tokens.

    Raises:
        LexError: On a character that starts no token or a literal outside the
            floating point range
    """
    tokens: list[Token] = []
    position = 0
    while position < len(src):
        match = _TOKEN_RE.match(src, position)
        if match is None:
            offset = len(src[:position].encode("utf-8"))
            raise LexError(f"unexpected character {src[position]!r} at offset {offset}", position, src)
        kind = match.lastgroup
        text = match.group(0)
        if kind == "triangle":
            try:
                points = tuple(_rational(match.group(name)) for name in "abc")
            except ZeroDivisionError:
                raise LexError("zero denominator in triangular literal", position, src)
            except OverflowError:
                raise LexError(f"triangular literal {text!r} is out of range", position, src)
            tokens.append(Token(TokenKind.TRIANGLE, text, position, points))
        elif kind == "number":
            value = float(text)
            if not math.isfinite(value):
                raise LexError(f"number {text!r} is out of range", position, src)
            tokens.append(Token(TokenKind.NUMBER, text, position, value))
        elif kind == "ident":
            token_kind = TokenKind.IF if text in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(token_kind, text, position, text))
        elif kind == "eq":
            tokens.append(Token(TokenKind.EQ, text, position))
        elif kind == "op":
            tokens.append(Token(_OPERATORS[text], text, position))
        position = match.end()
    return tokens


# ============================================================================
# Parser
# ============================================================================


_COMPARISONS = {TokenKind.LT: Comparison.LT, TokenKind.GT: Comparison.GT, TokenKind.EQ: Comparison.EQ}
_OPERAND_START = {
    TokenKind.NUMBER,
    TokenKind.TRIANGLE,
    TokenKind.IDENT,
    TokenKind.LPAREN,
    TokenKind.LBRACE,
    TokenKind.MINUS,
}


class Parser:
    """Recursive-descent parser over a token list.

    Number literals become singleton constants and triangular literals become
    triangular constants on ``grid``. An expression may use one variable name.
    """

    def __init__(self, tokens: list[Token], source: str = "", grid: Optional[AlphaGridConfig] = None):
        self.source = source
        self.grid = grid
        end = len(source) if source else (tokens[-1].position + len(tokens[-1].text) if tokens else 0)
        self.tokens = list(tokens) + [Token(TokenKind.END, "", end)]
        self.pos = 0
        self.variable: Optional[str] = None

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, expected: set[str]) -> ParseError:
        limit = max(len(self.source) - 1, 0)
        position = min(self.current.position, limit)
        return ParseError(message, position, self.source, expected)

    def eat(self, kind: TokenKind) -> Token:
        token = self.current
        if token.kind is not kind:
            raise self.error(f"expected {kind.value}, got {self._describe(token)}", {kind.value})
        self.pos += 1
        return token

    @staticmethod
    def _describe(token: Token) -> str:
        return token.kind.value if token.kind is TokenKind.END else repr(token.text)

    def parse(self) -> Expr:
        node = self.expr()
        if self.current.kind is not TokenKind.END:
            expected = {"'+'", "'-'", "'*'", "'/'", "'^'", TokenKind.END.value}
            raise self.error(f"unexpected {self._describe(self.current)}", expected)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.current.kind in (TokenKind.PLUS, TokenKind.MINUS):
            op = self.eat(self.current.kind)
            right = self.term()
            node = Add(node, right) if op.kind is TokenKind.PLUS else Sub(node, right)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.current.kind in (TokenKind.STAR, TokenKind.SLASH):
            op = self.eat(self.current.kind)
            right = self.unary()
            node = Mul(node, right) if op.kind is TokenKind.STAR else Div(node, right)
        return node

    def unary(self) -> Expr:
        if self.current.kind is TokenKind.MINUS:
            self.eat(TokenKind.MINUS)
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        exponents: list[int] = []
        while self.current.kind is TokenKind.CARET:
            self.eat(TokenKind.CARET)
            token = self.current
            if token.kind is not TokenKind.NUMBER or not float(token.value).is_integer():
                raise self.error("exponent must be a nonnegative integer literal", {"integer"})
            self.eat(TokenKind.NUMBER)
            exponents.append(int(token.value))
        if not exponents:
            return base
        exponent = exponents[-1]
        for value in reversed(exponents[:-1]):
            exponent = value**exponent
        return PowInt(base, exponent)

    def primary(self) -> Expr:
        token = self.current
        if token.kind is TokenKind.NUMBER:
            self.eat(TokenKind.NUMBER)
            return Const(from_singleton(token.value, self.grid))
        if token.kind is TokenKind.TRIANGLE:
            return Const(self.triangle())
        if token.kind is TokenKind.IDENT:
            return self.identifier()
        if token.kind is TokenKind.LPAREN:
            self.eat(TokenKind.LPAREN)
            node = self.expr()
            self.eat(TokenKind.RPAREN)
            return node
        if token.kind is TokenKind.LBRACE:
            return self.piecewise()
        expected = {kind.value for kind in _OPERAND_START}
        raise self.error(f"expected operand, got {self._describe(token)}", expected)

    def triangle(self) -> FuzzyNumber:
        token = self.eat(TokenKind.TRIANGLE)
        a, b, c = token.value
        try:
            return from_triangular(a, b, c, self.grid)
        except ValidationError as e:
            raise ParseError(f"invalid triangular literal: {e}", token.position, self.source)

    def identifier(self) -> Expr:
        token = self.eat(TokenKind.IDENT)
        name = token.text
        if name in FUNCTIONS:
            self.eat(TokenKind.LPAREN)
            operand = self.expr()
            self.eat(TokenKind.RPAREN)
            return Unary(name, operand)
        if self.variable is None:
            self.variable = name
        elif name != self.variable:
            raise ParseError(
                f"expression already uses variable {self.variable!r}, got {name!r}",
                token.position,
                self.source,
                {repr(self.variable)},
            )
        return Var(name)

    def constant(self) -> FuzzyNumber:
        token = self.current
        if token.kind is TokenKind.TRIANGLE:
            return self.triangle()
        sign = 1.0
        if token.kind is TokenKind.MINUS:
            self.eat(TokenKind.MINUS)
            sign = -1.0
        if self.current.kind is not TokenKind.NUMBER:
            raise self.error("guard bound must be a constant", {"number", "triangular literal"})
        return from_singleton(sign * self.eat(TokenKind.NUMBER).value, self.grid)

    def piecewise(self) -> Piecewise:
        start = self.eat(TokenKind.LBRACE)
        branches = [self.branch()]
        while self.current.kind is TokenKind.SEMI:
            self.eat(TokenKind.SEMI)
            branches.append(self.branch())
        self.eat(TokenKind.RBRACE)
        _check_disjoint([guard for guard, _ in branches], start.position, self.source)
        return Piecewise(tuple(branches))

    def branch(self) -> tuple[Guard, Expr]:
        value = self.expr()
        self.eat(TokenKind.IF)
        subject = self.expr()
        op = _COMPARISONS.get(self.current.kind)
        if op is None:
            raise self.error("expected comparison", {"'<'", "'>'", "'=='"})
        self.eat(self.current.kind)
        return Guard(op, self.constant(), subject), value


def _check_disjoint(guards: list[Guard], position: int, source: str) -> None:
    """Reject guards on one subject that can hold together, judged at the bound cores."""
    for i, first in enumerate(guards):
        for second in guards[i + 1 :]:
            if first.subject != second.subject:
                continue
            if _overlap(first, second):
                raise ParseError(
                    f"piecewise guards '{first.op.value} {_const_text(first.bound)}' and "
                    f"'{second.op.value} {_const_text(second.bound)}' overlap",
                    position,
                    source,
                )


def _overlap(first: Guard, second: Guard) -> bool:
    a, b = first.bound.core.midpoint, second.bound.core.midpoint
    ops = {first.op, second.op}
    if first.op is second.op:
        return first.op is not Comparison.EQ or a == b
    if ops == {Comparison.LT, Comparison.GT}:
        lt, gt = (a, b) if first.op is Comparison.LT else (b, a)
        return gt < lt
    eq, other = (first, second) if first.op is Comparison.EQ else (second, first)
    point, edge = eq.bound.core.midpoint, other.bound.core.midpoint
    return point < edge if other.op is Comparison.LT else point > edge


def parse(src: str | list[Token], grid: Optional[AlphaGridConfig] = None) -> Expr:
    """Parse expression text (or a token list) into an AST.

    Raises:
        LexError: On an unknown character
        ParseError: On a syntax error, with the expected-token set

    Example:
        >>> parse("(x^3 - 4)/(x^2 + 1)")
        Div(left=Sub(...), right=Add(...))
    """
    if isinstance(src, str):
        tokens, source = tokenize(src), src
    else:
        tokens, source = src, ""
    node = Parser(tokens, source, grid).parse()
    logger.debug("parsed %r", source)
    return node


# ============================================================================
# Printer
# ============================================================================


def _const_text(number: FuzzyNumber) -> str:
    if number.kind is FuzzyKind.SINGLETON:
        value = number.params[0]
        if value == 0:
            return "0.0"
        return repr(value) if value >= 0 else f"({value!r}, {value!r}, {value!r})"
    if number.kind is FuzzyKind.TRIANGULAR:
        a, b, c = number.params
        return f"({a!r}, {b!r}, {c!r})"
    raise PreconditionError("general α-cut stacks have no textual literal")


def to_text(e: Expr) -> str:
    """Fully parenthesized text that parses back to an equal tree."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Neg):
        return f"(-{to_text(e.operand)})"
    if isinstance(e, BINARY_NODES):
        return f"({to_text(e.left)} {_SYMBOLS[type(e)]} {to_text(e.right)})"
    if isinstance(e, PowInt):
        return f"({to_text(e.base)} ^ {e.exponent})"
    if isinstance(e, Unary):
        return f"{e.func}({to_text(e.operand)})"
    if isinstance(e, Piecewise):
        parts = [
            f"{to_text(value)} if {to_text(guard.subject)} {guard.op.value} {_const_text(guard.bound)}"
            for guard, value in e.branches
        ]
        return "{ " + " ; ".join(parts) + " }"
    raise PreconditionError(f"not an expression node: {e!r}")


# ============================================================================
# Scalar evaluation and rewriting
# ============================================================================


def _scalar_unary(func: str, value: float, node: Expr) -> float:
    if func == "exp":
        try:
            return math.exp(value)
        except OverflowError:
            return math.inf
    if func == "sin":
        return math.sin(value)
    if func == "abs":
        return abs(value)
    if value < 0:
        raise DomainViolationError(f"sqrt of negative value {value!r}", to_text(node))
    return math.sqrt(value)


def guard_holds_scalar(guard: Guard, value: float) -> bool:
    """Guard test for a crisp value against the bound's core midpoint."""
    bound = guard.bound.core.midpoint
    if guard.op is Comparison.LT:
        return value < bound
    if guard.op is Comparison.GT:
        return value > bound
    return value == bound


def eval_scalar(e: Expr, x: float) -> float:
    """Ordinary real evaluation; fuzzy constants collapse to their core midpoint.

    Raises:
        DivisionByZeroIntervalError: On a zero divisor
        DomainViolationError: On sqrt of a negative or when no piecewise branch applies
    """
    if isinstance(e, Var):
        return float(x)
    if isinstance(e, Const):
        return e.value.core.midpoint
    if isinstance(e, Neg):
        return -eval_scalar(e.operand, x)
    if isinstance(e, Add):
        return eval_scalar(e.left, x) + eval_scalar(e.right, x)
    if isinstance(e, Sub):
        return eval_scalar(e.left, x) - eval_scalar(e.right, x)
    if isinstance(e, Mul):
        return eval_scalar(e.left, x) * eval_scalar(e.right, x)
    if isinstance(e, Div):
        numerator, denominator = eval_scalar(e.left, x), eval_scalar(e.right, x)
        if denominator == 0.0:
            raise DivisionByZeroIntervalError("division by zero", to_text(e.right))
        return numerator / denominator
    if isinstance(e, PowInt):
        base = eval_scalar(e.base, x)
        result = 1.0
        for _ in range(e.exponent):
            result = result * base
        return result
    if isinstance(e, Unary):
        return _scalar_unary(e.func, eval_scalar(e.operand, x), e)
    if isinstance(e, Piecewise):
        for guard, value in e.branches:
            if guard_holds_scalar(guard, eval_scalar(guard.subject, x)):
                return eval_scalar(value, x)
        raise DomainViolationError(f"no piecewise branch applies at {x!r}", to_text(e))
    raise PreconditionError(f"not an expression node: {e!r}")


def substitute(f: Expr, g: Expr) -> Expr:
    """Replace every occurrence of the variable of ``f`` by ``g``."""
    if isinstance(f, Var):
        return g
    if isinstance(f, Const):
        return f
    if isinstance(f, Neg):
        return Neg(substitute(f.operand, g))
    if isinstance(f, BINARY_NODES):
        return type(f)(substitute(f.left, g), substitute(f.right, g))
    if isinstance(f, PowInt):
        return PowInt(substitute(f.base, g), f.exponent)
    if isinstance(f, Unary):
        return Unary(f.func, substitute(f.operand, g))
    if isinstance(f, Piecewise):
        return Piecewise(
            tuple(
                (Guard(guard.op, guard.bound, substitute(guard.subject, g)), substitute(value, g))
                for guard, value in f.branches
            )
        )
    raise PreconditionError(f"not an expression node: {f!r}")


# ============================================================================
# Vertex enumeration indices
# ============================================================================


class Indexing(str, Enum):
    """How vertex enumeration assigns endpoint indices to variable factors.

    POSITIONAL: the k-th factor of a variable power uses index k, and both
    operands of a binary node share indices (``(x^3 - 4)/(x^2 + 1)`` enumerates
    i, j, k as in ``(x_i x_j x_k - 4)/(x_i x_j + 1)``).
    OCCURRENCE: every variable factor gets a fresh index.

    Constants that are not crisp always get one fresh index per occurrence.
    """

    POSITIONAL = "positional"
    OCCURRENCE = "occurrence"


def positions(e: Expr) -> int:
    """Number of positional variable indices used by ``e``."""
    if isinstance(e, Var):
        return 1
    if isinstance(e, Const):
        return 0
    if isinstance(e, PowInt):
        return e.exponent * positions(e.base)
    return max((positions(child) for child in children(e)), default=0)


def _visits(e: Expr) -> tuple[int, int]:
    """(variable factors, fuzzy constant factors) with integer powers expanded."""
    if isinstance(e, Var):
        return 1, 0
    if isinstance(e, Const):
        return 0, int(not e.value.is_crisp)
    if isinstance(e, PowInt):
        variables, constants = _visits(e.base)
        return e.exponent * variables, e.exponent * constants
    variables = constants = 0
    for child in children(e):
        v, c = _visits(child)
        variables, constants = variables + v, constants + c
    return variables, constants


def count_indices(e: Expr, indexing: Indexing = Indexing.POSITIONAL) -> int:
    """Number of independent endpoint indices vertex enumeration of ``e`` needs."""
    variables, constants = _visits(e)
    if indexing is Indexing.POSITIONAL:
        return positions(e) + constants
    return variables + constants
