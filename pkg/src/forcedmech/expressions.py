"""Expression language for Lagrangians, force forms, schedules and observables.

Grammar (highest binding first)::

    primary := number | identifier | func '(' expr ')' | '(' expr ')'
    power   := primary ['^' unary]          # right-associative
    unary   := '-' unary | power
    term    := unary (('*' | '/') unary)*
    expr    := term (('+' | '-') term)*

Variables are positional: ``x1..xm`` (configuration), ``v1..vm`` (velocity),
``p1..pm`` (momentum, observables only) and ``t`` (time). Which of them are
legal depends on where the expression is used, see :func:`parse`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")

# kind letters usable in ``kinds``
STATE = "xv"
PHASE = "xp"
TIME = "t"


class ExpressionError(ValueError):
    """Base class for parse-time problems."""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class VariableIndexError(ExpressionError):
    def __init__(self, name: str, dim: int, offset: int):
        super().__init__(
            f"variable {name!r} at offset {offset} is out of range for dimension {dim}"
        )
        self.name = name
        self.offset = offset


class DomainError(ArithmeticError):
    """Raised at evaluation time; ``subexpression`` is the offending node as text."""

    def __init__(self, message: str, subexpression: str):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


# ---------------------------------------------------------------------------
# AST nodes
# ---------------------------------------------------------------------------


class Node:
    __slots__ = ()

    def children(self) -> tuple["Node", ...]:
        return ()


@dataclass(frozen=True, slots=True)
class Num(Node):
    value: float


@dataclass(frozen=True, slots=True)
class Param(Node):
    name: str


@dataclass(frozen=True, slots=True)
class Var(Node):
    kind: str  # 'x', 'v', 'p' or 't'
    index: int  # zero based; always 0 for 't'

    @property
    def label(self) -> str:
        return "t" if self.kind == "t" else f"{self.kind}{self.index + 1}"


@dataclass(frozen=True, slots=True)
class Neg(Node):
    arg: Node

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class BinOp(Node):
    op: str  # one of + - * /
    left: Node
    right: Node

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Pow(Node):
    base: Node
    exponent: Node  # constant: literals and params only

    def children(self):
        return (self.base, self.exponent)


@dataclass(frozen=True, slots=True)
class Func(Node):
    name: str
    arg: Node

    def children(self):
        return (self.arg,)


def walk(node: Node) -> Iterator[Node]:
    yield node
    for child in node.children():
        yield from walk(child)


def variables_of(node: Node) -> frozenset[Var]:
    return frozenset(n for n in walk(node) if isinstance(n, Var))


def is_constant(node: Node) -> bool:
    return not any(isinstance(n, Var) for n in walk(node))


# ---------------------------------------------------------------------------
# Expression wrapper
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Expression:
    """A parsed expression bound to a system dimension.

    Instances are immutable; ``_cache`` only memoizes compiled evaluators
    and never changes what an expression means.
    """

    root: Node
    dim: int
    kinds: str = STATE
    text: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def params(self) -> frozenset[str]:
        return frozenset(n.name for n in walk(self.root) if isinstance(n, Param))

    @property
    def variables(self) -> frozenset[Var]:
        return variables_of(self.root)

    def is_zero(self) -> bool:
        return isinstance(self.root, Num) and self.root.value == 0.0

    def __str__(self) -> str:
        return to_text(self.root)

    def __repr__(self) -> str:
        return f"Expression({to_text(self.root)!r}, dim={self.dim})"

    def with_root(self, root: Node) -> "Expression":
        return Expression(root, self.dim, self.kinds, to_text(root))


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_VARIABLE = re.compile(r"([xvp])(\d+)$")


@dataclass(frozen=True, slots=True)
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, dim, param_names, kinds):
        self.toks = _tokenize(text)
        self.i = 0
        self.dim = dim
        self.param_names = frozenset(param_names)
        self.kinds = kinds

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ExpressionSyntaxError(f"expected {text!r}, found {found!r}", self.tok.offset)
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return node

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok.text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.tok.text == "^":
            caret = self.take()
            exponent = self.unary()
            if not is_constant(exponent):
                raise ExpressionSyntaxError(
                    "exponent must be constant; write exp(y*ln(x)) for x^y", caret.offset
                )
            return Pow(base, exponent)
        return base

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            self.take()
            return Num(float(tok.text))
        if tok.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            self.take()
            return self.identifier(tok)
        found = tok.text or "end of input"
        raise ExpressionSyntaxError(f"unexpected {found!r}", tok.offset)

    def identifier(self, tok: _Tok) -> Node:
        name = tok.text
        if name in FUNCTIONS:
            if self.tok.text != "(":
                raise ExpressionSyntaxError(f"function {name!r} needs '('", self.tok.offset)
            self.take()
            arg = self.expr()
            self.expect(")")
            return Func(name, arg)
        if name in self.param_names:
            return Param(name)
        if name == "t" and "t" in self.kinds:
            return Var("t", 0)
        m = _VARIABLE.match(name)
        if m and m.group(1) in self.kinds:
            index = int(m.group(2))
            if not 1 <= index <= self.dim:
                raise VariableIndexError(name, self.dim, tok.offset)
            return Var(m.group(1), index - 1)
        raise UnknownIdentifierError(name, tok.offset)


def parse(
    text: str,
    dim: int,
    param_names: Iterable[str] = (),
    kinds: str = STATE,
) -> Expression:
    """Parse ``text`` into an :class:`Expression`.

    ``kinds`` lists the variable families allowed: ``"xv"`` for Lagrangians
    and force forms, ``"xp"`` for phase-space observables, ``"t"`` for
    schedules, variations and desired paths.
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    root = _Parser(text, dim, param_names, kinds).parse()
    return Expression(root, dim, kinds, text)


def constant(value: float, dim: int, kinds: str = STATE) -> Expression:
    return Expression(Num(float(value)), dim, kinds, repr(float(value)))


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG_PREC = 3
_POW_PREC = 4
_ATOM_PREC = 5


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    if isinstance(node, Pow):
        return _POW_PREC
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return _NEG_PREC
    return _ATOM_PREC


def _wrap(node: Node, need: bool) -> str:
    s = to_text(node)
    return f"({s})" if need else s


def to_text(node: Node) -> str:
    """Render ``node`` so that :func:`parse` rebuilds the same tree."""
    if isinstance(node, Num):
        if node.value < 0 or math.copysign(1.0, node.value) < 0:
            return f"-{repr(-node.value)}"
        return repr(node.value)
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Var):
        return node.label
    if isinstance(node, Func):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, _prec(node.arg) < _NEG_PREC)
    if isinstance(node, Pow):
        base = _wrap(node.base, _prec(node.base) <= _POW_PREC)
        return f"{base}^{_wrap(node.exponent, _prec(node.exponent) < _NEG_PREC)}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = _wrap(node.left, _prec(node.left) < p)
        right = _wrap(node.right, _prec(node.right) <= p)
        return f"{left} {node.op} {right}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Symbolic derivative (used to build nested Poisson brackets as trees)
# ---------------------------------------------------------------------------

ZERO = Num(0.0)
ONE = Num(1.0)


def _is_num(node: Node, value: float) -> bool:
    return isinstance(node, Num) and node.value == value


def add(a: Node, b: Node) -> Node:
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp("+", a, b)


def sub(a: Node, b: Node) -> Node:
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return Neg(b)
    return BinOp("-", a, b)


def mul(a: Node, b: Node) -> Node:
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return BinOp("*", a, b)


def div(a: Node, b: Node) -> Node:
    if _is_num(a, 0.0):
        return ZERO
    return BinOp("/", a, b)


def neg(a: Node) -> Node:
    if _is_num(a, 0.0):
        return ZERO
    return Neg(a)


def diff(node: Node, var: Var) -> Node:
    """Exact symbolic partial derivative of ``node`` with respect to ``var``.

    Only trivial zero/one folding is applied while building the result.
    """
    if isinstance(node, (Num, Param)):
        return ZERO
    if isinstance(node, Var):
        return ONE if node == var else ZERO
    if isinstance(node, Neg):
        return neg(diff(node.arg, var))
    if isinstance(node, BinOp):
        da, db = diff(node.left, var), diff(node.right, var)
        if node.op == "+":
            return add(da, db)
        if node.op == "-":
            return sub(da, db)
        if node.op == "*":
            return add(mul(da, node.right), mul(node.left, db))
        # (a/b)' = a'/b - a b' / b^2
        return sub(div(da, node.right), div(mul(node.left, db), Pow(node.right, Num(2.0))))
    if isinstance(node, Pow):
        db = diff(node.base, var)
        if _is_num(db, 0.0):
            return ZERO
        lowered = Pow(node.base, BinOp("-", node.exponent, ONE))
        return mul(mul(node.exponent, lowered), db)
    if isinstance(node, Func):
        da = diff(node.arg, var)
        if _is_num(da, 0.0):
            return ZERO
        u = node.arg
        outer = {
            "sin": lambda: Func("cos", u),
            "cos": lambda: Neg(Func("sin", u)),
            "exp": lambda: node,
            "ln": lambda: div(ONE, u),
            "sqrt": lambda: div(ONE, mul(Num(2.0), node)),
        }[node.name]()
        return mul(outer, da)
    raise TypeError(f"not an expression node: {node!r}")
