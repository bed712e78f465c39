"""Minimal scalar expression language over chart coordinates.

Grammar (EBNF, also reproduced in the README):

    expr     = term { ("+" | "-") term } ;
    term     = factor { ("*" | "/") factor } ;
    factor   = "-" factor | power ;
    power    = atom [ "^" exponent ] ;
    exponent = [ "-" ] INTEGER ;
    atom     = NUMBER | VARIABLE | FUNCTION "(" expr ")" | "(" expr ")" ;

Variables are ``x1..xn`` (1-indexed); on tangent-bundle charts of dimension
2n the fibre coordinates ``u1..un`` are also accepted and map to slots
n+1..2n.  Functions: exp, log, sin, cos, sqrt, tanh.  ``+ - * /`` are
left-associative with the usual precedence; ``^`` takes an integer literal
exponent and binds tighter than unary minus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ContractViolation, EvalDomain, ExprSyntaxError
from .jets import Jet

FUNCTIONS = ("cos", "exp", "log", "sin", "sqrt", "tanh")

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[a-zA-Z_][a-zA-Z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


# -- AST --------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    index: int  # 0-based slot on the chart


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    offset: int


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, dim, bundle):
        self.tokens = tokens
        self.pos = 0
        self.dim = dim
        self.bundle = bundle

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text):
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ExprSyntaxError(f"expected {text!r}", tok.offset)
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {tok.text!r}", tok.offset)
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = Bin(op, node, self.factor())
        return node

    def factor(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self):
        node = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            node = Pow(node, self.exponent())
        return node

    def exponent(self):
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            sign = -1
            tok = self.peek()
        if tok.kind != "number" or any(c in tok.text for c in ".eE"):
            raise ExprSyntaxError("exponent must be an integer literal", tok.offset)
        self.advance()
        return sign * int(tok.text)

    def atom(self):
        tok = self.advance()
        if tok.kind == "number":
            return Const(float(tok.text))
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if tok.kind == "ident":
            if tok.text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(tok.text, arg)
            return self.variable(tok)
        raise ExprSyntaxError(f"unexpected {tok.text or 'end of input'!r}", tok.offset)

    def variable(self, tok):
        m = re.fullmatch(r"([xu])([1-9]\d*)", tok.text)
        if m is None:
            raise ExprSyntaxError(f"unknown identifier {tok.text!r}", tok.offset)
        kind, num = m.group(1), int(m.group(2))
        if kind == "u":
            if not self.bundle:
                raise ExprSyntaxError(
                    "fibre variables u1..un are only valid on bundle charts", tok.offset
                )
            half = self.dim // 2
            if num > half:
                raise ExprSyntaxError(
                    f"variable u{num} out of range for bundle dimension {self.dim}", tok.offset
                )
            return Var(tok.text, half + num - 1)
        n_base = self.dim // 2 if self.bundle else self.dim
        if num > n_base:
            raise ExprSyntaxError(
                f"variable x{num} out of range for dimension {n_base}", tok.offset
            )
        return Var(tok.text, num - 1)


def parse(text: str, dim: int, bundle: bool = False):
    """Parse ``text`` into an AST over an n-dimensional chart."""
    if bundle and dim % 2:
        raise ContractViolation("bundle charts have even dimension")
    return _Parser(_tokenize(text), dim, bundle).parse()


# -- printing ---------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "pow": 4, "atom": 5}


def _print(node, parent_prec):
    if isinstance(node, Const):
        text, prec = repr(node.value), _PREC["atom"]
        if node.value < 0:
            prec = _PREC["neg"]
    elif isinstance(node, Var):
        text, prec = node.name, _PREC["atom"]
    elif isinstance(node, Neg):
        text, prec = "-" + _print(node.arg, _PREC["neg"]), _PREC["neg"]
    elif isinstance(node, Pow):
        text = _print(node.base, _PREC["pow"] + 1) + "^" + str(node.exponent)
        prec = _PREC["pow"]
    elif isinstance(node, Call):
        text, prec = f"{node.func}({_print(node.arg, 0)})", _PREC["atom"]
    elif isinstance(node, Bin):
        prec = _PREC[node.op]
        left = _print(node.left, prec)
        # left-associative: right operand needs strictly higher precedence
        right = _print(node.right, prec + 1)
        text = f"{left}{node.op}{right}"
    else:
        raise ContractViolation(f"not an expression node: {node!r}")
    if prec < parent_prec:
        return f"({text})"
    return text


def to_text(node) -> str:
    """Render an AST to text that reparses to an equal AST."""
    return _print(node, 0)


# -- evaluation -------------------------------------------------------


def eval_jet(node, point, order: int) -> Jet:
    """Evaluate an AST as a jet at ``point`` (orders 0..3)."""
    point = tuple(float(x) for x in point)
    if not 0 <= order <= 3:
        raise ContractViolation(f"jet order must be in 0..3, got {order}")

    def ev(n):
        if isinstance(n, Const):
            return Jet.constant(n.value, len(point), order)
        if isinstance(n, Var):
            if n.index >= len(point):
                raise ContractViolation(
                    f"variable {n.name} needs dimension {n.index + 1}, point has {len(point)}"
                )
            if order == 0:
                return Jet.constant(point[n.index], len(point), 0)
            return Jet.seed(point, n.index, order)
        if isinstance(n, Neg):
            return -ev(n.arg)
        if isinstance(n, Pow):
            return ev(n.base).ipow(n.exponent)
        if isinstance(n, Call):
            return getattr(ev(n.arg), n.func)()
        if isinstance(n, Bin):
            a, b = ev(n.left), ev(n.right)
            if n.op == "+":
                return a + b
            if n.op == "-":
                return a - b
            if n.op == "*":
                return a * b
            return a / b
        raise ContractViolation(f"not an expression node: {n!r}")

    try:
        return ev(node)
    except EvalDomain as exc:
        if exc.point is None:
            raise EvalDomain(str(exc), point) from None
        raise
