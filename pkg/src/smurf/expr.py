"""A small arithmetic expression language for user-defined targets.

Grammar (precedence high to low, ^ is right-associative, the other binary
operators are left-associative)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME '(' expr (',' expr)* ')' | VAR | '(' expr ')'

Variables are x1, x2, ... (1-based).  Available functions: exp, log, sin,
cos, tan, tanh, sqrt, abs, cas, sigmoid, all unary.  Evaluation is
numpy-vectorized; there are no conditionals or loops.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ExpressionError
from .targets import TargetFunction, cas, normalize_target, sigmoid

FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "tanh": np.tanh,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "cas": cas,
    "sigmoid": sigmoid,
}

_NUMBER = re.compile(r"\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_VAR = re.compile(r"x([1-9]\d*)$")


@dataclass(frozen=True)
class Num:
    value: float

    def evaluate(self, pts):
        return np.full(np.asarray(pts).shape[:-1], self.value)

    def max_var(self):
        return 0


@dataclass(frozen=True)
class Var:
    index: int  # 0-based

    def evaluate(self, pts):
        return np.asarray(pts, dtype=float)[..., self.index]

    def max_var(self):
        return self.index + 1


@dataclass(frozen=True)
class Neg:
    operand: object

    def evaluate(self, pts):
        return -self.operand.evaluate(pts)

    def max_var(self):
        return self.operand.max_var()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def evaluate(self, pts):
        a = self.left.evaluate(pts)
        b = self.right.evaluate(pts)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        return np.power(a, b)

    def max_var(self):
        return max(self.left.max_var(), self.right.max_var())


@dataclass(frozen=True)
class Call:
    name: str
    arg: object

    def evaluate(self, pts):
        return FUNCTIONS[self.name](self.arg.evaluate(pts))

    def max_var(self):
        return self.arg.max_var()


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    pos: int


def _tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        m = _NUMBER.match(text, i)
        if m and m.start() == i:
            tokens.append(_Token("num", m.group(), i))
            i = m.end()
            continue
        m = _NAME.match(text, i)
        if m and m.start() == i:
            tokens.append(_Token("name", m.group(), i))
            i = m.end()
            continue
        if ch in "+-*/^(),":
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        raise ExpressionError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text):
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ExpressionError(f"expected {text!r}", tok.pos)
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExpressionError(f"unexpected {tok.text!r}", tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            node = BinOp("^", node, self.unary())
        return node

    def atom(self):
        tok = self.advance()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "name":
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "(":
                if tok.text not in FUNCTIONS:
                    raise ExpressionError(f"unknown function {tok.text!r}", tok.pos)
                self.advance()
                args = [self.expr()]
                while self.peek().kind == "op" and self.peek().text == ",":
                    self.advance()
                    args.append(self.expr())
                self.expect_op(")")
                if len(args) != 1:
                    raise ExpressionError(
                        f"function {tok.text!r} takes 1 argument, got {len(args)}", tok.pos)
                return Call(tok.text, args[0])
            m = _VAR.match(tok.text)
            if m:
                return Var(int(m.group(1)) - 1)
            raise ExpressionError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionError(
            f"unexpected {(tok.text or 'end of input')!r}", tok.pos)


def parse_expression(text: str):
    """Parse to an AST; raises :class:`ExpressionError` with a position."""
    if not text or not text.strip():
        raise ExpressionError("empty expression", 0)
    return _Parser(text).parse()


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_text(node, parent_prec: int = 0) -> str:
    """Canonical rendering; ``to_text(parse(to_text(n)))`` is a fixed point."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Call):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand, _PRECEDENCE["neg"])
        text = f"-{inner}"
        return f"({text})" if parent_prec > _PRECEDENCE["neg"] else text
    prec = _PRECEDENCE[node.op]
    # Left-associative operators need parens on an equal-precedence right
    # child; right-associative ^ is the mirror case.
    if node.op == "^":
        left = to_text(node.left, prec + 1)
        right = to_text(node.right, prec)
    else:
        left = to_text(node.left, prec)
        right = to_text(node.right, prec + 1)
    text = f"{left} {node.op} {right}"
    return f"({text})" if parent_prec > prec else text


def expression_target(text: str, arity: int | None = None, input_boxes=None,
                      output_box=None, name: str | None = None) -> TargetFunction:
    """Build a target from an expression.

    Without boxes the expression is taken literally on the unit hypercube;
    with boxes it is treated as a raw function and wrapped through affine
    maps (``output_box`` may be "auto").
    """
    ast = parse_expression(text)
    used = ast.max_var()
    if arity is None:
        arity = max(used, 1)
    elif arity < used:
        raise ExpressionError(
            f"expression uses x{used} but the declared arity is {arity}")
    canonical = to_text(ast)
    name = name or f"expr:{canonical}"

    def fn(pts):
        pts = np.asarray(pts, dtype=float)
        return ast.evaluate(pts)

    if input_boxes is None and output_box is None:
        return TargetFunction(name=name, arity=arity, fn=fn, expression=canonical)
    if input_boxes is None:
        input_boxes = [(0.0, 1.0)] * arity
    if len(input_boxes) != arity:
        raise ExpressionError(
            f"need {arity} input boxes, got {len(input_boxes)}")
    return normalize_target(
        fn, input_boxes, output_box if output_box is not None else "auto",
        name=name, expression=canonical)
