"""A tiny 1-D expression language for defining mappings from text.

Grammar::

    expr    := term (('+'|'-') term)*
    term    := factor (('*'|'/') factor)*
    factor  := '-' factor | NUMBER | 'x' | '(' expr ')' | call
    call    := ('abs'|'min'|'max'|'piecewise') '(' args ')'
    piecewise args := cmp ',' expr ',' expr
    cmp     := expr ('<'|'<='|'=='|'>='|'>') expr

``piecewise(cmp, a, b)`` evaluates to ``a`` when ``cmp`` holds and ``b``
otherwise. Comparisons use plain IEEE semantics with no tolerance.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import EvaluationError, ParseError, UnknownIdentifierError


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: Node


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Call:
    name: str  # abs | min | max
    args: tuple[Node, ...]


@dataclass(frozen=True)
class Compare:
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Piecewise:
    cond: Compare
    then: Node
    otherwise: Node


Node = Union[Const, Var, Neg, BinOp, Call, Piecewise]

_ARITY = {"abs": 1, "min": 2, "max": 2}
_BINARY = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}
_COMPARE = {"<": operator.lt, "<=": operator.le, "==": operator.eq, ">=": operator.ge, ">": operator.gt}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|==|[-+*/(),<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | end
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError("unexpected character", pos, src[pos])
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind != "op":
            self.fail(f"expected {text!r}")
        self.i += 1

    def fail(self, message: str):
        t = self.tok
        if t.kind == "end":
            raise ParseError(f"{message}, got end of input", t.pos)
        raise ParseError(message, t.pos, t.text)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("unexpected token")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.take().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        t = self.tok
        if t.kind == "op" and t.text == "-":
            self.take()
            return Neg(self.factor())
        if t.kind == "number":
            self.take()
            return Const(float(t.text))
        if t.kind == "op" and t.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            return self.name()
        self.fail("expected a number, 'x', '(' or a function call")

    def name(self) -> Node:
        t = self.take()
        if t.text == "x":
            return Var()
        if t.text == "piecewise":
            self.expect("(")
            cond = self.compare()
            self.expect(",")
            then = self.expr()
            self.expect(",")
            otherwise = self.expr()
            self.expect(")")
            return Piecewise(cond, then, otherwise)
        if t.text in _ARITY:
            self.expect("(")
            args = [self.expr()]
            while self.tok.kind == "op" and self.tok.text == ",":
                self.take()
                args.append(self.expr())
            self.expect(")")
            if len(args) != _ARITY[t.text]:
                raise ParseError(f"{t.text} takes {_ARITY[t.text]} argument(s), got {len(args)}", t.pos, t.text)
            return Call(t.text, tuple(args))
        raise UnknownIdentifierError("unknown identifier", t.pos, t.text)

    def compare(self) -> Compare:
        left = self.expr()
        if self.tok.kind != "op" or self.tok.text not in _COMPARE:
            self.fail("expected a comparison operator")
        op = self.take().text
        return Compare(op, left, self.expr())


def parse_expression(src: str) -> Node:
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    return _Parser(src).parse()


def parse_condition(src: str) -> Compare:
    """Parse a bare comparison such as ``x < 1`` (used as a piecewise guard)."""
    p = _Parser(src)
    cond = p.compare()
    if p.tok.kind != "end":
        p.fail("unexpected token")
    return cond


def evaluate_ast(node: Node, x: float) -> float:
    t = type(node)
    if t is Var:
        return x
    if t is Const:
        return node.value
    if t is BinOp:
        a = evaluate_ast(node.left, x)
        b = evaluate_ast(node.right, x)
        if node.op == "/" and b == 0.0:
            raise EvaluationError(f"division by zero at x={x!r}")
        return _BINARY[node.op](a, b)
    if t is Neg:
        return -evaluate_ast(node.operand, x)
    if t is Call:
        args = [evaluate_ast(a, x) for a in node.args]
        if node.name == "abs":
            return abs(args[0])
        return min(args) if node.name == "min" else max(args)
    if t is Piecewise:
        branch = node.then if holds(node.cond, x) else node.otherwise
        return evaluate_ast(branch, x)
    raise TypeError(f"not an expression node: {node!r}")


def holds(cond: Compare, x: float) -> bool:
    return _COMPARE[cond.op](evaluate_ast(cond.left, x), evaluate_ast(cond.right, x))


def pretty(node: Node | Compare) -> str:
    """Fully parenthesised source that parses back to ``node``."""
    t = type(node)
    if t is Var:
        return "x"
    if t is Const:
        return repr(node.value)
    if t is Neg:
        return f"-({pretty(node.operand)})"
    if t is BinOp:
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    if t is Compare:
        return f"{pretty(node.left)} {node.op} {pretty(node.right)}"
    if t is Call:
        return f"{node.name}({', '.join(pretty(a) for a in node.args)})"
    if t is Piecewise:
        return f"piecewise({pretty(node.cond)}, {pretty(node.then)}, {pretty(node.otherwise)})"
    raise TypeError(f"not an expression node: {node!r}")


def _div(a: float, b: float) -> float:
    if b == 0.0:
        raise EvaluationError(f"division by zero ({a!r} / 0)")
    return a / b


def _source(node: Node | Compare) -> str:
    t = type(node)
    if t is Var:
        return "x"
    if t is Const:
        return repr(node.value)
    if t is Neg:
        return f"(-{_source(node.operand)})"
    if t is BinOp:
        if node.op == "/":
            return f"_div({_source(node.left)}, {_source(node.right)})"
        return f"({_source(node.left)} {node.op} {_source(node.right)})"
    if t is Compare:
        return f"({_source(node.left)} {node.op} {_source(node.right)})"
    if t is Call:
        return f"{node.name}({', '.join(_source(a) for a in node.args)})"
    if t is Piecewise:
        return f"({_source(node.then)} if {_source(node.cond)} else {_source(node.otherwise)})"
    raise TypeError(f"not an expression node: {node!r}")


def compile_ast(node: Node) -> Callable[[float], float]:
    """Turn a parsed tree into a plain Python function of ``x``.

    Generated only from validated nodes, so the source contains nothing but
    float literals, ``x`` and the operators of the grammar.
    """
    namespace = {"_div": _div, "abs": abs, "min": min, "max": max}
    return eval(f"lambda x: {_source(node)}", namespace)
