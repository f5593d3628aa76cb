"""
A small expression language for position-dependent couplings ``g(z)``.

Grammar (EBNF)::

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = "-" , unary | power ;
    power   = atom , [ "^" , unary ] ;
    atom    = number | "z" | func , "(" , expr , ")" | "(" , expr , ")" ;
    func    = "sin" | "cos" | "sech" | "tanh" | "exp" | "sqrt" | "abs" ;
    number  = digits , [ "." , digits ] , [ ("e" | "E") , [ "+" | "-" ] , digits ] ;

``^`` binds tighter than unary minus and is right associative, so
``-z^2`` is ``-(z^2)`` and ``2^3^2`` is ``2^(3^2)``. There is no symbolic
simplification: an AST evaluates exactly as written.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "sech": lambda x: 1.0 / np.cosh(x),
    "tanh": np.tanh,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
VARIABLE = "z"


class ExpressionError(ValueError):
    """Base class for parse and evaluation failures."""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, offset: int, text: str):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}: {text!r}")


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class ArityError(ExpressionSyntaxError):
    pass


class DomainError(ExpressionError):
    """Evaluation produced a non-finite or complex value."""

    def __init__(self, message: str, z=None):
        self.z = z
        super().__init__(message if z is None else f"{message} (z = {z!r})")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos), text)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(_Token("end", "", len(text.encode())))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode())


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, message: str, cls=ExpressionSyntaxError):
        return cls(message, self.tok.offset, self.text)

    def expect(self, text: str) -> None:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected token {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            if tok.text == VARIABLE:
                self.advance()
                return Var()
            if tok.text in FUNCTIONS:
                self.advance()
                if self.tok.text != "(":
                    raise self.error(f"function {tok.text!r} must be called with parentheses")
                self.advance()
                if self.tok.text == ")":
                    raise self.error(f"function {tok.text!r} takes exactly 1 argument, got 0", ArityError)
                arg = self.expr()
                if self.tok.text == ",":
                    raise self.error(f"function {tok.text!r} takes exactly 1 argument", ArityError)
                self.expect(")")
                return Call(tok.text, arg)
            raise UnknownIdentifierError(f"unknown identifier {tok.text!r}", tok.offset, self.text)
        if tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")


def parse_coupling(text: str) -> Node:
    """Parse coupling-expression text into an AST.

    Raises
    ------
    ExpressionSyntaxError
        With the byte offset of the offending token. Subclasses flag unknown
        identifiers and wrong function arity.
    """
    return _Parser(text).parse()


def to_text(node: Node) -> str:
    """Fully parenthesized text that reparses to an identical AST."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return VARIABLE
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({to_text(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node: Node, z):
    """Evaluate the AST at scalar or array ``z``.

    Raises
    ------
    DomainError
        If any value is non-finite (division by zero, overflow) or a square
        root receives a negative argument.
    """
    z_arr = np.asarray(z, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(node, z_arr)
    out = np.broadcast_to(out, z_arr.shape) if np.ndim(out) < z_arr.ndim else out
    bad = ~np.isfinite(out)
    if np.any(bad):
        where = z_arr[bad].ravel()[0] if z_arr.ndim else float(z_arr)
        raise DomainError("expression is not finite", where)
    return float(out) if np.ndim(out) == 0 else out


def _eval(node: Node, z: np.ndarray):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return z
    if isinstance(node, Neg):
        return -_eval(node.operand, z)
    if isinstance(node, Call):
        arg = _eval(node.arg, z)
        if node.name == "sqrt" and np.any(np.asarray(arg) < 0):
            bad = np.broadcast_to(np.asarray(arg) < 0, z.shape)
            raise DomainError("sqrt of a negative number", z[bad].ravel()[0] if z.ndim else float(z))
        return FUNCTIONS[node.name](arg)
    if isinstance(node, BinOp):
        left = _eval(node.left, z)
        right = _eval(node.right, z)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            return np.true_divide(left, right)
        if node.op == "^":
            out = np.power(np.asarray(left, dtype=float), right)
            return out
    raise TypeError(f"not an expression node: {node!r}")


def polynomial_degree(node: Node) -> int | None:
    """Degree in ``z`` if the AST is a polynomial, else ``None``.

    Polynomial means built from numbers, ``z``, ``+ - *``, unary minus,
    division by a constant and ``^`` with a constant non-negative integer
    exponent.
    """
    if isinstance(node, Num):
        return 0
    if isinstance(node, Var):
        return 1
    if isinstance(node, Neg):
        return polynomial_degree(node.operand)
    if isinstance(node, Call):
        return 0 if polynomial_degree(node.arg) == 0 else None
    if isinstance(node, BinOp):
        left = polynomial_degree(node.left)
        right = polynomial_degree(node.right)
        if left is None or right is None:
            return None
        if node.op in ("+", "-"):
            return max(left, right)
        if node.op == "*":
            return left + right
        if node.op == "/":
            return left if right == 0 else None
        if node.op == "^":
            if right != 0:
                return None
            exponent = evaluate(node.right, 0.0)
            if exponent < 0 or exponent != int(exponent):
                return None
            return left * int(exponent)
    return None


def evaluate_matrix(node: Node, z_op: np.ndarray) -> np.ndarray:
    """Exact matrix polynomial obtained by substituting ``z -> z_op``.

    Only valid for ASTs where :func:`polynomial_degree` is not ``None``.
    """
    if polynomial_degree(node) is None:
        raise ValueError("expression is not a polynomial in z")
    eye = np.eye(z_op.shape[0], dtype=complex)

    def rec(n: Node) -> np.ndarray:
        if polynomial_degree(n) == 0:
            return evaluate(n, 0.0) * eye
        if isinstance(n, Var):
            return np.asarray(z_op, dtype=complex)
        if isinstance(n, Neg):
            return -rec(n.operand)
        if isinstance(n, BinOp):
            if n.op == "+":
                return rec(n.left) + rec(n.right)
            if n.op == "-":
                return rec(n.left) - rec(n.right)
            if n.op == "*":
                return rec(n.left) @ rec(n.right)
            if n.op == "/":
                return rec(n.left) / evaluate(n.right, 0.0)
            if n.op == "^":
                return np.linalg.matrix_power(rec(n.left), int(evaluate(n.right, 0.0)))
        raise TypeError(f"unexpected node {n!r}")

    return rec(node)


def quadratic_expr(g0: float, lam: float, sign: str = "+") -> Node:
    """AST of ``g0 +/- (lam/2) z^2``."""
    op = {"+": "+", "-": "-"}[sign]
    return BinOp(op, Num(float(g0)), BinOp("*", Num(float(lam) / 2), BinOp("^", Var(), Num(2.0))))
