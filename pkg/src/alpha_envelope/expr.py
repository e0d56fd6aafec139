"""Arithmetic expressions for boundary data.

Grammar (``^`` is right associative and binds tighter than unary minus)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Functions: sin cos exp abs sqrt log (one argument), min max (two arguments).
Constants: pi, e.  Evaluation is vectorized over numpy arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

__all__ = ["ExpressionError", "Expression", "parse_expression"]

FUNCTIONS = {
    "sin": (np.sin, 1),
    "cos": (np.cos, 1),
    "exp": (np.exp, 1),
    "abs": (np.abs, 1),
    "sqrt": (np.sqrt, 1),
    "log": (np.log, 1),
    "min": (np.minimum, 2),
    "max": (np.maximum, 2),
}
CONSTANTS = {"pi": np.pi, "e": np.e}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


class ExpressionError(ValueError):
    def __init__(self, message: str, position: int | None = None, text: str = ""):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
            if text:
                message += f"\n  {text}\n  {' ' * position}^"
        super().__init__(message)


# -- syntax tree -------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float

    def eval(self, env):
        return self.value

    def show(self):
        return repr(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def eval(self, env):
        return env[self.name]

    def show(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    arg: object

    def eval(self, env):
        return -self.arg.eval(env)

    def show(self):
        return f"(-{self.arg.show()})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def eval(self, env):
        a = self.left.eval(env)
        b = self.right.eval(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        return np.power(a, b)

    def show(self):
        return f"({self.left.show()} {self.op} {self.right.show()})"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple

    def eval(self, env):
        fn, _ = FUNCTIONS[self.name]
        return fn(*(a.eval(env) for a in self.args))

    def show(self):
        return f"{self.name}({', '.join(a.show() for a in self.args)})"


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, variables):
        self.text = text
        self.variables = set(variables)
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ExpressionError(f"unexpected character {text[bad]!r}", bad, text)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            what = "end of input" if kind == "end" else repr(val)
            raise ExpressionError(f"expected {op!r}, found {what}", pos, self.text)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {val!r}", pos, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if val not in FUNCTIONS:
                    raise ExpressionError(f"unknown function {val!r}", pos, self.text)
                self.take()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                arity = FUNCTIONS[val][1]
                if len(args) != arity:
                    raise ExpressionError(
                        f"{val}() takes {arity} argument(s), got {len(args)}", pos, self.text
                    )
                return Call(val, tuple(args))
            if val in self.variables:
                return Var(val)
            if val in CONSTANTS:
                return Num(float(CONSTANTS[val]))
            if val in FUNCTIONS:
                raise ExpressionError(f"function {val!r} needs arguments", pos, self.text)
            raise ExpressionError(f"unknown identifier {val!r}", pos, self.text)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ExpressionError(f"unexpected {what}", pos, self.text)


def _free_names(node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return _free_names(node.arg)
    if isinstance(node, BinOp):
        return _free_names(node.left) | _free_names(node.right)
    if isinstance(node, Call):
        return set().union(*(_free_names(a) for a in node.args))
    return set()


class Expression:
    """A parsed expression; call it with keyword arrays for its variables.

    ``variables`` are the names allowed at parse time; only those that occur
    (``used``) must be supplied.  The result broadcasts against every supplied
    allowed variable, so constants come back as full arrays too.
    """

    def __init__(self, text: str, tree, variables):
        self.text = text
        self.tree = tree
        self.variables = tuple(variables)
        self.used = tuple(v for v in self.variables if v in _free_names(tree))

    def __call__(self, **env):
        missing = [v for v in self.used if v not in env]
        if missing:
            raise TypeError(f"missing variables: {missing}")
        out = self.tree.eval(env)
        shape = np.broadcast(*[np.asarray(env[v]) for v in self.variables if v in env], np.empty(())).shape
        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy() if shape else float(out)

    def evaluate(self, env: Mapping[str, object]):
        return self(**env)

    def pretty(self) -> str:
        """Fully parenthesized text that parses back to an equal tree."""
        return self.tree.show()

    def __repr__(self):
        return f"Expression({self.text!r})"


def parse_expression(text: str, variables=("x", "y", "theta")) -> Expression:
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    if not text.strip():
        raise ExpressionError("empty expression", 0, text)
    return Expression(text, _Parser(text, variables).parse(), variables)
