"""Small arithmetic expression language for coefficients and source terms.

Grammar (EBNF)::

    expr   = term , { ( "+" | "-" ) , term } ;
    term   = unary , { ( "*" | "/" ) , unary } ;
    unary  = "-" , unary | power ;
    power  = atom , [ "^" , unary ] ;          (* right associative *)
    atom   = NUMBER
           | NAME , "(" , expr , { "," , expr } , ")"
           | NAME
           | "(" , expr , ")" ;

``^`` binds tighter than unary minus, so ``-t^2`` parses as ``-(t^2)``.
Variable names are restricted per slot at parse time: diffusion
coefficients may use ``{t, r}``, source terms ``{x, y, t}``.

Evaluation is IEEE double arithmetic on scalars or numpy arrays. Any
operation producing NaN or infinity (division by zero, log of a
non-positive number, ...) raises :class:`ExprEvalError` instead of
propagating silently. Syntax errors carry the byte offset of the fault.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ExprEvalError, ExprSyntaxError

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "evaluate",
    "to_string",
    "variables",
    "COEFFICIENT_VARS",
    "SOURCE_VARS",
]

#: Variables admitted in diffusion-coefficient expressions m(t, r).
COEFFICIENT_VARS = frozenset({"t", "r"})
#: Variables admitted in source-term expressions f(x, y, t).
SOURCE_VARS = frozenset({"x", "y", "t"})

_UNARY_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "abs": np.abs,
    "sqrt": np.sqrt,
    "tanh": np.tanh,
}
_BINARY_FUNCS = {
    "min": np.minimum,
    "max": np.maximum,
    "pow": np.power,
}
FUNCTIONS = dict.fromkeys(_UNARY_FUNCS, 1) | dict.fromkeys(_BINARY_FUNCS, 2)


# --- abstract syntax -------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    """Base class for expression nodes; structural equality via dataclasses."""


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: tuple[Expr, ...]


# --- tokenizer -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()\,])
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos)
        if match.lastgroup != "ws":
            kind = match.lastgroup
            if kind == "op":
                kind = match.group()
            tokens.append((kind, match.group(), pos))
        pos = match.end()
    tokens.append(("end", "", len(source)))
    return tokens


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, source: str, allowed_vars: frozenset[str]):
        self.source = source
        self.tokens = _tokenize(source)
        self.index = 0
        self.allowed_vars = allowed_vars

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind: str):
        token = self.peek()
        if token[0] != kind:
            raise ExprSyntaxError(
                f"expected {kind!r}, found {token[1] or 'end of input'!r}", token[2]
            )
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        token = self.peek()
        if token[0] != "end":
            raise ExprSyntaxError(f"unexpected trailing {token[1]!r}", token[2])
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            # right associative; the exponent may itself carry a unary minus
            node = BinOp("^", node, self.unary())
        return node

    def atom(self) -> Expr:
        kind, text, pos = self.peek()
        if kind == "number":
            self.advance()
            return Num(float(text))
        if kind == "name":
            self.advance()
            if self.peek()[0] == "(":
                return self.call(text, pos)
            if text not in self.allowed_vars:
                if text in FUNCTIONS:
                    raise ExprSyntaxError(
                        f"function {text!r} must be followed by '('", pos
                    )
                allowed = ", ".join(sorted(self.allowed_vars))
                raise ExprSyntaxError(
                    f"unknown variable {text!r} (allowed here: {allowed})", pos
                )
            return Var(text)
        if kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(
            f"expected a value, found {text or 'end of input'!r}", pos
        )

    def call(self, name: str, pos: int) -> Expr:
        if name not in FUNCTIONS:
            raise ExprSyntaxError(f"unknown function {name!r}", pos)
        self.expect("(")
        args = [self.expr()]
        while self.peek()[0] == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        arity = FUNCTIONS[name]
        if len(args) != arity:
            raise ExprSyntaxError(
                f"function {name!r} takes {arity} argument(s), got {len(args)}", pos
            )
        return Call(name, tuple(args))


def parse(source: str, allowed_vars=COEFFICIENT_VARS) -> Expr:
    """Parse ``source`` into an expression tree.

    Parameters
    ----------
    source : str
        Expression text, e.g. ``"1 + r*exp(-t^2)"``.
    allowed_vars : frozenset of str
        Variable names admitted in this slot. Unknown identifiers are
        rejected at parse time with their byte offset.
    """
    return _Parser(source, frozenset(allowed_vars)).parse()


# --- evaluation ------------------------------------------------------------


def _eval_node(node: Expr, bindings: dict):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            return bindings[node.name]
        except KeyError:
            raise ExprEvalError(f"unbound variable {node.name!r}") from None
    if isinstance(node, Neg):
        return -_eval_node(node.operand, bindings)
    if isinstance(node, BinOp):
        left = _eval_node(node.left, bindings)
        right = _eval_node(node.right, bindings)
        if node.op == "+":
            return np.add(left, right)
        if node.op == "-":
            return np.subtract(left, right)
        if node.op == "*":
            return np.multiply(left, right)
        if node.op == "/":
            return np.divide(left, right)
        return np.power(left, right)
    if isinstance(node, Call):
        args = [_eval_node(arg, bindings) for arg in node.args]
        func = _UNARY_FUNCS.get(node.name) or _BINARY_FUNCS[node.name]
        return func(*args)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node: Expr, bindings: dict):
    """Evaluate an expression tree over scalars or numpy arrays.

    Returns a float for all-scalar bindings, an ndarray otherwise.
    Raises :class:`ExprEvalError` if the result contains NaN or Inf
    (e.g. division by zero, ``log`` of a non-positive value) or if a
    variable is unbound.
    """
    with np.errstate(all="ignore"):
        result = _eval_node(node, bindings)
    values = np.asarray(result, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ExprEvalError(
            f"expression produced a non-finite value: {to_string(node)!r}"
        )
    if values.ndim == 0:
        return float(values)
    return values


def variables(node: Expr) -> set[str]:
    """Collect the variable names appearing in the tree."""
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return variables(node.operand)
    if isinstance(node, BinOp):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Call):
        names: set[str] = set()
        for arg in node.args:
            names |= variables(arg)
        return names
    return set()


# --- printing --------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _render(node: Expr) -> tuple[str, int]:
    """Return (text, precedence of the outermost operator)."""
    if isinstance(node, Num):
        return repr(node.value), 9
    if isinstance(node, Var):
        return node.name, 9
    if isinstance(node, Call):
        args = ", ".join(_render(arg)[0] for arg in node.args)
        return f"{node.name}({args})", 9
    if isinstance(node, Neg):
        text, prec = _render(node.operand)
        # ^ binds tighter than unary minus; everything weaker needs parens
        if prec <= _PREC["neg"]:
            text = f"({text})"
        return f"-{text}", _PREC["neg"]
    if isinstance(node, BinOp):
        my = _PREC[node.op]
        left_text, left_prec = _render(node.left)
        right_text, right_prec = _render(node.right)
        if node.op == "^":
            # right associative: parenthesize a left child of equal precedence
            if left_prec <= my:
                left_text = f"({left_text})"
            if right_prec < my:
                right_text = f"({right_text})"
        else:
            if left_prec < my:
                left_text = f"({left_text})"
            # left associative: an equal-precedence right child would be
            # re-parsed as a left-leaning tree, so it keeps its parens
            if right_prec <= my:
                right_text = f"({right_text})"
        return f"{left_text} {node.op} {right_text}", my
    raise TypeError(f"not an expression node: {node!r}")


def to_string(node: Expr) -> str:
    """Print a tree back to parseable text; parse(to_string(e)) == e."""
    return _render(node)[0]
