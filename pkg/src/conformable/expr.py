"""One-variable expression mini-language: parser, printer, evaluators.

Implemented grammar (standard precedence, `^` binds tighter than unary
minus and associates to the right)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 't' | IDENT '(' expr ')'
            | 'pow' '(' expr ',' expr ')' | '(' expr ')'

The only free variable is ``t``.  ``pow(a, b)`` is sugar for ``a^b``.
Numbers are double-precision literals (``2``, ``0.4``, ``1e-3``, ``.5``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from . import dual as _d
from .dual import Dual
from .errors import (
    DomainError,
    NonFiniteError,
    ParseError,
    UnknownIdentifierError,
)

__all__ = [
    "BinOp",
    "Call",
    "Const",
    "Expr",
    "FuncSpec",
    "FunctionDef",
    "FUNCTIONS",
    "Neg",
    "Var",
    "evaluate",
    "evaluate_body",
    "evaluate_dual",
    "parse",
    "register_function",
    "unparse",
]


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    """The free variable t."""


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Const, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class FuncSpec:
    """An expression body, optionally carrying a jump at the lower terminal.

    With ``jump_at_terminal = c``, evaluation returns ``body(t) + c`` at
    exactly ``t = a`` and ``body(t)`` everywhere else.  Derivative-side
    evaluation (`evaluate_dual`) always uses the body.
    """

    body: Expr
    jump_at_terminal: float | None = None

    @classmethod
    def from_source(cls, source: str, jump_at_terminal: float | None = None) -> "FuncSpec":
        return cls(parse(source), jump_at_terminal)


# --------------------------------------------------------------------------
# Function registry
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionDef:
    name: str
    real: Callable[[float], float]
    dual: Callable[[Dual], Dual]


def _real_ln(x: float) -> float:
    if x <= 0.0:
        raise DomainError(f"ln of non-positive value {x!r}")
    return math.log(x)


def _real_sqrt(x: float) -> float:
    if x < 0.0:
        raise DomainError(f"sqrt of negative value {x!r}")
    return math.sqrt(x)


FUNCTIONS: dict[str, FunctionDef] = {
    f.name: f
    for f in (
        FunctionDef("sin", math.sin, _d.sin),
        FunctionDef("cos", math.cos, _d.cos),
        FunctionDef("exp", math.exp, _d.exp),
        FunctionDef("ln", _real_ln, _d.ln),
        FunctionDef("abs", abs, abs),
        FunctionDef("sqrt", _real_sqrt, _d.sqrt),
    )
}

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def register_function(
    name: str,
    real: Callable[[float], float],
    deriv: Callable[[Dual], Dual],
) -> None:
    """Extend the whitelist with a new unary function."""
    if not _IDENT_RE.match(name):
        raise ValueError(f"not a valid function name: {name!r}")
    if name in ("t", "pow") or name in FUNCTIONS:
        raise ValueError(f"function name already taken: {name!r}")
    FUNCTIONS[name] = FunctionDef(name, real, deriv)


# --------------------------------------------------------------------------
# Tokenizer
# --------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_OP_CHARS = "+-*/^(),"

_ATOM_EXPECTED = frozenset({"a number", "'t'", "a function name", "'('", "'-'"})


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "end"
    text: str
    pos: int  # character offset into the source
    value: float = 0.0


def _byte_offset(source: str, pos: int) -> int:
    return len(source[:pos].encode("utf-8"))


def _tokenize(source: str) -> list[_Token]:
    out: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            m = _NUMBER_RE.match(source, i)
            assert m is not None
            text = m.group(0)
            out.append(_Token("number", text, i, float(text)))
            i = m.end()
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            out.append(_Token("ident", source[i:j], i))
            i = j
            continue
        if c in _OP_CHARS:
            out.append(_Token("op", c, i))
            i += 1
            continue
        raise ParseError(
            f"unexpected character {c!r}",
            _byte_offset(source, i),
            frozenset({"a number", "an identifier", "an operator"}),
        )
    out.append(_Token("end", "", n))
    return out


# --------------------------------------------------------------------------
# Parser (precedence climbing)
# --------------------------------------------------------------------------

_INFIX_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_UNARY_BP = 25


class _Parser:
    def __init__(self, source: str):
        self._source = source
        self._tokens = _tokenize(source)
        self._i = 0

    def parse(self) -> Expr:
        node = self._expr(0)
        tok = self._peek()
        if tok.kind != "end":
            self._fail(
                tok,
                f"unexpected {tok.text!r} after expression",
                frozenset({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"}),
            )
        return node

    def _peek(self) -> _Token:
        return self._tokens[self._i]

    def _advance(self) -> _Token:
        tok = self._tokens[self._i]
        if tok.kind != "end":
            self._i += 1
        return tok

    def _fail(self, tok: _Token, message: str, expected: frozenset[str]):
        raise ParseError(message, _byte_offset(self._source, tok.pos), expected)

    def _expect_op(self, text: str, expected: frozenset[str]) -> None:
        tok = self._advance()
        if tok.kind != "op" or tok.text != text:
            shown = "end of input" if tok.kind == "end" else repr(tok.text)
            self._fail(tok, f"expected {text!r}, found {shown}", expected)

    def _expr(self, min_bp: int) -> Expr:
        lhs = self._prefix()
        while True:
            tok = self._peek()
            if tok.kind != "op" or tok.text not in _INFIX_BP:
                return lhs
            bp = _INFIX_BP[tok.text]
            if bp <= min_bp:
                return lhs
            self._advance()
            # '^' is right-associative: allow the same binding power on the right.
            rhs = self._expr(bp - 1 if tok.text == "^" else bp)
            lhs = BinOp(tok.text, lhs, rhs)

    def _prefix(self) -> Expr:
        tok = self._advance()
        if tok.kind == "number":
            return Const(tok.value)
        if tok.kind == "ident":
            return self._ident(tok)
        if tok.kind == "op":
            if tok.text == "-":
                return Neg(self._expr(_UNARY_BP))
            if tok.text == "(":
                inner = self._expr(0)
                self._expect_op(
                    ")",
                    frozenset({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"}),
                )
                return inner
            self._fail(tok, f"unexpected {tok.text!r}", _ATOM_EXPECTED)
        self._fail(tok, "unexpected end of input", _ATOM_EXPECTED)
        raise AssertionError("unreachable")

    def _ident(self, tok: _Token) -> Expr:
        name = tok.text
        if name == "t":
            return Var()
        if name == "pow":
            self._expect_op("(", frozenset({"'('"}))
            first = self._expr(0)
            self._expect_op(",", frozenset({"','", "'+'", "'-'", "'*'", "'/'", "'^'"}))
            second = self._expr(0)
            self._expect_op(")", frozenset({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"}))
            return BinOp("^", first, second)
        if name in FUNCTIONS:
            self._expect_op("(", frozenset({"'('"}))
            arg = self._expr(0)
            self._expect_op(")", frozenset({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"}))
            return Call(name, arg)
        raise UnknownIdentifierError(
            name,
            _byte_offset(self._source, tok.pos),
            frozenset({"'t'", "'pow'"} | set(FUNCTIONS)),
        )


def parse(source: str) -> Expr:
    """Parse expression source into an AST; the sole free variable is `t`."""
    return _Parser(source).parse()


# --------------------------------------------------------------------------
# Printer
# --------------------------------------------------------------------------

def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _INFIX_BP[node.op]
    if isinstance(node, Neg):
        return _UNARY_BP
    return 99


def unparse(node: Expr) -> str:
    """Render an AST back to source.

    Round-trips structurally: ``parse(unparse(parse(s)))`` equals
    ``parse(s)``.  Constants are assumed non-negative and finite, which is
    all the parser ever produces (a leading minus parses as `Neg`).
    """
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        inner = unparse(node.operand)
        if _prec(node.operand) < _UNARY_BP:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(node, Call):
        return f"{node.func}({unparse(node.arg)})"
    if isinstance(node, BinOp):
        bp = _INFIX_BP[node.op]
        left = unparse(node.left)
        right = unparse(node.right)
        lp, rp = _prec(node.left), _prec(node.right)
        if lp < bp or (lp == bp and node.op == "^"):
            left = f"({left})"
        if rp < bp or (rp == bp and node.op != "^"):
            right = f"({right})"
        return f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

def _pow_float(base: float, expo: float) -> float:
    if base > 0.0:
        return math.pow(base, expo)
    if base == 0.0:
        if expo == 0.0:
            return 1.0
        if expo > 0.0:
            return 0.0
        raise DomainError("zero base with negative exponent")
    if float(expo).is_integer():
        return math.pow(base, expo)
    raise DomainError("negative base with non-integer exponent")


def _eval_float(node: Expr, t: float) -> float:
    if isinstance(node, BinOp):
        left = _eval_float(node.left, t)
        right = _eval_float(node.right, t)
        op = node.op
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0.0:
                raise DomainError(f"division by zero at t={t!r}")
            return left / right
        return _pow_float(left, right)
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return t
    if isinstance(node, Neg):
        return -_eval_float(node.operand, t)
    if isinstance(node, Call):
        fd = FUNCTIONS.get(node.func)
        if fd is None:
            raise UnknownIdentifierError(node.func, 0, frozenset(FUNCTIONS))
        return fd.real(_eval_float(node.arg, t))
    raise TypeError(f"not an expression node: {node!r}")


def _eval_dual(node: Expr, t: Dual) -> Dual:
    if isinstance(node, BinOp):
        left = _eval_dual(node.left, t)
        right = _eval_dual(node.right, t)
        op = node.op
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            return left / right
        return _d.power(left, right)
    if isinstance(node, Const):
        return Dual(node.value, 0.0)
    if isinstance(node, Var):
        return t
    if isinstance(node, Neg):
        return -_eval_dual(node.operand, t)
    if isinstance(node, Call):
        fd = FUNCTIONS.get(node.func)
        if fd is None:
            raise UnknownIdentifierError(node.func, 0, frozenset(FUNCTIONS))
        return fd.dual(_eval_dual(node.arg, t))
    raise TypeError(f"not an expression node: {node!r}")


def _body_of(f: FuncSpec | Expr) -> Expr:
    return f.body if isinstance(f, FuncSpec) else f


def evaluate_body(f: FuncSpec | Expr, t: float) -> float:
    """Evaluate the expression body at t, ignoring any jump decoration."""
    try:
        v = _eval_float(_body_of(f), float(t))
    except OverflowError as exc:
        raise NonFiniteError(f"overflow evaluating at t={t!r}") from exc
    if not math.isfinite(v):
        raise NonFiniteError(f"non-finite result {v!r} at t={t!r}")
    return v


def evaluate(f: FuncSpec | Expr, t: float, a: float) -> float:
    """Evaluate f at t; a jump decoration applies only at t = a exactly."""
    v = evaluate_body(f, t)
    if isinstance(f, FuncSpec) and f.jump_at_terminal is not None and t == a:
        v = v + f.jump_at_terminal
        if not math.isfinite(v):
            raise NonFiniteError(f"non-finite result {v!r} at t={t!r}")
    return v


def evaluate_dual(f: FuncSpec | Expr, t: float) -> Dual:
    """Evaluate (f(t), f'(t)) via dual numbers; jump decorations are ignored."""
    try:
        d = _eval_dual(_body_of(f), Dual.variable(t))
    except OverflowError as exc:
        raise NonFiniteError(f"overflow evaluating at t={t!r}") from exc
    if not (math.isfinite(d.value) and math.isfinite(d.deriv)):
        raise NonFiniteError(f"non-finite dual result {d!r} at t={t!r}")
    return d
