"""Defining-function expressions: lexer, recursive-descent parser, renderer, expansion.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := atom ("^" nat)? | "-" factor
    atom   := rational | "i" | var | "conj" "(" expr ")" | "abs2" "(" expr ")" | "(" expr ")"
    var    := "z1" | "z2" | "z3" | "z4"
    rational := nat ("/" nat)?

Binding from tightest: ``^``, unary minus, ``*``, then ``+``/``-``; binary
operators associate to the left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import GaussRational, Series, VarContext
from .errors import (
    DecimalLiteral,
    DegreeTooHigh,
    FractionalExponent,
    LexicalError,
    NegativeExponent,
    UnbalancedParentheses,
    UnexpectedToken,
    UnknownIdentifier,
    ZeroDenominator,
)

__all__ = [
    "Num",
    "Imag",
    "Var",
    "Conj",
    "Abs2",
    "Add",
    "Sub",
    "Mul",
    "Neg",
    "Pow",
    "parse",
    "render",
    "to_series",
    "check_real",
    "degree_bound",
    "MAX_INPUT_BYTES",
]

MAX_INPUT_BYTES = 64 * 1024
MAX_EXPANSION_DEGREE = 64


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Conj:
    arg: object


@dataclass(frozen=True)
class Abs2:
    arg: object


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


# ---------------------------------------------------------------------------
# lexer


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, IDENT, OP, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<num>[0-9]+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()])")
_KNOWN = {"z1", "z2", "z3", "z4", "i", "conj", "abs2"}


def tokenize(text: str) -> list:
    if len(text.encode("utf-8")) > MAX_INPUT_BYTES:
        raise LexicalError(f"input exceeds {MAX_INPUT_BYTES} bytes")
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        col = pos - line_start + 1
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            ch = text[pos]
            if ch == "." and pos + 1 < len(text) and text[pos + 1].isdigit():
                raise DecimalLiteral("decimal literals are not allowed; write a fraction like 1/2", line, col)
            raise LexicalError(f"unexpected character {ch!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "num":
            if m.end() < len(text) and text[m.end()] == "." and m.end() + 1 < len(text) and text[m.end() + 1].isdigit():
                raise DecimalLiteral("decimal literals are not allowed; write a fraction like 1/2", line, col)
            out.append(Token("NUM", tok, line, col))
        elif kind == "ident":
            if tok not in _KNOWN:
                hint = "; write conj(zk) for a conjugate" if re.fullmatch(r"z(b|bar)?[0-9]+", tok) else ""
                raise UnknownIdentifier(f"unknown identifier {tok!r}{hint}", line, col)
            out.append(Token("IDENT", tok, line, col))
        elif kind == "op":
            out.append(Token("OP", tok, line, col))
        pos = m.end()
    out.append(Token("EOF", "", line, pos - line_start + 1))
    return out


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0
        self.open_parens = []

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text) -> bool:
        return self.tok.kind == "OP" and self.tok.text == text

    def fail(self, msg, tok=None):
        t = tok or self.tok
        if t.kind == "OP" and t.text == ")":
            raise UnbalancedParentheses("unmatched ')'", t.line, t.col)
        if t.kind == "EOF" and self.open_parens:
            o = self.open_parens[-1]
            raise UnbalancedParentheses("'(' is never closed", o.line, o.col)
        raise UnexpectedToken(msg, t.line, t.col)

    def parse(self):
        if self.tok.kind == "EOF":
            self.fail("empty expression")
        node = self.expr()
        if self.tok.kind != "EOF":
            self.fail(f"unexpected {self.tok.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.at("*"):
            self.advance()
            node = Mul(node, self.factor())
        return node

    def factor(self):
        if self.at("-"):
            self.advance()
            return Neg(self.factor())
        base = self.atom()
        if self.at("^"):
            self.advance()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        t = self.tok
        wrapped = False
        if self.at("("):
            self.open_parens.append(self.advance())
            wrapped = True
            t = self.tok
        if self.at("-"):
            raise NegativeExponent("exponents must be nonnegative integers", t.line, t.col)
        if t.kind != "NUM":
            self.fail("expected a natural-number exponent")
        self.advance()
        if self.at("/"):
            raise FractionalExponent("exponents must be integers", t.line, t.col)
        if wrapped:
            if not self.at(")"):
                self.fail("expected ')'")
            self.advance()
            self.open_parens.pop()
        return int(t.text)

    def atom(self):
        t = self.tok
        if t.kind == "NUM":
            self.advance()
            if self.at("/"):
                self.advance()
                d = self.tok
                if d.kind != "NUM":
                    self.fail("expected a denominator")
                self.advance()
                if int(d.text) == 0:
                    raise ZeroDenominator("denominator is zero", d.line, d.col)
                return Num(Fraction(int(t.text), int(d.text)))
            return Num(Fraction(int(t.text)))
        if t.kind == "IDENT":
            self.advance()
            if t.text == "i":
                return Imag()
            if t.text in ("conj", "abs2"):
                if not self.at("("):
                    self.fail(f"expected '(' after {t.text}")
                inner = self.parenthesized()
                return Conj(inner) if t.text == "conj" else Abs2(inner)
            return Var(t.text)
        if self.at("("):
            return self.parenthesized()
        self.fail(f"unexpected {t.text!r}" if t.kind != "EOF" else "unexpected end of input")

    def parenthesized(self):
        self.open_parens.append(self.advance())
        node = self.expr()
        if not self.at(")"):
            if self.tok.kind == "EOF":
                o = self.open_parens[-1]
                raise UnbalancedParentheses("'(' is never closed", o.line, o.col)
            self.fail(f"expected ')' but found {self.tok.text!r}")
        self.advance()
        self.open_parens.pop()
        return node


def parse(text: str):
    """Parse an expression into an AST; errors carry line and column."""
    return _Parser(tokenize(text)).parse()


# ---------------------------------------------------------------------------
# rendering

_PREC = {Add: 1, Sub: 1, Mul: 2, Neg: 3, Pow: 4}


def _prec(node) -> int:
    return _PREC.get(type(node), 5)


def render(node) -> str:
    """Text that parses back to a structurally equal AST."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Conj):
        return f"conj({render(node.arg)})"
    if isinstance(node, Abs2):
        return f"abs2({render(node.arg)})"
    if isinstance(node, (Add, Sub)):
        op = "+" if isinstance(node, Add) else "-"
        return f"{_wrap(node.left, 1)} {op} {_wrap(node.right, 2)}"
    if isinstance(node, Mul):
        return f"{_wrap(node.left, 2)}*{_wrap(node.right, 3)}"
    if isinstance(node, Neg):
        return f"-{_wrap(node.arg, 3)}"
    if isinstance(node, Pow):
        base = node.base
        text = render(base)
        if _prec(base) < 5 or (isinstance(base, Num) and base.value.denominator != 1):
            text = f"({text})"
        return f"{text}^{node.exp}"
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(node, min_prec: int) -> str:
    s = render(node)
    return f"({s})" if _prec(node) < min_prec else s


# ---------------------------------------------------------------------------
# expansion


def degree_bound(node) -> int:
    if isinstance(node, (Num, Imag)):
        return 0
    if isinstance(node, Var):
        return 1
    if isinstance(node, (Conj, Neg)):
        return degree_bound(node.arg)
    if isinstance(node, Abs2):
        return 2 * degree_bound(node.arg)
    if isinstance(node, (Add, Sub)):
        return max(degree_bound(node.left), degree_bound(node.right))
    if isinstance(node, Mul):
        return degree_bound(node.left) + degree_bound(node.right)
    if isinstance(node, Pow):
        return degree_bound(node.base) * node.exp
    raise TypeError(f"not an expression node: {node!r}")


def _expand(node, ctx: VarContext) -> Series:
    if isinstance(node, Num):
        return Series.constant(ctx, node.value)
    if isinstance(node, Imag):
        return Series.constant(ctx, GaussRational(0, 1))
    if isinstance(node, Var):
        return Series.variable(ctx, node.name)
    if isinstance(node, Conj):
        return _expand(node.arg, ctx).conj()
    if isinstance(node, Abs2):
        x = _expand(node.arg, ctx)
        return x * x.conj()
    if isinstance(node, Add):
        return _expand(node.left, ctx) + _expand(node.right, ctx)
    if isinstance(node, Sub):
        return _expand(node.left, ctx) - _expand(node.right, ctx)
    if isinstance(node, Mul):
        return _expand(node.left, ctx) * _expand(node.right, ctx)
    if isinstance(node, Neg):
        return -_expand(node.arg, ctx)
    if isinstance(node, Pow):
        return _expand(node.base, ctx) ** node.exp
    raise TypeError(f"not an expression node: {node!r}")


def to_series(e, ctx: VarContext, strict: bool = True) -> Series:
    """Expand an AST exactly.

    With ``strict`` a polynomial of total degree above ``ctx.order`` raises
    :class:`DegreeTooHigh` instead of being truncated.
    """
    bound = degree_bound(e)
    if bound <= ctx.order:
        return _expand(e, ctx)
    if not strict:
        return _expand(e, ctx)
    if bound > MAX_EXPANSION_DEGREE:
        raise DegreeTooHigh(f"expression degree bound {bound} exceeds {MAX_EXPANSION_DEGREE}")
    wide = _expand(e, VarContext(bound))
    deg = wide.max_degree()
    if deg > ctx.order:
        raise DegreeTooHigh(f"defining function has total degree {deg}, above the truncation order {ctx.order}")
    return Series.from_dict(ctx, {exps: c for exps, c in wide.terms()})


def check_real(f: Series) -> bool:
    return f.conj() == f
