"""Surface syntax for radial operators: lexer, recursive-descent parser, lowering, printers.

Grammar (``d`` is d/dr, products are noncommutative and keep written order)::

    Expr   := Term (('+' | '-') Term)*
    Term   := Factor ('*' Factor)*
    Factor := '-' Factor | Atom ('^' ['-'] INT)?
    Atom   := Primary ('/' INT)*
    Primary:= INT | 'n' | 'r' | 'd' | '(' Expr ')' | '[' Expr ',' Expr ']'

Negative exponents are accepted only on ``r`` and on rational literals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

from .core import (
    N,
    DimPoly,
    RadialCoeff,
    RadialOperator,
    op_commutator,
    op_compose,
)


class ExprError(ValueError):
    """Base class for syntax errors; ``position`` is a 0-based column."""

    def __init__(self, message: str, position: int, source: str = ""):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position
        self.source = source

    def caret(self) -> str:
        """The source line with a caret under the offending column."""
        return f"  {self.source}\n  {' ' * self.position}^"


class LexError(ExprError):
    pass


class ParseError(ExprError):
    pass


# --------------------------------------------------------------------------- #
# Lexer
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Token:
    kind: str  # INT, SYM, OP, END
    text: str
    pos: int


_OPERATORS = set("+-*/^()[],")
_SYMBOLS = set("nrd")


def tokenize(source: str) -> List[Token]:
    tokens = []
    i = 0
    while i < len(source):
        ch = source[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(source) and source[j].isdigit():
                j += 1
            tokens.append(Token("INT", source[i:j], i))
            i = j
        elif ch in _SYMBOLS:
            tokens.append(Token("SYM", ch, i))
            i += 1
        elif ch in _OPERATORS:
            tokens.append(Token("OP", ch, i))
            i += 1
        else:
            raise LexError(f"unexpected character {ch!r}", i, source)
    tokens.append(Token("END", "", len(source)))
    return tokens


# --------------------------------------------------------------------------- #
# AST
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Symbol:
    name: str  # 'n', 'r' or 'd'


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Div:
    operand: "Node"
    divisor: Fraction


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*'
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Commutator:
    left: "Node"
    right: "Node"


Node = Union[Num, Symbol, Power, Neg, Div, BinOp, Commutator]


# --------------------------------------------------------------------------- #
# Parser
# --------------------------------------------------------------------------- #


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def _is(self, text: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text == text

    def _error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.pos, self.source)

    def _describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "END" else repr(tok.text)

    def _expect(self, text: str) -> Token:
        if not self._is(text):
            raise self._error(f"expected {text!r}, found {self._describe(self.tok)}")
        tok = self.tok
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "END":
            raise self._error(f"expected operator or end of input, found {self._describe(self.tok)}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self._is("+") or self._is("-"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self._is("*"):
            self.i += 1
            node = BinOp("*", node, self.factor())
        return node

    def factor(self) -> Node:
        if self._is("-"):
            self.i += 1
            return Neg(self.factor())
        start = self.tok
        base = self.atom()
        if self._is("^"):
            self.i += 1
            sign = 1
            if self._is("-"):
                sign = -1
                self.i += 1
            if self.tok.kind != "INT":
                raise self._error(f"expected integer exponent, found {self._describe(self.tok)}")
            exponent = sign * int(self.tok.text)
            self.i += 1
            if exponent < 0 and not _invertible_literal(base):
                raise self._error("negative exponent allowed only on r or a rational literal", start)
            return Power(base, exponent)
        return base

    def atom(self) -> Node:
        node = self.primary()
        while self._is("/"):
            slash = self.tok
            self.i += 1
            if self.tok.kind != "INT":
                raise self._error(
                    f"division only by a nonzero rational literal, found {self._describe(self.tok)}"
                )
            divisor = int(self.tok.text)
            if divisor == 0:
                raise self._error("division by zero", slash)
            self.i += 1
            node = Div(node, Fraction(divisor))
        return node

    def primary(self) -> Node:
        tok = self.tok
        if tok.kind == "INT":
            self.i += 1
            return Num(Fraction(int(tok.text)))
        if tok.kind == "SYM":
            self.i += 1
            return Symbol(tok.text)
        if self._is("("):
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        if self._is("["):
            self.i += 1
            left = self.expr()
            self._expect(",")
            right = self.expr()
            self._expect("]")
            return Commutator(left, right)
        raise self._error(f"expected a number, 'n', 'r', 'd', '(' or '[', found {self._describe(tok)}")


def _invertible_literal(node: Node) -> bool:
    if isinstance(node, Symbol):
        return node.name == "r"
    if isinstance(node, Num):
        return node.value != 0
    if isinstance(node, Div):
        return _invertible_literal(node.operand) and isinstance(node.operand, Num)
    return False


def parse(source: str) -> Node:
    return _Parser(source).parse()


# --------------------------------------------------------------------------- #
# Lowering
# --------------------------------------------------------------------------- #


def lower(node: Node) -> RadialOperator:
    """Evaluate an AST to its canonical operator."""
    if isinstance(node, Num):
        return RadialOperator.multiplication(node.value)
    if isinstance(node, Symbol):
        if node.name == "n":
            return RadialOperator.multiplication(N)
        if node.name == "r":
            return RadialOperator.multiplication(RadialCoeff.monomial(1))
        return RadialOperator.derivative()
    if isinstance(node, Neg):
        return -lower(node.operand)
    if isinstance(node, Div):
        return _divide(lower(node.operand), node.divisor)
    if isinstance(node, BinOp):
        left, right = lower(node.left), lower(node.right)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        return op_compose(left, right)
    if isinstance(node, Commutator):
        return op_commutator(lower(node.left), lower(node.right))
    if isinstance(node, Power):
        if node.exponent >= 0:
            return lower(node.base) ** node.exponent
        return _inverse_monomial(lower(node.base)) ** (-node.exponent)
    raise TypeError(f"not an expression node: {node!r}")


def _divide(op: RadialOperator, q: Fraction) -> RadialOperator:
    return RadialOperator.multiplication(1 / q) * op


def _inverse_monomial(op: RadialOperator) -> RadialOperator:
    # parser admits negative powers only for r and nonzero rationals
    (k, e, d, v), = op.raw_terms()
    assert k == 0 and d == 0
    return RadialOperator.multiplication(RadialCoeff.monomial(-e, 1 / v))


def evaluate(source: str) -> RadialOperator:
    return lower(parse(source))


# --------------------------------------------------------------------------- #
# Printers
# --------------------------------------------------------------------------- #


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_dimpoly(p: DimPoly) -> str:
    """ASCII form of a polynomial in n, descending degree.

    Integer-coefficient polynomials print compactly (``n-1``, ``n^2-4*n+3``);
    otherwise every term carries its rational coefficient
    (``1/4*n^2 - 1*n + 3/4``).
    """
    if p.is_zero():
        return "0"
    items = sorted(p.items(), reverse=True)
    integral = all(c.denominator == 1 for _, c in items)
    parts = []
    for idx, (deg, c) in enumerate(items):
        mono = "" if deg == 0 else ("n" if deg == 1 else f"n^{deg}")
        mag = abs(c)
        if integral:
            if mono and mag == 1:
                body = mono
            else:
                body = _fmt_rational(mag) + ("*" + mono if mono else "")
            sign = ("-" if c < 0 else "") if idx == 0 else ("-" if c < 0 else "+")
            parts.append(sign + body)
        else:
            body = _fmt_rational(mag) + ("*" + mono if mono else "")
            if idx == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def _factor_ascii(e: int, k: int) -> List[str]:
    out = []
    if e:
        out.append("r" if e == 1 else f"r^{e}")
    if k:
        out.append("d" if k == 1 else f"d^{k}")
    return out


def _ordered_terms(op: RadialOperator):
    for k in sorted((k for k, _ in op.items()), reverse=True):
        coeff = op.coefficient(k)
        for e in sorted(coeff.exponents, reverse=True):
            yield k, e, coeff.coefficient(e)


def _render_ascii(op: RadialOperator) -> str:
    if op.is_zero():
        return "0"
    pieces = []
    for k, e, poly in _ordered_terms(op):
        negative = poly.leading_coefficient < 0
        mag = -poly if negative else poly
        rest = _factor_ascii(e, k)
        if len(mag.coefficients) > 1:
            coeff = ["(" + render_dimpoly(mag) + ")"]
        elif mag == DimPoly.constant(1) and rest:
            coeff = []
        else:
            coeff = [render_dimpoly(mag)]
        body = "*".join(coeff + rest)
        if not pieces:
            pieces.append(("-" if negative else "") + body)
        else:
            pieces.append((" - " if negative else " + ") + body)
    return "".join(pieces)


def _latex_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"\\frac{{{q.numerator}}}{{{q.denominator}}}"


def _latex_dimpoly(p: DimPoly) -> str:
    parts = []
    for idx, (deg, c) in enumerate(sorted(p.items(), reverse=True)):
        mono = "" if deg == 0 else ("n" if deg == 1 else f"n^{{{deg}}}")
        mag = abs(c)
        body = mono if (mono and mag == 1) else _latex_rational(mag) + mono
        if idx == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts) or "0"


def _render_latex(op: RadialOperator) -> str:
    if op.is_zero():
        return "0"
    pieces = []
    for k, e, poly in _ordered_terms(op):
        negative = poly.leading_coefficient < 0
        mag = -poly if negative else poly
        rest = []
        if e:
            rest.append("r" if e == 1 else f"r^{{{e}}}")
        if k:
            rest.append("\\partial_r" if k == 1 else f"\\partial_r^{{{k}}}")
        if len(mag.coefficients) > 1:
            coeff = "\\left(" + _latex_dimpoly(mag) + "\\right)"
        elif mag == DimPoly.constant(1) and rest:
            coeff = ""
        else:
            coeff = _latex_dimpoly(mag)
        body = " ".join([coeff] + rest) if coeff else " ".join(rest)
        if not pieces:
            pieces.append(("-" if negative else "") + body)
        else:
            pieces.append((" - " if negative else " + ") + body)
    return "".join(pieces)


def render(op: RadialOperator, style: str = "ascii") -> str:
    """Deterministic rendering; ``ascii`` output parses back to ``op``."""
    if style == "ascii":
        return _render_ascii(op)
    if style == "latex":
        return _render_latex(op)
    raise ValueError(f"unknown style {style!r}")
