"""Text front end for sigma-polynomials and backend literals.

Grammar (EBNF)::

    expr     = term { ("+" | "-") term } ;
    term     = unary { "*" unary } ;
    unary    = "-" unary | power ;
    power    = atom [ "^" exponent ] ;
    exponent = [ "-" ] INT ;
    atom     = INT | "x" | "t" | "w" | "w_" INT
             | "s" "(" expr ")" | "s" "^" INT "(" expr ")"   (* sigma, iterated *)
             | "s"                                           (* the ratshift generator *)
             | "(" expr ")" | "(" expr "," expr { "," expr } ")" ;   (* Witt tuple *)

``s`` directly followed by ``(`` or by ``^k(`` is the sigma operator and may
be applied to any subexpression; otherwise it is the residue generator s of
Q(s). ``w`` is the level-2 generator of the finite-field tower and ``w_m``
the level-m generator. Negative exponents are accepted by the parser and
rejected at evaluation time unless the base is an invertible constant.
"""

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ExpressionSyntaxError, UsageError
from .residue_fields import FqElement, RatShiftElement, fq_generator
from .sigma_polynomials import SigmaPolynomial


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class T:
    pass


@dataclass(frozen=True)
class S:
    pass


@dataclass(frozen=True)
class Gen:
    level: int


@dataclass(frozen=True)
class Sigma:
    k: int
    arg: object


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Tuple:
    items: tuple


# ---------------------------------------------------------------------------
# Tokens

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<gen>w_\d+)|(?P<name>[a-z]+)|(?P<op>[-+*^(),]))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    start = text.rfind("\n", 0, offset) + 1
    return line, offset - start + 1


def tokenize(text):
    tokens, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            line, col = _position(text, pos)
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        start = m.start(kind)
        line, col = _position(text, start)
        value = m.group(kind)
        if kind == "name" and value not in ("x", "t", "s", "w"):
            raise ExpressionSyntaxError(f"unknown name {value!r}", line, col)
        tokens.append(Token(kind, value, line, col))
        pos = m.end()
    line, col = _position(text, len(text))
    tokens.append(Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, ahead=0):
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        return ExpressionSyntaxError(f"{message}, found {found}", tok.line, tok.column)

    def expect(self, text):
        tok = self.peek()
        if tok.text != text or tok.kind == "end":
            raise self.error(f"expected {text!r}")
        return self.take()

    def parse(self):
        node = self.expr()
        if self.peek().kind != "end":
            raise self.error("unexpected token")
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().text == "*":
            self.take()
            node = BinOp("*", node, self.unary())
        return node

    def unary(self):
        if self.peek().text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self):
        sign = 1
        if self.peek().text == "-":
            self.take()
            sign = -1
        tok = self.peek()
        if tok.kind != "int":
            raise self.error("expected an integer exponent")
        self.take()
        return sign * int(tok.text)

    def atom(self):
        tok = self.peek()
        if tok.kind == "int":
            self.take()
            return Num(int(tok.text))
        if tok.kind == "gen":
            self.take()
            level = int(tok.text[2:])
            if level < 1:
                raise ExpressionSyntaxError("generator level must be positive", tok.line, tok.column)
            return Gen(level)
        if tok.kind == "name":
            self.take()
            if tok.text == "x":
                return Var()
            if tok.text == "t":
                return T()
            if tok.text == "w":
                return Gen(2)
            return self.after_s()
        if tok.text == "(":
            self.take()
            first = self.expr()
            if self.peek().text == ",":
                items = [first]
                while self.peek().text == ",":
                    self.take()
                    items.append(self.expr())
                self.expect(")")
                return Tuple(tuple(items))
            self.expect(")")
            return first
        raise self.error("expected an operand")

    def after_s(self):
        nxt = self.peek()
        if nxt.text == "(":
            self.take()
            arg = self.expr()
            self.expect(")")
            return Sigma(1, arg)
        if nxt.text == "^" and self.peek(1).kind == "int" and self.peek(2).text == "(":
            self.take()
            k = int(self.take().text)
            self.take()
            arg = self.expr()
            self.expect(")")
            return Sigma(k, arg)
        return S()


def parse(text):
    """Parse text into an AST; raises ExpressionSyntaxError with line and column."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC = {"+": 1, "-": 1, "*": 2}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def to_text(node):
    """Print an AST so that parse(to_text(node)) == node."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, T):
        return "t"
    if isinstance(node, S):
        return "s"
    if isinstance(node, Gen):
        return "w" if node.level == 2 else f"w_{node.level}"
    if isinstance(node, Sigma):
        head = "s" if node.k == 1 else f"s^{node.k}"
        return f"{head}({to_text(node.arg)})"
    if isinstance(node, Tuple):
        return "(" + ",".join(to_text(i) for i in node.items) + ")"
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        return "-" + (inner if _prec(node.arg) >= 3 else f"({inner})")
    if isinstance(node, Pow):
        inner = to_text(node.base)
        if _prec(node.base) < 5:
            inner = f"({inner})"
        return f"{inner}^{node.exp}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = to_text(node.left)
        if _prec(node.left) < p:
            left = f"({left})"
        right = to_text(node.right)
        # left-associative: an equal-precedence right operand needs parentheses
        if _prec(node.right) <= p:
            right = f"({right})"
        sep = "*" if node.op == "*" else f" {node.op} "
        return f"{left}{sep}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Evaluation

class _Context:
    """Maps literals into a backend ring (or a bare residue field)."""

    def __init__(self, ring=None, field=None):
        self.ring = ring
        self.field = field if field is not None else (ring.residue_field if ring else None)

    def residue(self, value):
        if self.ring is None:
            return value
        if self.ring.name == "witt":
            return self.ring.teichmuller(value)
        return self.ring.residue_constant(value)

    def generator(self, level):
        if not hasattr(self.field, "p") or getattr(self.field, "characteristic", 0) == 0:
            raise UsageError("w needs a finite-field residue field")
        return self.residue(fq_generator(self.field.p, level))

    def s(self):
        if self.field is None or getattr(self.field, "characteristic", None) != 0:
            raise UsageError("s is the generator of Q(s); the residue field here has positive characteristic")
        return self.residue(RatShiftElement.s())

    def t(self):
        if self.ring is None or self.ring.name != "hahn":
            raise UsageError("t is only available on the Hahn backend")
        return self.ring.t()


def _constant(P):
    if not P.is_constant():
        raise UsageError("expected a constant expression")
    return P.constant_term()


def _to_poly(node, ctx):
    if isinstance(node, Num):
        return SigmaPolynomial.constant(node.value)
    if isinstance(node, Var):
        return SigmaPolynomial.x(0)
    if isinstance(node, T):
        return SigmaPolynomial.constant(ctx.t())
    if isinstance(node, S):
        return SigmaPolynomial.constant(ctx.s())
    if isinstance(node, Gen):
        return SigmaPolynomial.constant(ctx.generator(node.level))
    if isinstance(node, Tuple):
        return SigmaPolynomial.constant(_witt_tuple(node, ctx))
    if isinstance(node, Sigma):
        P = _to_poly(node.arg, ctx)
        for _ in range(node.k):
            P = P.apply_sigma()
        return P
    if isinstance(node, Neg):
        return -_to_poly(node.arg, ctx)
    if isinstance(node, Pow):
        P = _to_poly(node.base, ctx)
        if node.exp >= 0:
            return P ** node.exp
        c = _constant(P)
        if isinstance(c, int):
            if ctx.ring is None:
                raise UsageError("negative powers of integers need a backend")
            c = ctx.ring.from_int(c)
        return SigmaPolynomial.constant(c.inverse() ** (-node.exp))
    if isinstance(node, BinOp):
        left, right = _to_poly(node.left, ctx), _to_poly(node.right, ctx)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        return left * right
    raise TypeError(f"not an expression node: {node!r}")


def _residue_value(node, field):
    """Evaluate a residue-field literal (Witt tuple component)."""
    if isinstance(node, Num):
        return field.from_int(node.value)
    if isinstance(node, Gen):
        return fq_generator(field.p, node.level)
    if isinstance(node, Neg):
        return -_residue_value(node.arg, field)
    if isinstance(node, Pow):
        base = _residue_value(node.base, field)
        return base ** node.exp if node.exp >= 0 else base.inverse() ** (-node.exp)
    if isinstance(node, BinOp):
        left, right = _residue_value(node.left, field), _residue_value(node.right, field)
        return {"+": lambda: left + right, "-": lambda: left - right,
                "*": lambda: left * right}[node.op]()
    if isinstance(node, Sigma):
        value = _residue_value(node.arg, field)
        for _ in range(node.k):
            value = value.sigma()
        return value
    raise UsageError(f"{to_text(node)} is not a residue-field literal")


def _witt_tuple(node, ctx):
    ring = ctx.ring
    if ring is None or ring.name != "witt":
        raise UsageError("component tuples are Witt-vector literals")
    comps = [_residue_value(item, ring.residue_field) for item in node.items]
    if len(comps) > ring.N:
        raise UsageError(f"tuple has {len(comps)} components, precision is {ring.N}")
    return ring.element(comps + [ring.residue_field.zero()] * (ring.N - len(comps)))


def to_polynomial(node, ring=None):
    """SigmaPolynomial for an AST (or text), literals interpreted in ``ring``."""
    if isinstance(node, str):
        node = parse(node)
    return _to_poly(node, _Context(ring))


def to_element(node, ring):
    """A constant expression as a ring element."""
    P = to_polynomial(node, ring)
    return ring.coerce(_constant(P) if not P.is_zero() else 0)


def parse_polynomial(text, ring=None):
    return to_polynomial(parse(text), ring)


def parse_element(text, ring):
    return to_element(parse(text), ring)


def parse_residue(text, field):
    """A residue-field literal: integers, w, w_m, s and arithmetic."""
    node = parse(text)
    if isinstance(field, type(None)):
        raise UsageError("no residue field")
    if getattr(field, "characteristic", 0):
        return _residue_value(node, field)
    P = _to_poly(node, _Context(None, field))
    c = _constant(P)
    return RatShiftElement.constant(c) if isinstance(c, (int, Fraction)) else c


# ---------------------------------------------------------------------------
# Formatting of values back into the grammar.

def format_residue(c):
    if isinstance(c, (int, Fraction)):
        return str(c)
    if isinstance(c, FqElement):
        return str(c)
    return str(c)


def format_polynomial(F):
    """Readable rendering of a SigmaPolynomial in the grammar's notation."""
    return str(F)


__all__ = [
    "Num", "Var", "T", "S", "Gen", "Sigma", "Neg", "BinOp", "Pow", "Tuple",
    "Token", "tokenize", "parse", "to_text", "to_polynomial", "to_element",
    "parse_polynomial", "parse_element", "parse_residue", "format_polynomial",
]
