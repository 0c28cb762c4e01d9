"""Concrete syntax for operators and their JSON wire format.

Grammar (whitespace-insensitive, ASCII only)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := 'T' | 'D' | 't' | rational | '(' expr ')'
    rational := uint ('/' uint)?

'T' is the logarithmic derivative t*d/dt, 'D' is d/dt.  Multiplication
is operator composition (noncommutative); everything normal-orders into
a ThetaOperator via D = t^-1 T and [T, t] = t.

The printer emits the canonical representative: Theta-powers descending,
each coefficient polynomial expanded with integer coefficients in
ascending t-degree.  ``parse(render(op)) == op`` for every operator.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError, SchemaError
from .operators import ThetaOperator
from .poly import Poly, RatFunc

_ATOMS = {"T", "D", "t"}
_PUNCT = set("+-*^()/")


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

def _tokenize(text: str):
    tokens = []  # (kind, value, position)
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _ATOMS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.advance()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self) -> ThetaOperator:
        op = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return op

    def expr(self) -> ThetaOperator:
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.advance()[0] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] in "+-":
            neg = self.advance()[0] == "-"
            rhs = self.term()
            acc = acc - rhs if neg else acc + rhs
        return acc

    def term(self) -> ThetaOperator:
        acc = self.factor()
        while self.peek()[0] == "*":
            self.advance()
            acc = acc * self.factor()
        return acc

    def factor(self) -> ThetaOperator:
        base = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            tok = self.peek()
            if tok[0] != "int":
                raise ParseError(
                    "operator powers must be nonnegative integer literals", tok[2]
                )
            self.advance()
            return base ** tok[1]
        return base

    def atom(self) -> ThetaOperator:
        tok = self.advance()
        kind = tok[0]
        if kind == "T":
            return ThetaOperator.theta()
        if kind == "D":
            return ThetaOperator.ddt()
        if kind == "t":
            return ThetaOperator.function(Poly.x())
        if kind == "int":
            num = tok[1]
            if self.peek()[0] == "/":
                self.advance()
                dtok = self.expect("int")
                if dtok[1] == 0:
                    raise ParseError("zero denominator", dtok[2])
                return ThetaOperator.function(Fraction(num, dtok[1]))
            return ThetaOperator.function(Fraction(num))
        if kind == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])


def parse(text: str) -> ThetaOperator:
    """Parse an operator expression into its canonical ThetaOperator."""
    return _Parser(text).parse().canonical()


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

def _monomial_str(c: Fraction, e: int) -> str:
    assert c.denominator == 1
    mag = abs(c.numerator)
    pieces = []
    if mag != 1 or e == 0:
        pieces.append(str(mag))
    if e == 1:
        pieces.append("t")
    elif e > 1:
        pieces.append(f"t^{e}")
    return "*".join(pieces)


def _poly_str(p: Poly) -> str:
    parts = []
    for e, c in enumerate(p.coeffs):
        if c == 0:
            continue
        body = _monomial_str(c, e)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def render(op: ThetaOperator) -> str:
    """Deterministic canonical text; parse(render(op)) == op."""
    op = op.canonical()
    if op.is_zero():
        return "0"
    polys = [c.num for c in op.coeffs]
    terms = []
    for k in range(len(polys) - 1, -1, -1):
        p = polys[k]
        if p.is_zero():
            continue
        theta_part = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
        monos = [c != 0 for c in p.coeffs]
        if sum(monos) > 1:
            body = f"({_poly_str(p)})"
            if theta_part:
                body += f"*{theta_part}"
            terms.append(("+", body))
        else:
            e = p.degree()
            c = p.coeffs[e]
            sign = "-" if c < 0 else "+"
            if theta_part:
                if abs(c) == 1 and e == 0:
                    body = theta_part
                else:
                    body = f"{_monomial_str(c, e)}*{theta_part}"
            else:
                body = _monomial_str(c, e)
            terms.append((sign, body))
    out = []
    for i, (sign, body) in enumerate(terms):
        if i == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f"{'+' if sign == '+' else '-'} {body}")
    return " ".join(out)


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def _int_strings(p: Poly, pointer: str) -> list[str]:
    out = []
    for c in p.coeffs:
        if c.denominator != 1:
            raise SchemaError("non-integer coefficient", pointer)
        out.append(str(c.numerator))
    return out or ["0"]


def to_json(op: ThetaOperator) -> dict:
    """Canonical operator document; roundtrips byte-identically."""
    op = op.canonical()
    if op.is_zero():
        return {"order": -1, "theta_coeffs": []}
    coeffs = []
    for i, c in enumerate(op.coeffs):
        coeffs.append(
            {
                "num": _int_strings(c.num, f"/theta_coeffs/{i}/num"),
                "den": _int_strings(c.den, f"/theta_coeffs/{i}/den"),
            }
        )
    return {"order": op.order, "theta_coeffs": coeffs}


def _parse_int_list(val, pointer: str) -> Poly:
    if not isinstance(val, list) or not val:
        raise SchemaError("expected a nonempty list of integer strings", pointer)
    coeffs = []
    for j, s in enumerate(val):
        if not isinstance(s, str):
            raise SchemaError("coefficient must be a decimal string", f"{pointer}/{j}")
        try:
            coeffs.append(Fraction(int(s)))
        except ValueError as exc:
            raise SchemaError(f"bad integer literal {s!r}", f"{pointer}/{j}") from exc
    return Poly(coeffs)


def from_json(doc: dict) -> ThetaOperator:
    if not isinstance(doc, dict):
        raise SchemaError("operator document must be an object", "")
    if "order" not in doc or "theta_coeffs" not in doc:
        raise SchemaError("missing 'order' or 'theta_coeffs'", "")
    coeffs_doc = doc["theta_coeffs"]
    if not isinstance(coeffs_doc, list):
        raise SchemaError("theta_coeffs must be a list", "/theta_coeffs")
    coeffs = []
    for i, entry in enumerate(coeffs_doc):
        ptr = f"/theta_coeffs/{i}"
        if not isinstance(entry, dict) or "num" not in entry or "den" not in entry:
            raise SchemaError("coefficient needs 'num' and 'den'", ptr)
        num = _parse_int_list(entry["num"], f"{ptr}/num")
        den = _parse_int_list(entry["den"], f"{ptr}/den")
        if den.is_zero():
            raise SchemaError("zero denominator polynomial", f"{ptr}/den")
        coeffs.append(RatFunc(num, den))
    op = ThetaOperator(coeffs)
    order = doc["order"]
    expected = -1 if op.is_zero() else op.order
    if order != expected:
        raise SchemaError(f"order {order} does not match coefficients", "/order")
    return op.canonical()
