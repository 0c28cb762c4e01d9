"""Differential operators in theta-form and d-form.

Theta denotes the logarithmic derivative t*d/dt.  A ThetaOperator stores
rational-function coefficients indexed by Theta-power; the object doubles
as an element of the noncommutative algebra Q(t)<Theta> ([Theta, t] = t),
so sums and products of operators normal-order themselves with
coefficients on the left.  The canonical representative clears
denominators, removes integer content and fixes the sign of the leading
coefficient polynomial, which makes operator equality decidable.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, gcd, lcm

from .errors import MathDomainError
from .poly import Poly, RatFunc, poly_gcd, poly_lcm


class _Infinity:
    """The point at infinity on the parameter line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INFINITY = _Infinity()


def _as_coeff(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    if isinstance(x, (int, Fraction)):
        return RatFunc(Poly([x]))
    raise TypeError(f"not an operator coefficient: {x!r}")


class ThetaOperator:
    """Sum of r_i(t) * Theta^i with rational-function coefficients r_i."""

    __slots__ = ("coeffs", "_canon")

    def __init__(self, coeffs=()):
        cs = [_as_coeff(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)
        self._canon = None

    # -- constructors --------------------------------------------------

    @classmethod
    def theta(cls) -> "ThetaOperator":
        return cls([0, 1])

    @classmethod
    def ddt(cls) -> "ThetaOperator":
        """d/dt as the algebra element t^-1 * Theta."""
        return cls([RatFunc(Poly()), RatFunc(Poly([1]), Poly.x())])

    @classmethod
    def function(cls, f) -> "ThetaOperator":
        """Multiplication operator by a rational function."""
        return cls([_as_coeff(f)])

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def order(self) -> int:
        if not self.coeffs:
            raise MathDomainError("zero operator has no order")
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> RatFunc:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RatFunc(Poly())

    # -- algebra ---------------------------------------------------------

    def __add__(self, other):
        other = _as_operator(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return ThetaOperator([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return ThetaOperator([-c for c in self.coeffs])

    def __sub__(self, other):
        other = _as_operator(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Operator composition self o other, normal-ordered."""
        other = _as_operator(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ThetaOperator()
        result = [RatFunc(Poly())] * (len(self.coeffs) + len(other.coeffs) - 1)
        moved = other.coeffs  # Theta^0 o other
        for i, p_i in enumerate(self.coeffs):
            if i > 0:
                # Theta o (sum c_j Theta^j) = sum (theta(c_j) Theta^j + c_j Theta^(j+1))
                nxt = [RatFunc(Poly())] * (len(moved) + 1)
                for j, c in enumerate(moved):
                    if c.is_zero():
                        continue
                    nxt[j] = nxt[j] + c.theta()
                    nxt[j + 1] = nxt[j + 1] + c
                moved = nxt
            if p_i.is_zero():
                continue
            for j, c in enumerate(moved):
                if not c.is_zero():
                    result[j] = result[j] + p_i * c
        return ThetaOperator(result)

    def __rmul__(self, other):
        other = _as_operator(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative operator power")
        result = ThetaOperator([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = _as_operator(other)
        if other is NotImplemented:
            return NotImplemented
        return self.canonical().coeffs == other.canonical().coeffs

    def __hash__(self):
        return hash(self.canonical().coeffs)

    # -- canonical form ----------------------------------------------------

    def is_canonical(self) -> bool:
        c = self.canonical()
        return c.coeffs == self.coeffs

    def canonical(self) -> "ThetaOperator":
        """Unit-normalized representative: polynomial coefficients, coprime
        as a set, with integer content 1 and positive leading coefficient
        on the Theta^order polynomial.  Operators differing by a
        rational-function unit share one canonical form."""
        if self._canon is not None:
            return self._canon
        if self.is_zero():
            self._canon = self
            return self
        den = Poly([1])
        for c in self.coeffs:
            den = poly_lcm(den, c.den)
        polys = [c.num * den.exact_div(c.den) for c in self.coeffs]
        polys = _primitive_poly_list(polys)
        canon = ThetaOperator([RatFunc(p) for p in polys])
        canon._canon = canon
        self._canon = canon
        return canon

    def polynomial_coeffs(self) -> list[Poly]:
        """Coefficient polynomials of the canonical representative."""
        return [c.num for c in self.canonical().coeffs]

    # -- actions ----------------------------------------------------------

    def apply_to_monomial(self, m: int) -> RatFunc:
        """Image of t^m, returned as a rational function."""
        if m < 0:
            raise ValueError("monomial power must be nonnegative")
        acc = RatFunc(Poly())
        for i, c in enumerate(self.coeffs):
            acc = acc + c * Fraction(m) ** i
        return acc * RatFunc(Poly.monomial(1, m))

    def __repr__(self):
        from .opformat import render
        return f"ThetaOperator({render(self)!r})"


def _primitive_poly_list(polys: list[Poly]) -> list[Poly]:
    """Divide by the common polynomial factor and integer content; make
    the last (leading) polynomial's leading coefficient positive."""
    g = None
    for p in polys:
        if p.is_zero():
            continue
        g = p if g is None else poly_gcd(g, p)
        if g.degree() == 0:
            break
    if g is not None and g.degree() > 0:
        polys = [p.exact_div(g) if not p.is_zero() else p for p in polys]
    gnum, glcm = 0, 1
    for p in polys:
        if p.is_zero():
            continue
        ct = p.content()
        gnum = gcd(gnum, ct.numerator)
        glcm = lcm(glcm, ct.denominator)
    c = Fraction(gnum, glcm)
    polys = [p * (1 / c) for p in polys]
    if polys[-1].lc() < 0:
        polys = [-p for p in polys]
    return polys


def _as_operator(x):
    if isinstance(x, ThetaOperator):
        return x
    if isinstance(x, (RatFunc, Poly, int, Fraction)):
        return ThetaOperator([_as_coeff(x)])
    return NotImplemented


class DOperator:
    """Sum of q_i(t) * (d/dt)^i with rational-function coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_as_coeff(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def order(self) -> int:
        if not self.coeffs:
            raise MathDomainError("zero operator has no order")
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> RatFunc:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RatFunc(Poly())

    def __eq__(self, other):
        if not isinstance(other, DOperator):
            return NotImplemented
        return self.coeffs == other.coeffs

    def apply_to_monomial(self, m: int) -> RatFunc:
        if m < 0:
            raise ValueError("monomial power must be nonnegative")
        acc = RatFunc(Poly())
        for i, c in enumerate(self.coeffs):
            ff = 1
            for r in range(i):
                ff *= m - r
            if ff == 0:
                continue
            acc = acc + c * Fraction(ff) * RatFunc(Poly.monomial(1, m - i))
        return acc

    def polynomial_coeffs(self) -> list[Poly]:
        """Denominator-cleared primitive coefficient polynomials."""
        if self.is_zero():
            return []
        den = Poly([1])
        for c in self.coeffs:
            den = poly_lcm(den, c.den)
        polys = [c.num * den.exact_div(c.den) for c in self.coeffs]
        return _primitive_poly_list(polys)


# ---------------------------------------------------------------------------
# Conversions: t^k (d/dt)^k = Theta(Theta-1)...(Theta-k+1) and
# Theta^k = sum_j S(k,j) t^j (d/dt)^j.
# ---------------------------------------------------------------------------

def _falling_factorial_coeffs(n: int) -> list[list[Fraction]]:
    """Coefficients of X(X-1)...(X-i+1) for i = 0..n (Stirling, 1st kind)."""
    rows = [[Fraction(1)]]
    for i in range(n):
        prev = rows[-1]
        nxt = [Fraction(0)] * (len(prev) + 1)
        for j, c in enumerate(prev):  # multiply by (X - i)
            nxt[j + 1] += c
            nxt[j] -= c * i
        rows.append(nxt)
    return rows


def _stirling2(n: int) -> list[list[int]]:
    rows = [[1]]
    for m in range(1, n + 1):
        prev = rows[-1]
        row = [0] * (m + 1)
        for k in range(1, m + 1):
            row[k] = k * (prev[k] if k < len(prev) else 0) + prev[k - 1]
        rows.append(row)
    return rows


def d_to_theta(op: DOperator) -> ThetaOperator:
    """Rewrite in Theta-powers; coefficients may pick up powers of 1/t."""
    if op.is_zero():
        return ThetaOperator()
    n = op.order
    ff = _falling_factorial_coeffs(n)
    out = [RatFunc(Poly())] * (n + 1)
    for i, q in enumerate(op.coeffs):
        if q.is_zero():
            continue
        scaled = q * RatFunc(Poly([1]), Poly.monomial(1, i))  # q_i / t^i
        for j, s in enumerate(ff[i]):
            if s != 0:
                out[j] = out[j] + scaled * s
    return ThetaOperator(out)


def theta_to_d(op: ThetaOperator) -> DOperator:
    """Rewrite in d/dt-powers: q_m = t^m * sum_j S(j, m) r_j."""
    if op.is_zero():
        return DOperator()
    n = op.order
    s2 = _stirling2(n)
    out = [RatFunc(Poly())] * (n + 1)
    for m in range(n + 1):
        acc = RatFunc(Poly())
        for j in range(m, n + 1):
            s = s2[j][m] if m < len(s2[j]) else 0
            if s:
                acc = acc + op.coeff(j) * s
        out[m] = acc * RatFunc(Poly.monomial(1, m))
    return DOperator(out)


# ---------------------------------------------------------------------------
# Shift of local exponents and Moebius pullback
# ---------------------------------------------------------------------------

def shift(op: ThetaOperator, alpha: Fraction) -> ThetaOperator:
    """Substitute Theta -> Theta - alpha and recanonicalize.

    Solutions y(t) of op map to t^alpha y(t); local exponents at 0 gain
    alpha, exponents at infinity (in the s = 1/t convention) lose alpha.
    """
    alpha = Fraction(alpha)
    if op.is_zero():
        return op
    n = op.order
    out = [RatFunc(Poly())] * (n + 1)
    for i, c in enumerate(op.coeffs):
        if c.is_zero():
            continue
        for j in range(i + 1):
            out[j] = out[j] + c * (comb(i, j) * (-alpha) ** (i - j))
    return ThetaOperator(out).canonical()


class Moebius:
    """Invertible map t -> (a t + b) / (c t + d) with rational entries."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = (Fraction(x) for x in (a, b, c, d))
        if self.a * self.d - self.b * self.c == 0:
            raise MathDomainError("Moebius map must have nonzero determinant")

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, p) -> "Moebius":
        return cls(1, Fraction(p), 0, 1)

    def as_ratfunc(self) -> RatFunc:
        return RatFunc(Poly([self.b, self.a]), Poly([self.d, self.c]))

    def inverse(self) -> "Moebius":
        return Moebius(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "Moebius") -> "Moebius":
        """self after other: (self o other)(t) = self(other(t))."""
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return Moebius(a, b, c, d)

    def apply(self, x):
        """Image of a point; handles the point at infinity."""
        if x is INFINITY:
            if self.c == 0:
                return INFINITY
            return self.a / self.c
        if isinstance(x, Fraction) or isinstance(x, int):
            x = Fraction(x)
            den = self.c * x + self.d
            if den == 0:
                return INFINITY
            return (self.a * x + self.b) / den
        num = self.a * x + self.b
        den = self.c * x + self.d
        return num / den

    def __eq__(self, other):
        if not isinstance(other, Moebius):
            return NotImplemented
        # projective equality
        return (
            self.a * other.b == self.b * other.a
            and self.a * other.c == self.c * other.a
            and self.a * other.d == self.d * other.a
            and self.b * other.c == self.c * other.b
            and self.b * other.d == self.d * other.b
            and self.c * other.d == self.d * other.c
        )

    def __repr__(self):
        return f"Moebius(({self.a}*t + {self.b})/({self.c}*t + {self.d}))"


def moebius_pullback(op: ThetaOperator, mu: Moebius) -> ThetaOperator:
    """Operator annihilating y(mu(t)) for every solution y of op.

    Computed through the d-form by the chain rule: d/dx pulls back to
    (1/mu'(t)) d/dt, exactly in rational-function arithmetic.  Singular
    points move by mu^-1 and exponent multisets are preserved.
    """
    if op.is_zero():
        return op
    dop = theta_to_d(op.canonical())
    mu_rf = mu.as_ratfunc()
    mu_prime = mu_rf.derivative()
    # W = (1/mu') d/dt as an element of the Theta algebra
    w = ThetaOperator([RatFunc(Poly()), RatFunc(Poly([1])) / (mu_prime * RatFunc(Poly.x()))])
    acc = ThetaOperator()
    wpow = ThetaOperator([1])
    for i, q in enumerate(dop.coeffs):
        if i > 0:
            wpow = w * wpow
        if q.is_zero():
            continue
        comp = q.compose(mu_rf)
        acc = acc + ThetaOperator([comp]) * wpow
    return acc.canonical()
