"""Exact univariate polynomials and rational functions over Q.

Coefficients are fractions.Fraction throughout; every constructor strips
trailing zeros, so the zero polynomial is the empty coefficient tuple and
degree() == -1 for it.  RatFunc keeps gcd(num, den) == 1 with monic
denominator.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd

import gmpy2

from . import nums
from .errors import MathDomainError, NumericError

Rational = Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class Poly:
    """Polynomial in t with Fraction coefficients, ascending powers."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([_frac(c)])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def monomial(cls, c, k: int) -> "Poly":
        return cls([0] * k + [_frac(c)])

    # -- basic queries -----------------------------------------------------

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> Fraction:
        if not self.coeffs:
            raise MathDomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def valuation(self) -> int:
        """Order of vanishing at 0; raises on the zero polynomial."""
        if not self.coeffs:
            raise MathDomainError("zero polynomial has infinite valuation")
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        raise AssertionError("unreachable")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly([other])
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly([other])
        if not isinstance(other, Poly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly([-_frac(other)]))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs])
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), self
        quot = [Fraction(0)] * (dq + 1)
        olc = other.lc()
        for k in range(dq, -1, -1):
            top = rem[k + other.degree()]
            if top != 0:
                q = top / olc
                quot[k] = q
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= q * b
        return Poly(quot), Poly(rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise MathDomainError("division is not exact")
        return q

    # -- calculus / transforms ---------------------------------------------

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def eval(self, x):
        """Horner evaluation; works for Fraction, mpfr, mpc inputs."""
        acc = 0 * x if not isinstance(x, (int, Fraction)) else Fraction(0)
        for c in reversed(self.coeffs):
            cv = c if isinstance(x, (int, Fraction)) else nums.mpfr(c)
            acc = acc * x + cv
        return acc

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * other + Poly([c])
        return acc

    def taylor_shift(self, c) -> "Poly":
        """p(t + c), exact."""
        return self.compose(Poly([_frac(c), 1]))

    def reversal(self, degree: int) -> "Poly":
        """t^degree * p(1/t); degree must be >= deg(p)."""
        if degree < self.degree():
            raise ValueError("reversal degree below polynomial degree")
        out = [Fraction(0)] * (degree + 1)
        for k, c in enumerate(self.coeffs):
            out[degree - k] = c
        return Poly(out)

    # -- normalization -----------------------------------------------------

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = 1 / self.lc()
        return Poly([c * inv for c in self.coeffs])

    def content(self) -> Fraction:
        """Positive rational c with self/c integral and primitive; 0 for 0."""
        if self.is_zero():
            return Fraction(0)
        num = 0
        den = 1
        for c in self.coeffs:
            num = int_gcd(num, c.numerator)
            den = den * c.denominator // int_gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "Poly":
        if self.is_zero():
            return self
        c = self.content()
        return Poly([q / c for q in self.coeffs])

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        parts = [f"{c}*t^{k}" for k, c in enumerate(self.coeffs) if c != 0]
        return "Poly(" + " + ".join(parts) + ")"


def _horner_divide(work: list, center, length: int):
    """In-place synthetic division of work[:length] by (tau - center).

    Returns the remainder; work[:length-1] becomes the quotient.
    """
    acc = work[length - 1]
    for k in range(length - 2, -1, -1):
        work[k], acc = acc, work[k] + acc * center
    return acc


def shift_coeffs_numeric(p: Poly, center) -> list:
    """Coefficients of p(tau + center) as gmpy2.mpc (Taylor shift)."""
    n = len(p.coeffs)
    if n == 0:
        return []
    work = [nums.mpc(c) for c in p.coeffs]
    out = [None] * n
    for j in range(n):
        out[j] = _horner_divide(work, center, n - j)
    return out


class RatFunc:
    """Rational function num/den, reduced, with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, Fraction)):
            num = Poly([num])
        if den is None:
            den = Poly([1])
        elif isinstance(den, (int, Fraction)):
            den = Poly([den])
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = Poly(), Poly([1])
            return
        g = poly_gcd(num, den)
        if g.degree() > 0:
            num, den = num.exact_div(g), den.exact_div(g)
        lc = den.lc()
        self.num = Poly([c / lc for c in num.coeffs])
        self.den = den.monic()

    @classmethod
    def t(cls) -> "RatFunc":
        return cls(Poly.x())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree() == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = RatFunc(other if isinstance(other, Poly) else Poly([other]))
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_ratfunc(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RatFunc(self.den ** (-k), self.num ** (-k))
        return RatFunc(self.num**k, self.den**k)

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def theta(self) -> "RatFunc":
        """t * d/dt applied to self."""
        return RatFunc(Poly.x()) * self.derivative()

    def valuation(self) -> int:
        """Order at 0 (negative for a pole); errors on zero."""
        return self.num.valuation() - self.den.valuation()

    def eval(self, x):
        dv = self.den.eval(x)
        if isinstance(x, (int, Fraction)) and dv == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num.eval(x) / dv

    def compose(self, inner: "RatFunc") -> "RatFunc":
        """self(inner(t)), substituting a rational function for t."""
        nacc = RatFunc(Poly())
        for c in reversed(self.num.coeffs):
            nacc = nacc * inner + RatFunc(Poly([c]))
        dacc = RatFunc(Poly())
        for c in reversed(self.den.coeffs):
            dacc = dacc * inner + RatFunc(Poly([c]))
        return nacc / dacc

    def __repr__(self):
        if self.is_poly():
            return f"RatFunc({self.num!r})"
        return f"RatFunc({self.num!r} / {self.den!r})"


def _as_ratfunc(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    if isinstance(x, (int, Fraction)):
        return RatFunc(Poly([x]))
    return NotImplemented


def poly_compose_ratfunc(p: Poly, inner: RatFunc) -> RatFunc:
    acc = RatFunc(Poly())
    for c in reversed(p.coeffs):
        acc = acc * inner + RatFunc(Poly([c]))
    return acc


# ---------------------------------------------------------------------------
# gcd, square-free decomposition, roots
# ---------------------------------------------------------------------------

def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; gcd(p, 0) = monic p.  Errors if both are zero."""
    if a.is_zero() and b.is_zero():
        raise MathDomainError("gcd(0, 0) is undefined")
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly()
    return (a * b).exact_div(poly_gcd(a, b)).monic()


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: p = lc * prod g_i^i with g_i monic square-free."""
    if p.is_zero():
        raise MathDomainError("zero polynomial has no square-free decomposition")
    p = p.monic()
    out = []
    if p.degree() == 0:
        return out
    g = poly_gcd(p, p.derivative())
    w = p.exact_div(g)
    i = 1
    while w.degree() > 0:
        y = poly_gcd(w, g)
        f = w.exact_div(y)
        if f.degree() > 0:
            out.append((f, i))
        w, g = y, g.exact_div(y)
        i += 1
    return out


def _int_divisors(n: int) -> list[int]:
    n = abs(n)
    small, big = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                big.append(n // d)
        d += 1
    return small + big[::-1]


def rational_roots(p: Poly) -> dict[Fraction, int]:
    """All rational roots with multiplicities (rational-root theorem)."""
    if p.is_zero():
        raise MathDomainError("zero polynomial has all roots")
    roots: dict[Fraction, int] = {}
    # peel off t^k
    v = p.valuation()
    if v:
        roots[Fraction(0)] = v
        p = Poly(p.coeffs[v:])
    if p.degree() < 1:
        return roots
    q = p.primitive()
    nums_ = [c.numerator for c in q.coeffs]
    a0 = next(c for c in nums_ if c != 0)
    an = nums_[-1]
    candidates = set()
    for r in _int_divisors(a0):
        for s in _int_divisors(an):
            candidates.add(Fraction(r, s))
            candidates.add(Fraction(-r, s))
    for cand in sorted(candidates):
        mult = 0
        while q.degree() >= 1 and q.eval(cand) == 0:
            q = q.exact_div(Poly([-cand, 1]))
            mult += 1
        if mult:
            roots[cand] = mult
    return roots


def deflate_rational_roots(p: Poly) -> tuple[dict[Fraction, int], Poly]:
    """Rational roots plus the (primitive) cofactor with none left."""
    roots = rational_roots(p)
    q = p
    for r, m in roots.items():
        q = q.exact_div(Poly([-r, 1]) ** m)
    return roots, q


def numeric_roots(p: Poly, prec: int = nums.DEFAULT_PREC) -> list[tuple[gmpy2.mpc, int]]:
    """All complex roots with multiplicities at the requested precision.

    Multiplicities come from the exact square-free decomposition; each
    square-free factor is solved by simultaneous iteration (mpmath
    polyroots) and polished by Newton steps at guarded precision.
    """
    if p.is_zero():
        raise MathDomainError("zero polynomial has all roots")
    if prec < nums.MIN_PREC:
        raise ValueError(f"precision must be >= {nums.MIN_PREC} bits")
    out: list[tuple[gmpy2.mpc, int]] = []
    wp = prec + nums.GUARD_BITS
    with nums.workprec(wp):
        for factor, mult in squarefree_decomposition(p):
            if factor.degree() < 1:
                continue
            roots = _squarefree_roots(factor, wp)
            out.extend((r, mult) for r in roots)
        scale = max(abs(nums.mpfr(c)) for c in p.coeffs)
        bound = nums.mpfr(2) ** (8 - prec) * scale
        for r, _ in out:
            rad = max(nums.mpfr(1), abs(r)) ** p.degree()
            resid = abs(p.eval(r))
            if resid > bound * rad:
                raise NumericError(
                    "root refinement did not converge", residual=float(resid / rad)
                )
    out.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return out


def _squarefree_roots(f: Poly, wp: int) -> list[gmpy2.mpc]:
    import mpmath

    coeffs_desc = [nums.to_mpmath(nums.mpfr(c)) for c in reversed(f.coeffs)]
    raw = mpmath.polyroots(coeffs_desc, maxsteps=200, extraprec=wp // 2)
    fd = f.derivative()
    roots = []
    for r in raw:
        z = nums.from_mpmath(r)
        for _ in range(4):  # Newton polish at working precision
            dv = fd.eval(z)
            if dv == 0:
                break
            z = z - f.eval(z) / dv
        roots.append(z)
    return roots
