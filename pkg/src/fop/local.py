"""Singularities, indicial equations, local exponents, Riemann symbols.

All finite singular points are zeros of the leading coefficient of the
primitive d-form.  At each candidate the operator is recentered (exactly
at rational points, numerically at algebraic ones), rewritten as a local
theta-form with polynomial coefficients, and tested for regularity: the
point is regular precisely when every coefficient vanishes at least to
the order of the leading one.  The indicial polynomial is the constant
term of that normalized theta-form; its roots are the local exponents.
Infinity is handled in the coordinate s = 1/t, where Theta_t = -Theta_s;
exponents at infinity are reported in the s-convention (a solution
asymptotic to s^rho has exponent rho).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from . import nums
from .errors import IrregularSingularityError, MathDomainError, NumericError
from .operators import (
    INFINITY,
    ThetaOperator,
    _falling_factorial_coeffs,
    theta_to_d,
)
from .poly import (
    Poly,
    deflate_rational_roots,
    numeric_roots,
    shift_coeffs_numeric,
    squarefree_decomposition,
)


@dataclass(frozen=True)
class SingularPoint:
    """A point of interest on the parameter line.

    kind is one of "rational", "algebraic", "infinity".  Algebraic points
    carry the exact square-free factor of the leading coefficient they
    annihilate, for reproducibility, together with a high-precision
    location.  ``apparent`` marks zeros of the leading coefficient whose
    exponents are 0..n-1 (reported as ordinary-with-flag, not singular).
    """

    kind: str
    value: object = None
    minpoly: Poly | None = None
    is_regular: bool = True
    apparent: bool = False

    @classmethod
    def rational(cls, value, regular=True, apparent=False) -> "SingularPoint":
        return cls("rational", Fraction(value), None, regular, apparent)

    @classmethod
    def algebraic(cls, value, minpoly: Poly, regular=True, apparent=False) -> "SingularPoint":
        return cls("algebraic", value, minpoly, regular, apparent)

    @classmethod
    def infinity(cls, regular=True, apparent=False) -> "SingularPoint":
        return cls("infinity", INFINITY, None, regular, apparent)

    def is_infinity(self) -> bool:
        return self.kind == "infinity"

    def as_mpc(self) -> gmpy2.mpc:
        if self.kind == "rational":
            return nums.mpc(self.value)
        if self.kind == "algebraic":
            return gmpy2.mpc(self.value)
        raise MathDomainError("the point at infinity has no complex coordinate")

    def key(self):
        """Hashable identity usable across recomputations."""
        if self.kind == "rational":
            return ("rational", self.value)
        if self.kind == "infinity":
            return ("infinity",)
        z = self.value
        return ("algebraic", round(float(z.real), 12), round(float(z.imag), 12))

    def __str__(self):
        if self.kind == "rational":
            return str(self.value)
        if self.kind == "infinity":
            return "inf"
        return f"root of {self.minpoly!r} near {complex(self.value):.6g}"


@dataclass(frozen=True)
class ExponentList:
    """Multiset of local exponents; values are Fraction when snapped."""

    entries: tuple  # ((value, multiplicity), ...) sorted

    @classmethod
    def from_pairs(cls, pairs) -> "ExponentList":
        def sort_key(pair):
            v = pair[0]
            if isinstance(v, Fraction):
                return (0, v, 0.0)
            return (1, float(v.real), float(v.imag))

        return cls(tuple(sorted(pairs, key=sort_key)))

    def total(self) -> int:
        return sum(m for _, m in self.entries)

    def distinct_count(self) -> int:
        return len(self.entries)

    def sorted_values(self) -> list:
        out = []
        for v, m in self.entries:
            out.extend([v] * m)
        return out

    def all_rational(self) -> bool:
        return all(isinstance(v, Fraction) for v, _ in self.entries)

    def multiplicities(self) -> list[int]:
        return [m for _, m in self.entries]

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.sorted_values()) + ")"


@dataclass(frozen=True)
class RiemannSymbol:
    """All singular points with their exponent multisets."""

    order: int
    rows: tuple  # ((SingularPoint, ExponentList), ...)
    apparent: tuple = ()

    def points(self) -> list[SingularPoint]:
        return [p for p, _ in self.rows]

    def at(self, point) -> ExponentList:
        key = point.key() if isinstance(point, SingularPoint) else point
        for p, exps in self.rows:
            if p.key() == key:
                return exps
        raise KeyError(f"no singular point {point}")

    def has_point(self, key) -> bool:
        return any(p.key() == key for p, _ in self.rows)

    def __str__(self):
        lines = []
        for p, exps in self.rows:
            lines.append(f"{str(p):>16} : {exps}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Local theta-form with polynomial coefficients
# ---------------------------------------------------------------------------

def primitive_d_polys(op: ThetaOperator) -> list[Poly]:
    if op.is_zero():
        raise MathDomainError("zero operator")
    return theta_to_d(op.canonical()).polynomial_coeffs()


def local_theta_polys(op: ThetaOperator, point) -> list[Poly]:
    """Exact local theta-form coefficients a_j(tau) at a rational point or
    at infinity, normalized so a_n(0) != 0 (raises at irregular points)."""
    return _local_theta_stripped(op, point)[0]


def _local_theta_stripped(op: ThetaOperator, point):
    if isinstance(point, SingularPoint):
        point = INFINITY if point.is_infinity() else point.value
    op = op.canonical()
    n = op.order
    if point is INFINITY:
        polys = [c.num for c in op.coeffs]
        deg = max(p.degree() for p in polys if not p.is_zero())
        hats = [
            (Poly() if p.is_zero() else p.reversal(deg) * (Fraction(-1) ** i))
            for i, p in enumerate(polys)
        ]
        return _strip_theta_polys(hats, "inf")
    dpolys = primitive_d_polys(op)
    shifted = [p.taylor_shift(Fraction(point)) for p in dpolys]
    ff = _falling_factorial_coeffs(n)
    bs = []
    for j in range(n + 1):
        acc = Poly()
        for i in range(j, n + 1):
            s = ff[i][j] if j < len(ff[i]) else Fraction(0)
            if s != 0 and not shifted[i].is_zero():
                acc = acc + Poly([0] * (n - i) + [1]) * shifted[i] * s
        bs.append(acc)
    return _strip_theta_polys(bs, point)


def _strip_theta_polys(bs: list[Poly], label):
    n = len(bs) - 1
    if bs[n].is_zero():
        raise MathDomainError(f"leading coefficient vanishes identically at {label}")
    m = bs[n].valuation()
    for j, b in enumerate(bs):
        if not b.is_zero() and b.valuation() < m:
            raise IrregularSingularityError(label)
    return [Poly(b.coeffs[m:]) if not b.is_zero() else b for b in bs], m


def local_theta_numeric(op: ThetaOperator, center) -> list[list[gmpy2.mpc]]:
    """Numeric local theta-form at an algebraic center (current context
    precision); same normalization as local_theta_polys."""
    op = op.canonical()
    n = op.order
    dpolys = primitive_d_polys(op)
    shifted = [shift_coeffs_numeric(p, center) for p in dpolys]
    scale = max(
        (abs(c) for cs in shifted for c in cs), default=nums.mpfr(1)
    )
    tol = nums.mpfr(2) ** (40 - nums.current_prec()) * max(scale, nums.mpfr(1))
    ff = _falling_factorial_coeffs(n)
    width = max(len(cs) for cs in shifted) + n
    bs = []
    for j in range(n + 1):
        acc = [nums.mpc(0)] * width
        for i in range(j, n + 1):
            s = ff[i][j] if j < len(ff[i]) else Fraction(0)
            if s == 0:
                continue
            sv = nums.mpfr(s)
            for k, c in enumerate(shifted[i]):
                acc[k + n - i] += sv * c
        bs.append(acc)
    m = _numeric_valuation(bs[n], tol)
    if m is None:
        raise MathDomainError(f"leading coefficient vanishes identically near {center}")
    for b in bs:
        v = _numeric_valuation(b, tol)
        if v is not None and v < m:
            raise IrregularSingularityError(nums.nstr(center))
    return [b[m:] for b in bs]


def _numeric_valuation(coeffs, tol):
    for k, c in enumerate(coeffs):
        if abs(c) > tol:
            return k
    return None


# ---------------------------------------------------------------------------
# Indicial polynomial and exponents
# ---------------------------------------------------------------------------

def indicial_polynomial(op: ThetaOperator, point, prec: int = nums.DEFAULT_PREC):
    """Indicial polynomial whose roots are the local exponents.

    Exact (Poly over Q) at rational points and infinity; a list of mpc
    coefficients at algebraic points.  Raises IrregularSingularityError
    at irregular singular points.
    """
    if isinstance(point, SingularPoint) and point.kind == "algebraic":
        with nums.workprec(prec + nums.GUARD_BITS):
            local = local_theta_numeric(op, point.as_mpc())
            return [b[0] for b in local]
    local = local_theta_polys(op, point)
    return Poly([b[0] for b in local])


def exponents_at(op: ThetaOperator, point, prec: int = nums.DEFAULT_PREC) -> ExponentList:
    ind = indicial_polynomial(op, point, prec)
    if isinstance(ind, Poly):
        return _exponents_exact(ind, prec)
    with nums.workprec(prec + nums.GUARD_BITS):
        return _exponents_numeric(ind, prec)


def _exponents_exact(ind: Poly, prec: int) -> ExponentList:
    pairs = []
    for factor, mult in squarefree_decomposition(ind):
        rational, rest = deflate_rational_roots(factor)
        for r, m in rational.items():
            pairs.append((r, m * mult))
        if rest.degree() > 0:
            for z, m in numeric_roots(rest, prec):
                snapped = nums.snap_fraction(z, prec)
                pairs.append((snapped if snapped is not None else z, m * mult))
    return ExponentList.from_pairs(pairs)


def _exponents_numeric(coeffs: list, prec: int) -> ExponentList:
    import mpmath

    wp = nums.current_prec()
    while coeffs and abs(coeffs[-1]) == 0:
        coeffs = coeffs[:-1]
    desc = [nums.to_mpmath(c) for c in reversed(coeffs)]
    try:
        raw = mpmath.polyroots(desc, maxsteps=300, extraprec=wp // 2)
    except mpmath.libmp.NoConvergence as exc:
        raise NumericError(f"indicial roots did not converge: {exc}") from exc
    roots = [nums.from_mpmath(r) for r in raw]
    clusters = _cluster(roots, nums.mpfr("1e-6") * max(nums.mpfr(1), max(abs(r) for r in roots)))
    pairs = []
    for members in clusters:
        mean = sum(members, nums.mpc(0)) / len(members)
        snapped = nums.snap_fraction(mean, prec)
        pairs.append((snapped if snapped is not None else mean, len(members)))
    return ExponentList.from_pairs(pairs)


def _cluster(values, radius):
    clusters: list[list] = []
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        for members in clusters:
            if abs(v - members[0]) < radius:
                members.append(v)
                break
        else:
            clusters.append([v])
    return clusters


def _ordinary_exponents(n: int) -> list[Fraction]:
    return [Fraction(k) for k in range(n)]


# ---------------------------------------------------------------------------
# Singular points and the Riemann symbol
# ---------------------------------------------------------------------------

def _classify_finite_rational(op, value, prec):
    try:
        local = local_theta_polys(op, value)
    except IrregularSingularityError:
        return SingularPoint.rational(value, regular=False), None
    ind = Poly([b[0] for b in local])
    exps = _exponents_exact(ind, prec)
    ordinary = exps.sorted_values() == _ordinary_exponents(len(local) - 1)
    point = SingularPoint.rational(value, regular=True, apparent=ordinary)
    return point, exps


def _classify_infinity(op, prec):
    try:
        local, strip = _local_theta_stripped(op, INFINITY)
    except IrregularSingularityError:
        return SingularPoint.infinity(regular=False), None
    ind = Poly([b[0] for b in local])
    exps = _exponents_exact(ind, prec)
    ordinary = exps.sorted_values() == _ordinary_exponents(len(local) - 1)
    if ordinary and strip == 0:
        return None, None  # infinity is a plain ordinary point
    return SingularPoint.infinity(regular=True, apparent=ordinary), exps


def _classify_finite_algebraic(op, z, minpoly, prec):
    try:
        with nums.workprec(prec + nums.GUARD_BITS):
            local = local_theta_numeric(op, z)
            ind = [b[0] for b in local]
            exps = _exponents_numeric(ind, prec)
    except IrregularSingularityError:
        return SingularPoint.algebraic(z, minpoly, regular=False), None
    ordinary = (
        exps.all_rational()
        and exps.sorted_values() == _ordinary_exponents(len(local) - 1)
    )
    point = SingularPoint.algebraic(z, minpoly, regular=True, apparent=ordinary)
    return point, exps


def local_data(op: ThetaOperator, prec: int = nums.DEFAULT_PREC):
    """(singular rows, apparent points): one pass over all candidates."""
    op = op.canonical()
    if op.is_zero():
        raise MathDomainError("zero operator")
    dpolys = primitive_d_polys(op)
    lead = dpolys[-1]
    rows = []
    apparent = []

    def push(point, exps):
        if point.apparent:
            apparent.append(point)
        else:
            rows.append((point, exps))

    if lead.degree() > 0:
        rational, rest = deflate_rational_roots(lead)
        for value in sorted(rational):
            push(*_classify_finite_rational(op, value, prec))
        if rest.degree() > 0:
            factors = squarefree_decomposition(rest)
            with nums.workprec(prec + nums.GUARD_BITS):
                for factor, _ in factors:
                    froots = numeric_roots(factor, prec)
                    branch = [
                        _classify_finite_algebraic(op, z, factor, prec)
                        for z, _ in froots
                    ]
                    _check_conjugates(branch)
                    for point, exps in branch:
                        push(point, exps)
    point, exps = _classify_infinity(op, prec)
    if point is not None:
        push(point, exps)
    return rows, apparent


def _check_conjugates(branch):
    """Conjugate algebraic points must have identical snapped exponents."""
    snapped = [
        tuple(exps.entries) if exps is not None and exps.all_rational() else None
        for _, exps in branch
    ]
    rationals = [s for s in snapped if s is not None]
    if rationals and len(set(rationals)) > 1:
        raise NumericError(
            "conjugate singular points disagree on snapped exponents; "
            "raise the working precision"
        )


def singular_points(op: ThetaOperator, prec: int = nums.DEFAULT_PREC) -> list[SingularPoint]:
    rows, _ = local_data(op, prec)
    return [p for p, _ in rows]


def riemann_symbol(op: ThetaOperator, prec: int = nums.DEFAULT_PREC) -> RiemannSymbol:
    op = op.canonical()
    rows, apparent = local_data(op, prec)
    for point, _ in rows:
        if not point.is_regular:
            raise IrregularSingularityError(str(point))
    return RiemannSymbol(order=op.order, rows=tuple(rows), apparent=tuple(apparent))


def is_mum_point(op: ThetaOperator, point, prec: int = nums.DEFAULT_PREC) -> bool:
    """True iff all local exponents at the point coincide."""
    return exponents_at(op, point, prec).distinct_count() == 1


def quasi_unipotence_check(exps: ExponentList) -> bool:
    """All exponents rational, i.e. local monodromy eigenvalues are roots
    of unity."""
    return exps.all_rational()


def fuchs_relation_check(rs: RiemannSymbol, n: int | None = None):
    """(lhs, rhs, ok) for the classical global exponent-sum constraint."""
    if n is None:
        n = rs.order
    lhs = Fraction(0)
    for _, exps in rs.rows:
        if not exps.all_rational():
            raise MathDomainError("Fuchs relation requires rational exponents")
        for v, m in exps.entries:
            lhs += v * m
    s = len(rs.rows)
    rhs = Fraction((s - 2) * n * (n - 1), 2)
    return lhs, rhs, lhs == rhs
