"""Decision layer on top of exponents, monodromy and invariant forms:

* per-point and global exponent-gap criteria (assumptions A and B) whose
  joint failure-free verdict implies an infinite-index monodromy group,
* classification of exponent shifts by their effect on the symplectic
  structure (half-integer / quarter / determinant-obstructed /
  irrational),
* Galois admissibility of quarter shifts from the Jordan data at 0,
* the locally-geometric check (quasi-unipotent + symplectic certificate
  at every point, with the global invariant-form verdict), and
* the quadratic-twist pipeline realizing half-integer shifts at a
  relocated ordinary point.

Verdicts carry functional rule identifiers and a ``formal`` flag: the
exponent-gap criteria are stated for operators of geometric origin, and
geometricity itself is never established computationally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from . import nums
from .errors import MathDomainError
from .local import (
    ExponentList,
    SingularPoint,
    exponents_at,
    riemann_symbol,
)
from .monodromy import JordanData, MonodromyData, jordan_classify, monodromy_matrices
from .operators import Moebius, ThetaOperator, moebius_pullback, shift
from .symplectic import invariant_form_space, symplectic_certificate

RULE_HALF = "half-integer-shift-preserves-symplectic-structure"
RULE_QUARTER = "quarter-shift-forces-degenerate-invariant-forms"
RULE_DET = "determinant-obstruction-non-quarter-rational-shift"
RULE_IRRATIONAL = "irrational-shift-breaks-quasi-unipotence"
RULE_AB = "exponent-gap-criterion-implies-infinite-index"
RULE_TWIST = "odd-quadratic-twist-keeps-group-class"


# ---------------------------------------------------------------------------
# Assumptions A and B from sorted exponents
# ---------------------------------------------------------------------------

def assumption_check(exps, n_local: int | None = None) -> tuple[bool, bool]:
    """(satisfies_A, satisfies_B) from four sorted exponents.

    With k distinct values: k=1 -> both; k=2 -> B only; k=3 -> A only;
    k=4 -> A iff N*(a3-a2) == 1 and B iff N*(a2-a1) == 1, where N is the
    order of the local monodromy (required argument in that case).
    """
    values = list(exps)
    if len(values) != 4:
        raise MathDomainError("assumption check is specific to order 4")
    if any(not isinstance(v, Fraction) for v in values):
        raise MathDomainError("assumption check requires rational exponents")
    values.sort()
    k = len(set(values))
    if k == 1:
        return True, True
    if k == 2:
        return False, True
    if k == 3:
        return True, False
    if n_local is None:
        raise MathDomainError("k = 4 requires the local monodromy order N")
    a1, a2, a3, _ = values
    return n_local * (a3 - a2) == 1, n_local * (a2 - a1) == 1


@dataclass
class PointAB:
    point: SingularPoint
    exponents: list
    k: int
    n_local: int | None
    semisimple: bool | None
    satisfies_a: bool
    satisfies_b: bool

    def to_doc(self):
        return {
            "point": str(self.point),
            "exponents": [str(e) for e in self.exponents],
            "distinct": self.k,
            "local_order": self.n_local,
            "semisimple": self.semisimple,
            "A": self.satisfies_a,
            "B": self.satisfies_b,
        }


@dataclass
class ABStatus:
    points: list
    all_a: bool
    all_b: bool
    infinite_index_implied: bool
    formal: bool = True  # geometricity of the operator is not established here

    def at(self, key) -> PointAB:
        for p in self.points:
            if p.point.key() == key:
                return p
        raise KeyError(f"no point {key}")

    def to_doc(self):
        return {
            "rule": RULE_AB,
            "points": [p.to_doc() for p in self.points],
            "all_A": self.all_a,
            "all_B": self.all_b,
            "infinite_index_implied": self.infinite_index_implied,
            "formal": self.formal,
        }


def global_ab(op: ThetaOperator, prec: int = nums.DEFAULT_PREC) -> ABStatus:
    """Exponent-gap verdict at every singular point; the local monodromy
    order is taken from the numeric Jordan classification where four
    distinct exponents make it necessary."""
    rs = riemann_symbol(op, prec)
    need_n = [p for p, e in rs.rows if e.distinct_count() == 4]
    orders: dict = {}
    semis: dict = {}
    if need_n:
        md = monodromy_matrices(
            op, prec, points=[p.key() for p in need_n]
        )
        for p in need_n:
            jd = jordan_classify(md.at(p.key()), prec=prec)
            orders[p.key()] = jd.order
            semis[p.key()] = jd.semisimple
    points = []
    for p, exps in rs.rows:
        vals = exps.sorted_values()
        k = exps.distinct_count()
        n_local = orders.get(p.key())
        a, b = assumption_check(vals, n_local)
        points.append(
            PointAB(
                point=p, exponents=vals, k=k, n_local=n_local,
                semisimple=semis.get(p.key()), satisfies_a=a, satisfies_b=b,
            )
        )
    all_a = all(p.satisfies_a for p in points)
    all_b = all(p.satisfies_b for p in points)
    return ABStatus(
        points=points, all_a=all_a, all_b=all_b,
        infinite_index_implied=all_a or all_b,
    )


# ---------------------------------------------------------------------------
# Shift classification
# ---------------------------------------------------------------------------

@dataclass
class ShiftClass:
    alpha: object
    klass: str
    arithmetic_preserved: bool | None
    density_evidence: str
    rule: str
    conditional: bool = False

    def to_doc(self):
        return {
            "alpha": str(self.alpha),
            "class": self.klass,
            "arithmetic_preserved": self.arithmetic_preserved,
            "density_evidence": self.density_evidence,
            "rule": self.rule,
            "conditional": self.conditional,
        }


def classify_shift(
    op: ThetaOperator,
    alpha,
    density_evidence: str = "auto",
    prec: int = nums.DEFAULT_PREC,
) -> ShiftClass:
    """Effect of the shift by alpha on the symplectic structure, assuming
    the input operator is symplectic.

    Depends only on alpha modulo the integer lattice: half-integers
    preserve the structure (and the arithmetic/thin dichotomy); strict
    quarter-integers destroy every nondegenerate invariant form provided
    the group is Zariski-dense (a singularity where all exponents agree
    suffices); other rationals already violate det = 1; irrational
    alpha breaks quasi-unipotence at 0.
    """
    if density_evidence == "auto":
        rs = riemann_symbol(op, prec)
        has_mum = any(e.distinct_count() == 1 for _, e in rs.rows)
        density_evidence = "has_mum" if has_mum else "unknown"
    if density_evidence not in ("has_mum", "assume_dense", "unknown"):
        raise MathDomainError(f"unknown density evidence {density_evidence!r}")
    if not isinstance(alpha, Fraction):
        if isinstance(alpha, int):
            alpha = Fraction(alpha)
        else:
            return ShiftClass(
                alpha=alpha, klass="irrational-nonquasiunipotent",
                arithmetic_preserved=None, density_evidence=density_evidence,
                rule=RULE_IRRATIONAL,
            )
    if (2 * alpha).denominator == 1:
        return ShiftClass(
            alpha=alpha, klass="half-integer-symplectic",
            arithmetic_preserved=True, density_evidence=density_evidence,
            rule=RULE_HALF,
        )
    if (4 * alpha).denominator == 1:
        conditional = density_evidence == "unknown"
        return ShiftClass(
            alpha=alpha,
            klass="quarter-conditional" if conditional else "quarter-nonsymplectic",
            arithmetic_preserved=None, density_evidence=density_evidence,
            rule=RULE_QUARTER, conditional=conditional,
        )
    return ShiftClass(
        alpha=alpha, klass="det-obstructed", arithmetic_preserved=None,
        density_evidence=density_evidence, rule=RULE_DET,
    )


# ---------------------------------------------------------------------------
# Galois admissibility of quarter shifts
# ---------------------------------------------------------------------------

_DISPLAYED_FORMS = [
    ((Fraction(0), 2), (Fraction(1, 2), 2)),
    ((Fraction(1, 4), 2), (Fraction(3, 4), 2)),
    ((Fraction(0), 1), (Fraction(0), 1), (Fraction(1, 2), 1), (Fraction(1, 2), 1)),
    ((Fraction(1, 4), 1), (Fraction(1, 4), 1), (Fraction(3, 4), 1), (Fraction(3, 4), 1)),
    ((Fraction(1, 6), 1), (Fraction(1, 3), 1), (Fraction(2, 3), 1), (Fraction(5, 6), 1)),
    ((Fraction(1, 12), 1), (Fraction(5, 12), 1), (Fraction(7, 12), 1), (Fraction(11, 12), 1)),
    ((Fraction(1, 8), 1), (Fraction(3, 8), 1), (Fraction(5, 8), 1), (Fraction(7, 8), 1)),
]


def _galois_closed(pairs) -> bool:
    """Within each block-size class the eigenvalue multiset must be a
    union of full primitive-root orbits with uniform multiplicity."""
    by_size: dict = {}
    for expo, size in pairs:
        by_size.setdefault(size, []).append(expo)
    for size, expos in by_size.items():
        counts: dict = {}
        for e in expos:
            counts[e] = counts.get(e, 0) + 1
        by_order: dict = {}
        for e, c in counts.items():
            by_order.setdefault(e.denominator, {})[e.numerator] = c
        for q, residues in by_order.items():
            orbit = [p for p in range(q) if _coprime(p, q)] or [0]
            mults = {residues.get(p, 0) for p in orbit}
            if len(mults) != 1 or 0 in mults:
                return False
            if set(residues) - set(orbit):
                return False
    return True


def _coprime(a, b):
    from math import gcd

    return gcd(a, b) == 1


@dataclass
class GaloisEvidence:
    e_pairs: list
    eprime_pairs: list
    e_invariant: bool
    eprime_invariant: bool
    admissible: bool
    in_displayed_list: bool

    def to_doc(self):
        return {
            "E": [[str(e), s] for e, s in self.e_pairs],
            "E_prime": [[str(e), s] for e, s in self.eprime_pairs],
            "E_invariant": self.e_invariant,
            "E_prime_invariant": self.eprime_invariant,
            "admissible": self.admissible,
            "in_displayed_list": self.in_displayed_list,
        }


def quarter_shift_admissible(jd: JordanData) -> GaloisEvidence:
    """Can the local matrix and its quarter-turn scaling both be integral?

    Both the eigenvalue/block-size set E and its quarter-turn rotation E'
    must be closed under Galois conjugation of roots of unity.  The
    verdict is computed abstractly and cross-checked against the explicit
    seven-case list; tests treat disagreement on symplectic-shaped input
    as a defect.
    """
    e_pairs = jd.pairs()
    eprime_pairs = sorted(
        ((expo + Fraction(1, 4)) % 1, size) for expo, size in e_pairs
    )
    e_inv = _galois_closed(e_pairs)
    ep_inv = _galois_closed(eprime_pairs)
    displayed = tuple(sorted(e_pairs)) in [tuple(sorted(f)) for f in _DISPLAYED_FORMS]
    return GaloisEvidence(
        e_pairs=e_pairs, eprime_pairs=eprime_pairs,
        e_invariant=e_inv, eprime_invariant=ep_inv,
        admissible=e_inv and ep_inv, in_displayed_list=displayed,
    )


# ---------------------------------------------------------------------------
# Locally geometric check
# ---------------------------------------------------------------------------

@dataclass
class PointGeometry:
    point: SingularPoint
    quasi_unipotent: bool
    jordan: JordanData | None
    certificate: object

    def to_doc(self):
        return {
            "point": str(self.point),
            "quasi_unipotent": self.quasi_unipotent,
            "jordan": self.jordan.to_doc() if self.jordan else None,
            "certificate": self.certificate.to_doc() if self.certificate else None,
        }


@dataclass
class LocalGeometryReport:
    points: list
    locally_geometric: bool
    global_form_verdict: str
    global_form_dimension: int
    max_abs_pfaffian: float
    geometric_obstruction: bool

    def to_doc(self):
        return {
            "points": [p.to_doc() for p in self.points],
            "locally_geometric": self.locally_geometric,
            "global_form_verdict": self.global_form_verdict,
            "global_form_dimension": self.global_form_dimension,
            "max_abs_pfaffian": nums.nstr(self.max_abs_pfaffian, 64),
            "geometric_obstruction": self.geometric_obstruction,
        }


def locally_geometric_check(
    op: ThetaOperator, prec: int = nums.DEFAULT_PREC
) -> LocalGeometryReport:
    """Quasi-unipotence and the symplecticity certificate at every
    singular point, plus the global invariant-form verdict.  A locally
    geometric operator with no nondegenerate global invariant form is
    reported as obstructed (it cannot carry the intersection pairing of
    a geometric family)."""
    rs = riemann_symbol(op, prec)
    md = monodromy_matrices(op, prec)
    points = []
    for p, exps in rs.rows:
        qu = exps.all_rational()
        mat = md.at(p.key())
        jd = jordan_classify(mat, prec=prec)
        cert = symplectic_certificate(mat, prec=prec)
        points.append(
            PointGeometry(point=p, quasi_unipotent=qu, jordan=jd, certificate=cert)
        )
    space = invariant_form_space(md.finite(), prec=prec)
    locally = all(p.quasi_unipotent and p.certificate.passes for p in points)
    obstruction = locally and space.verdict != "nondegenerate-exists"
    return LocalGeometryReport(
        points=points,
        locally_geometric=locally,
        global_form_verdict=space.verdict,
        global_form_dimension=space.dimension,
        max_abs_pfaffian=space.max_abs_pfaffian,
        geometric_obstruction=obstruction,
    )


# ---------------------------------------------------------------------------
# Quadratic twist pipeline
# ---------------------------------------------------------------------------

@dataclass
class TwistReport:
    k: int
    point: Fraction
    origin_exponents: list
    origin_order: int | None
    origin_a: bool
    origin_b: bool
    inherits_infinite_index: str
    rule: str = RULE_TWIST

    def to_doc(self):
        return {
            "k": self.k,
            "moved_point": str(self.point),
            "origin_exponents": [str(e) for e in self.origin_exponents],
            "origin_local_order": self.origin_order,
            "origin_A": self.origin_a,
            "origin_B": self.origin_b,
            "inherits_infinite_index": self.inherits_infinite_index,
            "rule": self.rule,
        }


def twist_pipeline(
    op: ThetaOperator,
    k: int,
    point,
    prec: int = nums.DEFAULT_PREC,
    compute_order: bool = True,
):
    """Relocate an ordinary point to the origin and shift by k/2 (k odd).

    This realizes the quadratic twist by t^k of the underlying family;
    the resulting operator has exponents k/2, (k+2)/2, (k+4)/2, (k+6)/2
    at the new origin, local order 2 there, and fails both exponent-gap
    assumptions at that point, while the local monodromy at all other
    finite singularities is untouched.
    """
    if k % 2 == 0:
        raise MathDomainError("twist exponent k must be odd (even k leaves the origin ordinary)")
    p = Fraction(point)
    exps = exponents_at(op, p, prec)
    ordinary = exps.sorted_values() == [Fraction(j) for j in range(op.canonical().order)]
    if not ordinary:
        raise MathDomainError(f"{p} is a singular point; the twist needs an ordinary one")
    mu = Moebius.translation(p)
    relocated = moebius_pullback(op, mu)
    twisted = shift(relocated, Fraction(k, 2))
    origin_exps = exponents_at(twisted, Fraction(0), prec).sorted_values()
    n_local = None
    semis = None
    if compute_order:
        md = monodromy_matrices(twisted, prec, points=[("rational", Fraction(0))])
        jd = jordan_classify(md.at(("rational", Fraction(0))), prec=prec)
        n_local = jd.order
        semis = jd.semisimple
    a, b = assumption_check(origin_exps, n_local if n_local is not None else 2)
    report = TwistReport(
        k=k,
        point=p,
        origin_exponents=origin_exps,
        origin_order=n_local,
        origin_a=a,
        origin_b=b,
        inherits_infinite_index="conditional-on-group-class-preservation",
    )
    return twisted, report
