import random
from fractions import Fraction

import pytest

from fop import nums
from fop.errors import IrregularSingularityError, MathDomainError
from fop.local import (
    exponents_at,
    fuchs_relation_check,
    indicial_polynomial,
    is_mum_point,
    quasi_unipotence_check,
    riemann_symbol,
    singular_points,
)
from fop.operators import INFINITY, Moebius, moebius_pullback, shift
from fop.opformat import parse
from fop.poly import Poly


def keyset(points):
    return {p.key() for p in points}


def test_singular_points_no2(no2):
    pts = singular_points(no2)
    assert keyset(pts) == {
        ("rational", Fraction(0)),
        ("rational", Fraction(1)),
        ("infinity",),
    }
    assert all(p.is_regular for p in pts)


def test_singular_points_ploc(ploc):
    pts = singular_points(ploc)
    assert keyset(pts) == {
        ("rational", Fraction(0)),
        ("rational", Fraction(1)),
        ("rational", Fraction(-1)),
        ("infinity",),
    }
    assert all(p.is_regular for p in pts)


def test_singular_points_no276(corpus_ops):
    pts = singular_points(corpus_ops["no276"])
    rational = {p.value for p in pts if p.kind == "rational"}
    assert rational == {Fraction(0), Fraction(1), Fraction(-1)}
    algebraic = [p for p in pts if p.kind == "algebraic"]
    assert len(algebraic) == 2
    for p in algebraic:
        assert p.minpoly.monic() == Poly([1, -6, 1]).monic()
    assert ("infinity",) in keyset(pts)


def test_indicial_no2_at_zero(no2):
    ind = indicial_polynomial(no2, Fraction(0))
    assert ind.monic() == Poly([0, 0, 0, 0, 1])  # X^4


def test_indicial_ploc_at_infinity(ploc):
    ind = indicial_polynomial(ploc, INFINITY).monic()
    expect = (Poly([Fraction(-1, 4), 1]) ** 2 * Poly([Fraction(-3, 4), 1]) ** 2).monic()
    assert ind == expect


def test_indicial_at_ordinary_point(no2):
    ind = indicial_polynomial(no2, Fraction(5)).monic()
    expect = Poly([0, 1]) * Poly([-1, 1]) * Poly([-2, 1]) * Poly([-3, 1])
    assert ind == expect.monic()


def test_indicial_irregular_errors():
    op = parse("t^2*D + 1")  # y' = -y/t^2: essential singularity at 0
    with pytest.raises(IrregularSingularityError):
        indicial_polynomial(op, Fraction(0))


def test_riemann_symbol_no21(corpus_ops):
    rs = riemann_symbol(corpus_ops["no21"])
    assert [str(e) for e in rs.at(("rational", Fraction(-1, 2))).sorted_values()] == [
        "0", "1", "3", "4",
    ]
    assert rs.at(("rational", Fraction(0))).sorted_values() == [Fraction(0)] * 4
    assert rs.at(("infinity",)).sorted_values() == [Fraction(1)] * 4


def test_riemann_symbol_no10(corpus_ops):
    rs = riemann_symbol(corpus_ops["no10"])
    half = Fraction(1, 2)
    assert rs.at(("rational", Fraction(0))).sorted_values() == [0, half, half, 1]
    assert rs.at(("rational", Fraction(-1))).sorted_values() == [0, half, half, 1]
    assert rs.at(("infinity",)).sorted_values() == [half] * 4


def test_riemann_symbol_ploc_s_convention(ploc):
    rs = riemann_symbol(ploc)
    q = Fraction(1, 4)
    assert rs.at(("rational", Fraction(0))).sorted_values() == [q, q, 3 * q, 3 * q]
    assert rs.at(("rational", Fraction(1))).sorted_values() == [0, 2, 2, 4]
    assert rs.at(("rational", Fraction(-1))).sorted_values() == [0, 0, 0, 0]
    assert rs.at(("infinity",)).sorted_values() == [q, q, 3 * q, 3 * q]


def test_mum_points(ploc, no2, corpus_ops):
    assert is_mum_point(ploc, Fraction(-1))
    assert is_mum_point(no2, Fraction(0))
    assert not is_mum_point(corpus_ops["no21"], Fraction(-1, 2))


def test_quasi_unipotence(ploc):
    rs = riemann_symbol(ploc)
    assert quasi_unipotence_check(rs.at(("rational", Fraction(0))))
    irr = exponents_at(parse("T^2 - 2"), Fraction(0))
    assert not quasi_unipotence_check(irr)


def test_fuchs_examples(corpus_ops, ploc, no2):
    lhs, rhs, ok = fuchs_relation_check(riemann_symbol(no2))
    assert (lhs, rhs, ok) == (6, 6, True)
    lhs, rhs, ok = fuchs_relation_check(riemann_symbol(corpus_ops["no267"]))
    assert (lhs, rhs, ok) == (36, 36, True)
    lhs, rhs, ok = fuchs_relation_check(riemann_symbol(ploc))
    assert (lhs, rhs, ok) == (12, 12, True)


def test_fuchs_all_corpus(corpus_ops):
    for op in corpus_ops.values():
        assert fuchs_relation_check(riemann_symbol(op))[2]


def test_ordinary_point_law(corpus_ops):
    rng = random.Random(3)
    expect = [Fraction(k) for k in range(4)]
    for cid in ("no2", "no53", "no246", "ploc"):
        op = corpus_ops[cid]
        sing = {
            p.value for p in singular_points(op) if p.kind == "rational"
        }
        tried = 0
        while tried < 10:
            q = Fraction(rng.randint(-40, 40), rng.randint(1, 7))
            if q in sing:
                continue
            tried += 1
            assert exponents_at(op, q).sorted_values() == expect


def test_shift_law_on_symbol(ploc):
    alpha = Fraction(1, 4)
    rs = riemann_symbol(ploc)
    rss = riemann_symbol(shift(ploc, alpha))
    at0 = [v + alpha for v in rs.at(("rational", Fraction(0))).sorted_values()]
    assert rss.at(("rational", Fraction(0))).sorted_values() == at0
    atinf = [v - alpha for v in rs.at(("infinity",)).sorted_values()]
    assert rss.at(("infinity",)).sorted_values() == atinf
    # untouched elsewhere
    assert rss.at(("rational", Fraction(1))).sorted_values() == rs.at(
        ("rational", Fraction(1))
    ).sorted_values()
    assert fuchs_relation_check(rss)[2]


def test_shift_making_origin_singular(corpus_ops):
    # no53 shifted at an ordinary origin-like configuration: use a shift
    # on an operator whose origin is already singular but whose infinity
    # gains exponents consistently with the global constraint.
    op = corpus_ops["no96"]
    sh = shift(op, Fraction(1, 3))
    assert fuchs_relation_check(riemann_symbol(sh))[2]


def test_moebius_invariance_of_symbol(corpus_ops):
    op = corpus_ops["no10"]
    mu = Moebius(1, 1, 0, 1)  # t -> t + 1
    rs = riemann_symbol(op)
    rsp = riemann_symbol(moebius_pullback(op, mu))
    inv = mu.inverse()
    for p, exps in rs.rows:
        if p.is_infinity():
            image = ("infinity",)
        else:
            image = ("rational", inv.apply(p.value))
        assert rsp.at(image).entries == exps.entries


def test_exponent_multiplicity_total(corpus_ops):
    for op in corpus_ops.values():
        rs = riemann_symbol(op)
        for _, exps in rs.rows:
            assert exps.total() == 4
