from fractions import Fraction

import pytest

from fop import linalg, nums
from fop.errors import NumericError
from fop.local import riemann_symbol
from fop.monodromy import (
    continuation,
    jordan_classify,
    monodromy_matrices,
    scalar_scale,
)
from fop.operators import shift
from fop.opformat import parse


def test_first_order_multiplier():
    md = monodromy_matrices(parse("T - 1/2"), 128)
    m0 = md.at(("rational", Fraction(0)))
    with nums.workprec(192):
        assert abs(m0.matrix[0][0] + 1) < nums.mpfr("1e-30")


def test_constant_path_identity(no2):
    vec = continuation(no2, [Fraction(3), Fraction(3)], [1, 2, 3, 4], 128)
    with nums.workprec(192):
        for got, want in zip(vec, [1, 2, 3, 4]):
            assert abs(got - want) < nums.mpfr("1e-30")


def test_no2_mum_at_zero(no2, monodromy_of):
    md = monodromy_of("no2", no2, 128)
    m0 = md.at(("rational", Fraction(0)))
    with nums.workprec(192):
        a = linalg.mat_sub(m0.matrix, linalg.identity(4))
        a3 = linalg.mat_mul(linalg.mat_mul(a, a), a)
        a4 = linalg.mat_mul(a3, a)
        assert linalg.max_abs(a4) < nums.mpfr("1e-10")
        assert linalg.max_abs(a3) > nums.mpfr("1e-3")
    jd = jordan_classify(m0)
    assert jd.blocks[0][2] == [4]
    assert jd.order == 1


def test_product_relation(no2, monodromy_of):
    md = monodromy_of("no2", no2, 128)
    with nums.workprec(192):
        prod = linalg.identity(4)
        for m in md.finite():
            prod = linalg.mat_mul(m.matrix, prod)
        prod = linalg.mat_mul(md.at(("infinity",)).matrix, prod)
        dev = linalg.max_abs(linalg.mat_sub(prod, linalg.identity(4)))
        assert dev < nums.mpfr("1e-9")


def test_determinant_matches_exponent_sum(corpus_ops, monodromy_of):
    for cid in ("no2", "ploc"):
        op = corpus_ops[cid]
        md = monodromy_of(cid, op, 128)
        rs = riemann_symbol(op)
        with nums.workprec(192):
            for m in md.matrices:
                total = sum(
                    (v * mult for v, mult in rs.at(m.point.key()).entries),
                    Fraction(0),
                )
                expect = nums.exp_2pi_i(total)
                assert abs(linalg.det(m.matrix) - expect) < nums.mpfr("1e-10")


def test_block_counts_match_distinct_exponents(corpus_ops, monodromy_of):
    for cid in ("no2", "ploc"):
        op = corpus_ops[cid]
        md = monodromy_of(cid, op, 128)
        rs = riemann_symbol(op)
        for m in md.matrices:
            jd = jordan_classify(m)
            assert jd.block_count() == rs.at(m.point.key()).distinct_count()


def test_ploc_jordan_forms(ploc, monodromy_of):
    md = monodromy_of("ploc", ploc, 128)
    for key in (("rational", Fraction(0)), ("infinity",)):
        jd = jordan_classify(md.at(key))
        assert jd.pairs() == [(Fraction(1, 4), 2), (Fraction(3, 4), 2)]
        assert jd.order == 4
    jm = jordan_classify(md.at(("rational", Fraction(-1))))
    assert jm.pairs() == [(Fraction(0), 4)]


def test_scalar_scale_and_shift_agree(no2, monodromy_of):
    md = monodromy_of("no2", no2, 128)
    m0 = md.at(("rational", Fraction(0)))
    scaled = scalar_scale(m0, Fraction(1, 2))
    with nums.workprec(192):
        dev = linalg.max_abs(
            linalg.mat_sub(scaled.matrix, linalg.mat_scale(m0.matrix, nums.mpc(-1)))
        )
        assert dev < nums.mpfr("1e-30")
    shifted = shift(no2, Fraction(1, 2))
    md_s = monodromy_matrices(shifted, 128, points=[("rational", Fraction(0))])
    jd_direct = jordan_classify(md_s.at(("rational", Fraction(0))))
    jd_scaled = jordan_classify(scaled)
    assert jd_direct.pairs() == jd_scaled.pairs()
    assert jd_direct.order == jd_scaled.order == 2


def test_scalar_scale_det_law(no2, monodromy_of):
    md = monodromy_of("no2", no2, 128)
    m0 = md.at(("rational", Fraction(0)))
    with nums.workprec(192):
        d0 = linalg.det(m0.matrix)
        d_quarter = linalg.det(scalar_scale(m0, Fraction(1, 4)).matrix)
        assert abs(d_quarter - d0) < nums.mpfr("1e-25")  # e^{8 pi i/4} = 1
        d_eighth = linalg.det(scalar_scale(m0, Fraction(1, 8)).matrix)
        assert abs(d_eighth + d0) < nums.mpfr("1e-25")  # e^{8 pi i/8} = -1


def test_jordan_identity():
    jd = jordan_classify(linalg.identity(4), prec=128)
    assert jd.pairs() == [(Fraction(0), 1)] * 4
    assert jd.order == 1 and jd.semisimple


def test_jordan_rejects_non_unit_eigenvalue():
    m = [[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    with pytest.raises(NumericError):
        jordan_classify(m, prec=128)


def test_unipotent_at_trivial_singularities(corpus_ops):
    # exponents 0,1,3,4 with trivial local monodromy: N = 1
    md = monodromy_matrices(
        corpus_ops["no21"], 128, points=[("rational", Fraction(-1, 2))]
    )
    jd = jordan_classify(md.at(("rational", Fraction(-1, 2))))
    assert jd.order == 1
    assert jd.pairs() == [(Fraction(0), 1)] * 4


def test_subset_computation_skips_infinity(corpus_ops):
    md = monodromy_matrices(
        corpus_ops["no53"], 128, points=[("rational", Fraction(1))]
    )
    keys = {m.point.key() for m in md.matrices}
    assert ("rational", Fraction(1)) in keys
    assert ("infinity",) not in keys
