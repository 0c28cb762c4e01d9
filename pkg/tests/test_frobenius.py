from fractions import Fraction

import pytest

from fop import nums
from fop.frobenius import apply_operator, frobenius_basis
from fop.local import riemann_symbol
from fop.operators import INFINITY, shift
from fop.opformat import parse


def test_no2_mum_group_structure(no2):
    basis = frobenius_basis(no2, Fraction(0), K=16)
    assert len(basis) == 4
    assert [s.exponent for s in basis] == [Fraction(0)] * 4
    assert [s.log_degree() for s in basis] == [0, 1, 2, 3]
    y1 = basis[0]
    # recurrence c_j j^4 = c_{j-1} (j - 1/2)^4, c_0 = 1
    expect = [Fraction(1)]
    for j in range(1, 5):
        expect.append(expect[-1] * (Fraction(2 * j - 1, 2) ** 4) / j**4)
    with nums.workprec(192):
        for j, c in enumerate(expect):
            got = y1.coefficient(0, j)
            assert abs(got - nums.mpfr(c)) < nums.mpfr(2) ** -100
            assert abs(got.imag) < nums.mpfr(2) ** -100


def test_first_order_single_series():
    op = parse("T - 2/3")
    basis = frobenius_basis(op, Fraction(0), K=6)
    assert len(basis) == 1
    s = basis[0]
    assert s.exponent == Fraction(2, 3)
    with nums.workprec(192):
        assert abs(s.coefficient(0, 0) - 1) < nums.mpfr(2) ** -100
        for j in range(1, 5):
            assert abs(s.coefficient(0, j)) < nums.mpfr(2) ** -100


def test_ploc_two_log_groups(ploc):
    basis = frobenius_basis(ploc, Fraction(0), K=12)
    by_exp = {}
    for s in basis:
        by_exp.setdefault(s.exponent, []).append(s)
    assert set(by_exp) == {Fraction(1, 4), Fraction(3, 4)}
    for exp, members in by_exp.items():
        assert len(members) == 2
        assert sorted(m.log_degree() for m in members) == [0, 1]


def test_leading_member_nonzero_and_group_sizes(corpus_ops):
    for cid in ("no2", "no10", "no21", "no96", "ploc"):
        op = corpus_ops[cid]
        rs = riemann_symbol(op)
        for point, exps in rs.rows:
            basis = frobenius_basis(op, point, K=8)
            assert len(basis) == 4
            groups = {}
            for s in basis:
                groups.setdefault(s.exponent, []).append(s)
            assert {e for e, _ in exps.entries} == set(groups)
            for value, mult in exps.entries:
                assert len(groups[value]) == mult
                lead = min(groups[value], key=lambda s: s.slot)
                with nums.workprec(192):
                    assert abs(lead.coefficient(0, 0) - 1) < nums.mpfr("1e-20")


def test_residual_valuation_corpus_k40(corpus_ops):
    K = 40
    for cid in ("no2", "no10", "no53", "no246", "ploc"):
        op = corpus_ops[cid]
        rs = riemann_symbol(op)
        for point, _ in rs.rows:
            for s in frobenius_basis(op, point, K=K):
                res = apply_operator(op, s)
                val = res.valuation()
                if val is None:
                    continue  # residual vanished identically at this width
                assert val - s.exponent >= s.truncation + 1


def test_resonant_no_logs_for_integer_gap(corpus_ops):
    basis = frobenius_basis(corpus_ops["no21"], Fraction(-1, 2), K=20)
    assert sorted(s.exponent for s in basis) == [0, 1, 3, 4]
    assert all(s.log_degree() == 0 for s in basis)


def test_shift_relation_on_series(no2):
    alpha = Fraction(1, 2)
    y = frobenius_basis(no2, Fraction(0), K=20)[0]
    shifted_op = shift(no2, alpha)
    res = apply_operator(shifted_op, y.shift_exponent(alpha))
    val = res.valuation()
    assert val is not None and val >= alpha + 20 - 3


def test_apply_operator_kills_exact_solution():
    op = parse("T - 1/4")
    s = frobenius_basis(op, Fraction(0), K=10)[0]
    res = apply_operator(op, s)
    assert res.valuation() is None or res.valuation() >= Fraction(1, 4) + 11


def test_infinity_basis(no2):
    basis = frobenius_basis(no2, INFINITY, K=10)
    assert [s.exponent for s in basis] == [Fraction(1, 2)] * 4
    assert [s.log_degree() for s in basis] == [0, 1, 2, 3]


def test_truncation_guard(no2):
    with pytest.raises(ValueError):
        frobenius_basis(no2, Fraction(0), K=2)
