import math
from fractions import Fraction

import pytest

from fop import corpus
from fop.errors import MathDomainError
from fop.criteria import (
    assumption_check,
    classify_shift,
    global_ab,
    locally_geometric_check,
    quarter_shift_admissible,
    twist_pipeline,
)
from fop.local import exponents_at
from fop.monodromy import JordanData, jordan_classify
from fop.operators import shift
from fop.opformat import parse


def test_assumption_check_small_k():
    z = Fraction(0)
    assert assumption_check([z, z, z, z]) == (True, True)
    assert assumption_check([z, z, Fraction(2), Fraction(2)]) == (False, True)
    assert assumption_check([z, Fraction(1), Fraction(1), Fraction(2)]) == (True, False)


def test_assumption_check_k4_examples():
    vals = [Fraction(0), Fraction(1), Fraction(3), Fraction(4)]
    assert assumption_check(vals, 1) == (False, True)
    half = [Fraction(1, 2), Fraction(3, 2), Fraction(5, 2), Fraction(7, 2)]
    assert assumption_check(half, 2) == (False, False)


def test_assumption_check_hand_table():
    # exhaustive against the gap rule: A iff N(a3 - a2) = 1, B iff N(a2 - a1) = 1
    for n_local in range(1, 13):
        gaps = [Fraction(0), Fraction(1, n_local), Fraction(2, n_local), Fraction(1), Fraction(2)]
        for g1 in gaps:
            for g2 in gaps:
                for g3 in gaps:
                    a1 = Fraction(0)
                    a2, a3, a4 = a1 + g1, a1 + g1 + g2, a1 + g1 + g2 + g3
                    vals = [a1, a2, a3, a4]
                    k = len(set(vals))
                    got = assumption_check(vals, n_local)
                    if k == 1:
                        assert got == (True, True)
                    elif k == 2:
                        assert got == (False, True)
                    elif k == 3:
                        assert got == (True, False)
                    else:
                        assert got == (n_local * g2 == 1, n_local * g1 == 1)


def test_assumption_check_guards():
    with pytest.raises(MathDomainError):
        assumption_check([Fraction(0)] * 3)
    with pytest.raises(MathDomainError):
        assumption_check([Fraction(0), Fraction(1), Fraction(2), Fraction(3)])  # k=4, no N


def test_global_ab_lists(corpus_ops):
    st2 = global_ab(corpus_ops["no2"])
    assert st2.all_a and st2.infinite_index_implied and st2.formal
    st53 = global_ab(corpus_ops["no53"])
    assert st53.all_b and not st53.all_a


def test_classify_shift_classes(ploc):
    assert classify_shift(ploc, Fraction(3, 2)).klass == "half-integer-symplectic"
    assert classify_shift(ploc, Fraction(3, 2)).arithmetic_preserved is True
    quarter = classify_shift(ploc, Fraction(1, 4))
    assert quarter.klass == "quarter-nonsymplectic"
    assert quarter.density_evidence == "has_mum"
    assert classify_shift(ploc, Fraction(1, 3)).klass == "det-obstructed"
    assert classify_shift(ploc, math.sqrt(2)).klass == "irrational-nonquasiunipotent"


def test_classify_shift_coset_invariance(ploc):
    for alpha in (Fraction(1, 4), Fraction(1, 2), Fraction(2, 3)):
        a = classify_shift(ploc, alpha)
        b = classify_shift(ploc, alpha + 1)
        assert a.klass == b.klass


def test_classify_shift_conditional_without_density():
    # an operator with no all-equal exponent column: use a quarter shift of
    # a hypergeometric-like op with distinct exponents everywhere
    op = parse("T*(T-1/3)*(T-2/3)*(T-1/2) - t*(T+1/5)*(T+2/5)*(T+3/5)*(T+4/5)")
    verdict = classify_shift(op, Fraction(1, 4))
    assert verdict.klass == "quarter-conditional" and verdict.conditional
    forced = classify_shift(op, Fraction(1, 4), density_evidence="assume_dense")
    assert forced.klass == "quarter-nonsymplectic"


def _jordan(pairs):
    blocks = {}
    for expo, size in pairs:
        blocks.setdefault(expo, []).append(size)
    blist = [
        (expo, None, sorted(sizes, reverse=True)) for expo, sizes in sorted(blocks.items())
    ]
    order = math.lcm(*[expo.denominator for expo, _ in pairs])
    semis = all(s == 1 for _, s in pairs)
    return JordanData(blocks=blist, order=order, semisimple=semis)


def test_quarter_admissibility_examples():
    pm1 = _jordan([(Fraction(0), 2), (Fraction(1, 2), 2)])
    ev = quarter_shift_admissible(pm1)
    assert ev.admissible and ev.in_displayed_list
    mum = _jordan([(Fraction(0), 4)])
    assert not quarter_shift_admissible(mum).admissible
    eighth = _jordan(
        [(Fraction(1, 8), 1), (Fraction(3, 8), 1), (Fraction(5, 8), 1), (Fraction(7, 8), 1)]
    )
    ev8 = quarter_shift_admissible(eighth)
    assert ev8.admissible and ev8.in_displayed_list


def test_quarter_admissibility_i_scaling_symmetry():
    cases = [
        [(Fraction(0), 2), (Fraction(1, 2), 2)],
        [(Fraction(1, 4), 2), (Fraction(3, 4), 2)],
        [(Fraction(0), 4)],
        [(Fraction(1, 6), 1), (Fraction(1, 3), 1), (Fraction(2, 3), 1), (Fraction(5, 6), 1)],
        [(Fraction(1, 8), 1), (Fraction(3, 8), 1), (Fraction(5, 8), 1), (Fraction(7, 8), 1)],
        [(Fraction(0), 1), (Fraction(0), 1), (Fraction(1, 2), 2)],
    ]
    for pairs in cases:
        rotated = sorted(((e + Fraction(1, 4)) % 1, s) for e, s in pairs)
        a = quarter_shift_admissible(_jordan(pairs))
        b = quarter_shift_admissible(_jordan(rotated))
        assert a.admissible == b.admissible


def test_abstract_matches_displayed_list_on_symplectic_shapes():
    # all symplectic-feasible quasi-unipotent shapes with orders taken from
    # the snapped lattice: eigenvalues in conjugate-inverse pairs
    shapes = []
    qs = [1, 2, 3, 4, 6, 8, 12]
    for q in qs:
        for p in range(q):
            if math.gcd(p, q) != 1:
                continue
            e = Fraction(p, q)
            ei = (-e) % 1
            shapes.append([(e, 2), (ei, 2)])
            shapes.append([(e, 1), (e, 1), (ei, 1), (ei, 1)])
    for q1 in qs:
        for q2 in qs:
            for p1 in range(q1):
                if math.gcd(p1, q1) != 1:
                    continue
                for p2 in range(q2):
                    if math.gcd(p2, q2) != 1:
                        continue
                    e1, e2 = Fraction(p1, q1), Fraction(p2, q2)
                    shapes.append(
                        [(e1, 1), ((-e1) % 1, 1), (e2, 1), ((-e2) % 1, 1)]
                    )
    seen = set()
    for pairs in shapes:
        key = tuple(sorted(pairs))
        if key in seen:
            continue
        seen.add(key)
        ev = quarter_shift_admissible(_jordan(sorted(pairs)))
        if ev.in_displayed_list:
            assert ev.admissible, key
        # abstract admissibility on these shapes must coincide with the
        # displayed seven-case list
        assert ev.admissible == ev.in_displayed_list, key


def test_locally_geometric_ploc_and_quarter_shift(ploc):
    rep = locally_geometric_check(ploc, 128)
    assert rep.locally_geometric
    assert rep.global_form_verdict == "nondegenerate-exists"
    assert not rep.geometric_obstruction

    rep2 = locally_geometric_check(shift(ploc, Fraction(1, 4)), 128)
    assert rep2.locally_geometric
    assert rep2.global_form_verdict in ("all-degenerate", "zero-only")
    assert rep2.max_abs_pfaffian < 1e-8
    assert rep2.geometric_obstruction


def test_quarter_shift_of_mum_operator_not_locally_geometric(no2):
    rep = locally_geometric_check(shift(no2, Fraction(1, 4)), 128)
    assert not rep.locally_geometric
    # the failure is at the scaled maximally-unipotent points
    failing = [str(p.point) for p in rep.points if not p.certificate.passes]
    assert failing


def test_twist_guards(corpus_ops):
    no53 = corpus_ops["no53"]
    with pytest.raises(MathDomainError):
        twist_pipeline(no53, 2, Fraction(2))
    with pytest.raises(MathDomainError):
        twist_pipeline(no53, 1, Fraction(0))  # 0 is singular for no53


def test_twist_no53(corpus_ops):
    twisted, rep = twist_pipeline(corpus_ops["no53"], 1, Fraction(2), 128)
    assert rep.origin_exponents == [
        Fraction(1, 2), Fraction(3, 2), Fraction(5, 2), Fraction(7, 2),
    ]
    assert rep.origin_order == 2
    assert (rep.origin_a, rep.origin_b) == (False, False)
    assert exponents_at(twisted, Fraction(0)).sorted_values() == rep.origin_exponents
