import random
from fractions import Fraction

import pytest

from fop import linalg, nums
from fop.errors import MathDomainError
from fop.monodromy import scalar_scale
from fop.symplectic import (
    block_form_detect,
    form_pencil_analysis,
    invariant_form_space,
    invariant_form_space_exact,
    pfaffian,
    skew_from_vector,
    standard_symplectic_form,
    symplectic_certificate,
)

import oracles


def rand_skew_vec(rng):
    return [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(6)]


def test_pfaffian_squares_to_determinant():
    rng = random.Random(5)
    for _ in range(20):
        vec = rand_skew_vec(rng)
        w = oracles.skew_matrix(vec)
        pf = pfaffian(w)
        assert pf * pf == oracles.det4(w)


def test_identity_gives_full_space():
    sp = invariant_form_space([linalg.identity(4)], 128)
    assert sp.dimension == 6
    assert sp.verdict == "nondegenerate-exists"


def test_dense_symplectic_group_unique_form():
    j = oracles.skew_matrix([Fraction(1), 0, 0, 0, 0, Fraction(1)])
    gens = [
        oracles.symplectic_transvection(v, j)
        for v in ([1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 1, 0], [0, 1, 0, 1])
    ]
    exact = oracles.invariance_nullspace_exact(gens)
    assert len(exact) == 1
    pf = pfaffian(oracles.skew_matrix(exact[0]))
    assert pf != 0
    sp = invariant_form_space(gens, 128)
    assert sp.dimension == 1
    assert sp.verdict == "nondegenerate-exists"


def test_exact_and_numeric_paths_agree():
    # two commuting block rotations leave a 2-parameter family invariant
    a = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    af = [[Fraction(x) for x in row] for row in a]
    exact = oracles.invariance_nullspace_exact([af])
    sp = invariant_form_space([a], 128)
    assert sp.dimension == len(exact)


def test_conjugation_equivariance():
    rng = random.Random(9)
    j = oracles.skew_matrix([Fraction(1), 0, 0, 0, 0, Fraction(1)])
    gens = [
        oracles.symplectic_transvection(v, j)
        for v in ([1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 0])
    ]
    while True:
        q = [[Fraction(rng.randint(-2, 2)) for _ in range(4)] for _ in range(4)]
        if oracles.det4(q) != 0:
            break
    qinv = _frac_inv(q)
    conj = [oracles.frac_mat_mul(qinv, oracles.frac_mat_mul(g, q)) for g in gens]
    base = oracles.invariance_nullspace_exact(gens)
    moved = oracles.invariance_nullspace_exact(conj)
    assert len(base) == len(moved)
    # W -> Q^T W Q maps invariant forms of gens to invariant forms of conj
    qt = oracles.frac_transpose(q)
    for vec in base:
        w = oracles.skew_matrix(vec)
        wq = oracles.frac_mat_mul(qt, oracles.frac_mat_mul(w, q))
        for g in conj:
            gt = oracles.frac_transpose(g)
            assert oracles.frac_mat_mul(gt, oracles.frac_mat_mul(wq, g)) == wq


def _frac_inv(m):
    n = len(m)
    work = [list(row) + [Fraction(1 if i == j else 0) for j in range(n)] for i, row in enumerate(m)]
    r = 0
    for c in range(n):
        piv = next(rr for rr in range(r, n) if work[rr][c] != 0)
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for rr in range(n):
            if rr != r and work[rr][c] != 0:
                f = work[rr][c]
                work[rr] = [x - f * y for x, y in zip(work[rr], work[r])]
        r += 1
    return [row[n:] for row in work]


def test_scaling_law_anti_invariance(ploc, monodromy_of):
    md = monodromy_of("ploc", ploc, 128)
    m0 = md.at(("rational", Fraction(0)))
    scaled = scalar_scale(m0, Fraction(1, 4))
    sp = invariant_form_space([scaled], 128)
    with nums.workprec(192):
        mm = [[nums.mpc(x) for x in row] for row in m0.matrix]
        mt = linalg.transpose(mm)
        for w in sp.basis:
            lhs = linalg.mat_mul(mt, linalg.mat_mul(w, mm))
            dev = linalg.max_abs(linalg.mat_add(lhs, w))  # M^T W M = -W
            assert dev < nums.mpfr("1e-20")


def test_single_symplectic_matrix_has_a_form(ploc, monodromy_of):
    md = monodromy_of("ploc", ploc, 128)
    for m in md.matrices:
        sp = invariant_form_space([m], 128)
        assert sp.dimension >= 1
        assert sp.verdict == "nondegenerate-exists"


def test_certificate_examples(ploc, monodromy_of):
    md = monodromy_of("ploc", ploc, 128)
    m0 = md.at(("rational", Fraction(0)))
    cert = symplectic_certificate(m0, 128)
    assert cert.passes and not cert.integrality_verified
    with nums.workprec(192):
        i_id = linalg.mat_scale(linalg.identity(4), nums.mpc(0, 1))
    cert2 = symplectic_certificate(i_id, 128)
    assert cert2.det_ok and not cert2.charpoly_integral and not cert2.passes
    eighth = scalar_scale(m0, Fraction(1, 8))
    cert3 = symplectic_certificate(eighth, 128)
    assert not cert3.det_ok and not cert3.passes


def test_pencil_same_form():
    w1 = standard_symplectic_form(exact=False)
    rep = form_pencil_analysis(w1, w1, 128)
    with nums.workprec(192):
        assert len(rep.parameters) == 2
        for tv in rep.parameters:
            assert abs(tv + 1) < nums.mpfr("1e-30")
    assert all(len(r) == 4 for r in rep.radicals)


def test_pencil_reduced_case():
    # anti-diagonal second form with entries c = 1, a: det(W1 + t W2) = (a t^2 - 1)^2
    a = Fraction(9, 4)
    w1 = standard_symplectic_form(exact=False)
    with nums.workprec(192):
        w2 = skew_from_vector(
            [nums.mpc(0), nums.mpc(1), nums.mpc(0), nums.mpc(0), nums.mpc(a), nums.mpc(0)]
        )
    rep = form_pencil_analysis(w1, w2, 128)
    with nums.workprec(192):
        vals = sorted(float(tv.real) for tv in rep.parameters)
        import math

        root = 1 / math.sqrt(float(a))
        assert vals[0] == pytest.approx(-root, abs=1e-25)
        assert vals[1] == pytest.approx(root, abs=1e-25)
        # det poly (a t^2 - 1)^2 = a^2 t^4 - 2a t^2 + 1
        dp = rep.det_poly
        assert abs(dp[0] - 1) < nums.mpfr("1e-25")
        assert abs(dp[1]) < nums.mpfr("1e-25")
        assert abs(dp[2] + 2 * nums.mpfr(a)) < nums.mpfr("1e-25")
        assert abs(dp[4] - nums.mpfr(a * a)) < nums.mpfr("1e-25")
    assert all(len(r) == 2 for r in rep.radicals)


def test_pencil_random_nondegenerate():
    rng = random.Random(21)
    w1 = standard_symplectic_form(exact=False)
    while True:
        vec = rand_skew_vec(rng)
        w2e = oracles.skew_matrix(vec)
        if pfaffian(w2e) != 0:
            break
    with nums.workprec(192):
        w2 = [[nums.mpc(x) for x in row] for row in w2e]
    rep = form_pencil_analysis(w1, w2, 128)
    assert len(rep.parameters) == 2
    with nums.workprec(192):
        for tv, rad in zip(rep.parameters, rep.radicals):
            w = linalg.mat_add(
                [[nums.mpc(x) for x in row] for row in w1],
                linalg.mat_scale(w2, tv),
            )
            # oracle: direct elimination kernel dimension
            dim = oracles.numeric_kernel_dim(w, nums.mpfr("1e-30"))
            assert dim == len(rad) == 2
            for v in rad:
                img = linalg.mat_vec(w, v)
                assert max(abs(x) for x in img) < nums.mpfr("1e-25")


def test_pencil_requires_nondegenerate_base():
    degenerate = skew_from_vector([nums.mpc(1), nums.mpc(0), nums.mpc(0),
                                   nums.mpc(0), nums.mpc(0), nums.mpc(0)])
    with pytest.raises(MathDomainError):
        form_pencil_analysis(degenerate, standard_symplectic_form(exact=False), 128)


def test_block_form_detect():
    split = [
        [[1, 2, 0, 0], [3, 4, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]],
        [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 3, 0], [0, 0, 0, 3]],
    ]
    basis = linalg.identity(4)
    rep = block_form_detect(split, basis, 128)
    assert rep.verdict == "split"
    swap = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    rep2 = block_form_detect(split + [swap], basis, 128)
    assert rep2.verdict == "swap"
    assert rep2.shapes[-1] == "anti-diagonal"
    dense = [[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 1]]
    rep3 = block_form_detect([dense], basis, 128)
    assert rep3.verdict == "dense-candidate"


def test_mum_generators_never_split(no2, monodromy_of):
    # a maximally unipotent local matrix cannot be 2+2 block-shaped in any
    # basis; use radicals of a random invariant pencil as the test basis
    md = monodromy_of("no2", no2, 128)
    w1 = standard_symplectic_form(exact=False)
    rng = random.Random(3)
    while True:
        vec = rand_skew_vec(rng)
        w2e = oracles.skew_matrix(vec)
        if pfaffian(w2e) != 0:
            break
    with nums.workprec(192):
        w2 = [[nums.mpc(x) for x in row] for row in w2e]
        rep = form_pencil_analysis(w1, w2, 128)
        basis = [list(v) for v in rep.radicals[0] + rep.radicals[1]]
        cols = [[basis[k][i] for k in range(4)] for i in range(4)]
    verdict = block_form_detect([m.matrix for m in md.finite()], cols, 128)
    assert verdict.verdict == "dense-candidate"
