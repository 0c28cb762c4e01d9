"""Monodromy-invariant alternating forms on the 4-dimensional solution
space, the single-matrix symplecticity certificate, and the pencil /
radical analysis of degenerate invariant forms.

A skew form is identified with its coordinate vector (b, c, d, g, h, l)
in the layout

        (  0   b   c   d )
        ( -b   0   g   h )
        ( -c  -g   0   l )
        ( -d  -h  -l   0 )

with Pfaffian bl - ch + dg and det = Pfaffian^2.  The invariance system
M^T W M = W over all generators is solved by singular-value thresholding
on the stacked 6-column linear map; nondegeneracy of the solution space
is decided through the Pfaffian quadratic form (exact expansion in the
nullspace coordinates for dimension <= 3, seeded rational sampling on
top either way).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import linalg, nums
from .errors import MathDomainError

_COORDS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

DEFAULT_SEED = 20240214
PF_TOL = 1e-8


def skew_from_vector(vec) -> list:
    """4x4 skew matrix from coordinates (b, c, d, g, h, l)."""
    out = [[_zero_like(vec[0]) for _ in range(4)] for _ in range(4)]
    for (i, j), v in zip(_COORDS, vec):
        out[i][j] = v
        out[j][i] = -v
    return out


def skew_to_vector(mat) -> list:
    return [mat[i][j] for i, j in _COORDS]


def _zero_like(x):
    return Fraction(0) if isinstance(x, (int, Fraction)) else nums.mpc(0)


def pfaffian(mat):
    """bl - ch + dg; its square is the determinant."""
    b, c, d, g, h, l = skew_to_vector(mat)
    return b * l - c * h + d * g


def standard_symplectic_form(exact: bool = True):
    """Block-diagonal standard form: invariant under the symplectic group."""
    one = Fraction(1) if exact else nums.mpc(1)
    return skew_from_vector([one, 0 * one, 0 * one, 0 * one, 0 * one, one])


@dataclass
class AlternatingFormSpace:
    """Solution space of the invariance system over skew 4x4 forms."""

    basis: list  # 4x4 matrices (unit-norm coordinate vectors)
    dimension: int
    verdict: str  # "nondegenerate-exists" | "all-degenerate" | "zero-only"
    witness: list | None
    max_abs_pfaffian: float
    pf_gram: list | None  # Pfaffian quadratic form on nullspace coords (dim <= 3)
    residual: float
    singular_values: list
    samples: int
    seed: int
    prec: int

    def to_doc(self):
        return {
            "dimension": self.dimension,
            "verdict": self.verdict,
            "max_abs_pfaffian": nums.nstr(self.max_abs_pfaffian, 64),
            "residual": nums.nstr(self.residual, 64),
            "samples": self.samples,
            "seed": self.seed,
            "precision_bits": self.prec,
            "basis": [
                [[nums.nstr(x, self.prec) for x in row] for row in b] for b in self.basis
            ],
            "witness": None
            if self.witness is None
            else [[nums.nstr(x, self.prec) for x in row] for row in self.witness],
            "pfaffian_gram": None
            if self.pf_gram is None
            else [[nums.nstr(x, self.prec) for x in row] for row in self.pf_gram],
        }


def _as_matrix(m):
    from .monodromy import MonodromyMatrix

    if isinstance(m, MonodromyMatrix):
        return m.matrix
    return m


def invariant_form_space(
    mats,
    prec: int = nums.DEFAULT_PREC,
    seed: int = DEFAULT_SEED,
    samples: int = 64,
    pf_tol: float = PF_TOL,
) -> AlternatingFormSpace:
    """Common nullspace of W -> M^T W M - W over skew forms, with a
    nondegeneracy verdict."""
    mats = [_as_matrix(m) for m in mats]
    if not mats:
        raise MathDomainError("need at least one matrix")
    for m in mats:
        if len(m) != 4 or any(len(row) != 4 for row in m):
            raise MathDomainError("invariant-form analysis is specific to 4x4 monodromy")
    wp = prec + nums.GUARD_BITS
    with nums.workprec(wp):
        mpc_mats = [[[nums.mpc(x) for x in row] for row in m] for m in mats]
        stack = []
        for m in mpc_mats:
            mt = linalg.transpose(m)
            cols = []
            for k in range(6):
                basis_k = skew_from_vector(
                    [nums.mpc(1 if idx == k else 0) for idx in range(6)]
                )
                s = linalg.mat_sub(linalg.mat_mul(mt, linalg.mat_mul(basis_k, m)), basis_k)
                cols.append(skew_to_vector(s))
            for r in range(6):
                stack.append([cols[k][r] for k in range(6)])
        null, svals = linalg.svd_nullspace(stack, nums.sv_rel_threshold(prec))
        dim = len(null)
        basis = [skew_from_vector(v) for v in null]
        residual = nums.mpfr(0)
        for b in basis:
            for m in mpc_mats:
                mt = linalg.transpose(m)
                s = linalg.mat_sub(linalg.mat_mul(mt, linalg.mat_mul(b, m)), b)
                residual = max(residual, linalg.max_abs(s))
        if dim == 0:
            return AlternatingFormSpace(
                basis=[], dimension=0, verdict="zero-only", witness=None,
                max_abs_pfaffian=0.0, pf_gram=None, residual=residual,
                singular_values=svals, samples=0, seed=seed, prec=prec,
            )
        gram = None
        candidates = []
        pf_basis = [pfaffian(b) for b in basis]
        for i, v in enumerate(null):
            candidates.append((v, pf_basis[i]))
        if dim <= 3:
            # exact expansion of the Pfaffian quadratic form in nullspace
            # coordinates, via polarization
            gram = [[nums.mpc(0)] * dim for _ in range(dim)]
            for i in range(dim):
                gram[i][i] = pf_basis[i]
            for i in range(dim):
                for j in range(i + 1, dim):
                    vec = [x + y for x, y in zip(null[i], null[j])]
                    cross = pfaffian(skew_from_vector(vec)) - pf_basis[i] - pf_basis[j]
                    gram[i][j] = cross / 2
                    gram[j][i] = cross / 2
            for i in range(dim):
                for j in range(i, dim):
                    coeffs = [nums.mpc(0)] * dim
                    coeffs[i] += 1
                    coeffs[j] += 1
                    vec = [
                        sum((c * null[k][r] for k, c in enumerate(coeffs)), nums.mpc(0))
                        for r in range(6)
                    ]
                    candidates.append((vec, pfaffian(skew_from_vector(vec))))
        rng = random.Random(seed)
        for _ in range(samples):
            coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(dim)]
            if all(c == 0 for c in coeffs):
                coeffs[0] = Fraction(1)
            norm = sum(float(c) ** 2 for c in coeffs) ** 0.5
            vec = [
                sum((nums.mpfr(c) * null[k][r] for k, c in enumerate(coeffs)), nums.mpc(0))
                / nums.mpfr(norm)
                for r in range(6)
            ]
            candidates.append((vec, pfaffian(skew_from_vector(vec))))
        best_vec, best_pf = max(candidates, key=lambda t: abs(t[1]))
        max_pf = float(abs(best_pf))
        if max_pf > pf_tol:
            verdict = "nondegenerate-exists"
            witness = skew_from_vector(best_vec)
        else:
            verdict = "all-degenerate"
            witness = None
        return AlternatingFormSpace(
            basis=basis, dimension=dim, verdict=verdict, witness=witness,
            max_abs_pfaffian=max_pf, pf_gram=gram, residual=residual,
            singular_values=svals, samples=samples, seed=seed, prec=prec,
        )


def invariant_form_space_exact(mats):
    """Exact-rational route: row reduction of the 6-variable invariance
    system over Q for matrices with Fraction entries.

    Returns (dimension, basis vectors over Q, pfaffian values at basis).
    Independent of the SVD path; used as its oracle.
    """
    rows = []
    for m in mats:
        mt = [list(col) for col in zip(*m)]
        for k in range(6):
            ek = skew_from_vector([Fraction(1 if i == k else 0) for i in range(6)])
            prod = _frac_mat_mul(mt, _frac_mat_mul(ek, m))
            s = [
                [prod[i][j] - ek[i][j] for j in range(4)]
                for i in range(4)
            ]
            col = skew_to_vector(s)
            rows.append((k, col))
    # assemble 6-column system: row r of block = coords; unknown index k
    system = []
    nblocks = len(mats)
    for b in range(nblocks):
        block = rows[b * 6:(b + 1) * 6]
        for r in range(6):
            system.append([block[k][1][r] for k in range(6)])
    basis = _frac_nullspace(system, 6)
    pf = [pfaffian(skew_from_vector(v)) for v in basis]
    return len(basis), basis, pf


def _frac_mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n):
        for p in range(k):
            x = a[i][p]
            if x == 0:
                continue
            for j in range(m):
                out[i][j] += x * b[p][j]
    return out


def _frac_nullspace(rows, ncols):
    work = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for rr in range(r, len(work)):
            if work[rr][c] != 0:
                piv = rr
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for rr in range(len(work)):
            if rr != r and work[rr][c] != 0:
                f = work[rr][c]
                work[rr] = [x - f * y for x, y in zip(work[rr], work[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for ri, pc in enumerate(pivots):
            vec[pc] = -work[ri][fc]
        basis.append(vec)
    return basis


@dataclass
class SymplecticCertificate:
    """Necessary conditions for conjugacy into the integral symplectic
    group; integrality of the group itself is not decidable here and is
    reported as unverified."""

    det_ok: bool
    form_ok: bool
    charpoly_integral: bool
    charpoly_reciprocal: bool
    charpoly: list
    det_value: object
    passes: bool
    integrality_verified: bool = False

    def to_doc(self, prec=nums.DEFAULT_PREC):
        return {
            "det_ok": self.det_ok,
            "form_ok": self.form_ok,
            "charpoly_integral": self.charpoly_integral,
            "charpoly_reciprocal": self.charpoly_reciprocal,
            "charpoly": [nums.nstr(c, prec) for c in self.charpoly],
            "det": nums.nstr(self.det_value, prec),
            "passes": self.passes,
            "integrality_verified": self.integrality_verified,
        }


def symplectic_certificate(mat, prec: int = nums.DEFAULT_PREC) -> SymplecticCertificate:
    m = _as_matrix(mat)
    if len(m) != 4:
        raise MathDomainError("certificate requires a 4x4 matrix")
    wp = prec + nums.GUARD_BITS
    with nums.workprec(wp):
        mm = [[nums.mpc(x) for x in row] for row in m]
        tol = nums.eig_window(prec)
        d = linalg.det(mm)
        det_ok = abs(d - 1) < tol
        cp = linalg.charpoly(mm)  # ascending, monic degree 4
        ints = []
        integral = True
        for c in cp:
            r = gmpy2.mpfr(round(float(c.real)))
            if abs(c - r) > tol:
                integral = False
            ints.append(int(r))
        reciprocal = integral and ints[0] == 1 and ints[1] == ints[3]
        space = invariant_form_space([m], prec=prec)
        form_ok = space.verdict == "nondegenerate-exists"
        passes = det_ok and form_ok and integral and reciprocal
        return SymplecticCertificate(
            det_ok=det_ok,
            form_ok=form_ok,
            charpoly_integral=integral,
            charpoly_reciprocal=reciprocal,
            charpoly=cp,
            det_value=d,
            passes=passes,
        )


@dataclass
class PencilReport:
    det_poly: list  # degree-4 polynomial coefficients of det(W1 + t W2)
    pf_poly: list  # quadratic pf(W1 + t W2) = pf1 + B t + pf2 t^2
    parameters: list  # degenerate parameter values (roots of pf_poly)
    radicals: list  # kernel bases at each parameter
    prec: int = nums.DEFAULT_PREC

    def to_doc(self):
        return {
            "pf_poly": [nums.nstr(c, self.prec) for c in self.pf_poly],
            "det_poly": [nums.nstr(c, self.prec) for c in self.det_poly],
            "parameters": [nums.nstr(tv, self.prec) for tv in self.parameters],
            "radicals": [
                [[nums.nstr(x, self.prec) for x in vec] for vec in base]
                for base in self.radicals
            ],
        }


def form_pencil_analysis(omega1, omega2, prec: int = nums.DEFAULT_PREC) -> PencilReport:
    """Degenerate members of the pencil W1 + t W2 and their radicals.

    W1 must be nondegenerate; each simple root of the Pfaffian pencil
    contributes a two-dimensional radical (an invariant subspace when
    both forms are invariant)."""
    wp = prec + nums.GUARD_BITS
    with nums.workprec(wp):
        w1 = [[nums.mpc(x) for x in row] for row in omega1]
        w2 = [[nums.mpc(x) for x in row] for row in omega2]
        pf1 = pfaffian(w1)
        if abs(pf1) < nums.eig_window(prec):
            raise MathDomainError("pencil base form is degenerate")
        pf2 = pfaffian(w2)
        both = pfaffian(linalg.mat_add(w1, w2))
        cross = both - pf1 - pf2
        pf_poly = [pf1, cross, pf2]
        # det(W1 + t W2) = (pf1 + cross t + pf2 t^2)^2
        det_poly = [
            pf1 * pf1,
            2 * pf1 * cross,
            cross * cross + 2 * pf1 * pf2,
            2 * cross * pf2,
            pf2 * pf2,
        ]
        params = _quadratic_roots(pf1, cross, pf2)
        radicals = []
        for tv in params:
            w = linalg.mat_add(w1, linalg.mat_scale(w2, tv))
            kernel, _ = linalg.svd_nullspace(w, nums.mpfr(2) ** (-(prec // 2)))
            radicals.append(kernel)
        return PencilReport(
            det_poly=det_poly, pf_poly=pf_poly, parameters=params,
            radicals=radicals, prec=prec,
        )


def _quadratic_roots(c0, c1, c2):
    if abs(c2) == 0:
        if abs(c1) == 0:
            return []
        return [-c0 / c1]
    disc = c1 * c1 - 4 * c0 * c2
    sq = gmpy2.sqrt(disc)
    r1 = (-c1 + sq) / (2 * c2)
    r2 = (-c1 - sq) / (2 * c2)
    return [r1, r2]


@dataclass
class BlockFormReport:
    verdict: str  # "split" | "swap" | "dense-candidate"
    shapes: list  # per matrix: "diagonal" | "anti-diagonal" | "dense"
    max_offblock: float

    def to_doc(self):
        return {
            "verdict": self.verdict,
            "shapes": self.shapes,
            "max_offblock": nums.nstr(self.max_offblock, 64),
        }


def block_form_detect(mats, basis, prec: int = nums.DEFAULT_PREC, tol: float = 1e-9) -> BlockFormReport:
    """Test whether every matrix is 2+2 block-diagonal or block-anti-
    diagonal in the supplied basis (columns).  Groups whose generators
    all have one of the two shapes are not Zariski-dense."""
    wp = prec + nums.GUARD_BITS
    with nums.workprec(wp):
        q = [[nums.mpc(x) for x in row] for row in basis]
        qinv = linalg.mat_inv(q)
        shapes = []
        worst = nums.mpfr(0)
        for m in mats:
            mm = [[nums.mpc(x) for x in row] for row in _as_matrix(m)]
            c = linalg.mat_mul(qinv, linalg.mat_mul(mm, q))
            scale = max(linalg.max_abs(c), nums.mpfr(1))
            off_diag = max(
                abs(c[i][j]) for i in range(4) for j in range(4) if (i < 2) != (j < 2)
            )
            on_diag = max(
                abs(c[i][j]) for i in range(4) for j in range(4) if (i < 2) == (j < 2)
            )
            if off_diag < tol * scale:
                shapes.append("diagonal")
                worst = max(worst, off_diag / scale)
            elif on_diag < tol * scale:
                shapes.append("anti-diagonal")
                worst = max(worst, on_diag / scale)
            else:
                shapes.append("dense")
                worst = max(worst, min(on_diag, off_diag) / scale)
        if all(s == "diagonal" for s in shapes):
            verdict = "split"
        elif all(s in ("diagonal", "anti-diagonal") for s in shapes):
            verdict = "swap"
        else:
            verdict = "dense-candidate"
        return BlockFormReport(verdict=verdict, shapes=shapes, max_offblock=float(worst))
