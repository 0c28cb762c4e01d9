"""Small dense linear algebra over gmpy2 complex numbers.

Matrices are lists of row lists of gmpy2.mpc.  Everything here is tiny
(4x4 matrices, 6-column systems), so elimination with partial pivoting
is plenty; eigenvalues and singular values go through mpmath (same
underlying precision) and come back losslessly.
"""

from __future__ import annotations

import gmpy2
import mpmath

from . import nums
from .errors import NumericError


def identity(n: int):
    return [[nums.mpc(1 if i == j else 0) for j in range(n)] for i in range(n)]


def zeros(n: int, m: int):
    return [[nums.mpc(0) for _ in range(m)] for _ in range(n)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[nums.mpc(0)] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for p in range(k):
            x = ai[p]
            if x == 0:
                continue
            bp = b[p]
            for j in range(m):
                oi[j] += x * bp[j]
    return out


def mat_vec(a, v):
    return [sum((x * y for x, y in zip(row, v)), nums.mpc(0)) for row in a]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c):
    return [[c * x for x in row] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def conj_transpose(a):
    return [[gmpy2.mpc(x.real, -x.imag) for x in col] for col in zip(*a)]


def frobenius_norm(a):
    return gmpy2.sqrt(sum((gmpy2.norm(x) for row in a for x in row), nums.mpfr(0)))


def max_abs(a):
    return max(abs(x) for row in a for x in row)


def mat_inv(a):
    n = len(a)
    work = [list(row) + [nums.mpc(1 if i == j else 0) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(work[r][col]))
        if abs(work[piv][col]) == 0:
            raise NumericError("singular matrix in inversion")
        work[col], work[piv] = work[piv], work[col]
        inv = 1 / work[col][col]
        work[col] = [x * inv for x in work[col]]
        for r in range(n):
            if r == col:
                continue
            f = work[r][col]
            if f == 0:
                continue
            work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def det(a):
    n = len(a)
    work = [list(row) for row in a]
    out = nums.mpc(1)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(work[r][col]))
        if abs(work[piv][col]) == 0:
            return nums.mpc(0)
        if piv != col:
            work[col], work[piv] = work[piv], work[col]
            out = -out
        out *= work[col][col]
        inv = 1 / work[col][col]
        for r in range(col + 1, n):
            f = work[r][col] * inv
            if f == 0:
                continue
            work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return out


def charpoly(a):
    """Monic characteristic polynomial coefficients [c0, ..., c_{n-1}, 1]
    (ascending powers) by the Faddeev-LeVerrier recursion."""
    n = len(a)
    coeffs = [nums.mpc(0)] * (n + 1)
    coeffs[n] = nums.mpc(1)
    m = identity(n)
    c = nums.mpc(1)
    for k in range(1, n + 1):
        m = mat_mul(a, m)
        tr = sum((m[i][i] for i in range(n)), nums.mpc(0))
        c = -tr / k
        coeffs[n - k] = c
        for i in range(n):
            m[i][i] += c
    return coeffs


def _to_mpmath_matrix(a):
    return mpmath.matrix([[nums.to_mpmath(x) for x in row] for row in a])


def eigenvalues(a) -> list[gmpy2.mpc]:
    E = mpmath.mp.eig(_to_mpmath_matrix(a), left=False, right=False)
    return [nums.from_mpmath(z) for z in E]


def singular_values(a) -> list[gmpy2.mpfr]:
    S = mpmath.mp.svd_c(_to_mpmath_matrix(a), compute_uv=False)
    vals = sorted((nums.from_mpmath(s).real for s in S), reverse=True)
    return vals


def svd_nullspace(a, rel_threshold) -> tuple[list, list[gmpy2.mpfr]]:
    """(orthonormal nullspace basis vectors, singular values).

    A vector belongs to the nullspace when its singular value is below
    rel_threshold times the largest singular value.
    """
    U, S, V = mpmath.mp.svd_c(_to_mpmath_matrix(a))
    svals = [nums.from_mpmath(s).real for s in S]
    if not svals:
        return [], []
    smax = max(svals)
    cut = rel_threshold * max(smax, nums.mpfr(0))
    basis = []
    for idx, s in enumerate(svals):
        if smax == 0 or s < cut:
            row = [nums.from_mpmath(mpmath.conj(V[idx, j])) for j in range(V.cols)]
            basis.append(row)
    return basis, sorted(svals, reverse=True)


def rank(a, rel_threshold, scale=None) -> int:
    svals = singular_values(a)
    if not svals:
        return 0
    ref = scale if scale is not None else svals[0]
    if ref == 0:
        return 0
    return sum(1 for s in svals if s >= rel_threshold * ref)
