"""Numerical monodromy of Fuchsian operators.

Analytic continuation uses Taylor stepping of the order-n equation: on
each segment the d-form is recentered, the coefficient recurrence is
driven to working accuracy, and the step is capped at half the distance
to the nearest zero of the leading coefficient.  Transported data
vectors are Taylor coefficients (y, y', y''/2!, y'''/3!) at the current
center, which is exactly the derivative-scaled basis the monodromy
matrices are expressed in.

Loops are built per singularity: straight from the base point toward the
singularity, stopping on a circle of radius 0.4 times the distance to
the nearest other leading-coefficient zero, then a regular 16-gon
traversed counterclockwise, then straight back.  Generators are ordered
by the argument of the singularity as seen from the base point; the
matrix at infinity is the inverse of the resulting ordered product.  The
base point is drawn from a deterministic rational grid and must see all
approach segments with clearance, with preference for a real point left
of all real singularities whenever such a point gives collision-free
straight approaches (collinear real singularities rule it out).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import linalg, nums
from .errors import MathDomainError, NumericError
from .local import SingularPoint, local_data
from .operators import ThetaOperator, theta_to_d
from .poly import numeric_roots, shift_coeffs_numeric

RING_VERTICES = 16
RING_FACTOR = Fraction(2, 5)  # 0.4 x distance to the nearest other zero
STEP_FACTOR = Fraction(1, 2)  # 0.5 x distance to the nearest zero


@dataclass
class Loop:
    base: gmpy2.mpc
    singularity: SingularPoint
    radius: gmpy2.mpfr
    approach: list  # base .. ring entry
    ring: list  # entry, v1, .., entry (closed)

    def to_doc(self, prec):
        return {
            "singularity": str(self.singularity),
            "radius": nums.nstr(self.radius, prec),
            "ring_vertices": RING_VERTICES,
            "approach": [nums.nstr(z, prec) for z in self.approach],
        }


@dataclass
class MonodromyMatrix:
    point: SingularPoint
    matrix: list
    prec: int
    err_estimate: gmpy2.mpfr
    loop: Loop | None = None

    @property
    def order_n(self) -> int:
        return len(self.matrix)

    def to_doc(self):
        return {
            "point": str(self.point),
            "precision_bits": self.prec,
            "err_estimate": nums.nstr(self.err_estimate, 64),
            "matrix": [[nums.nstr(x, self.prec) for x in row] for row in self.matrix],
            "loop": self.loop.to_doc(self.prec) if self.loop else None,
        }


@dataclass
class JordanData:
    """Snapped eigenvalue structure of a quasi-unipotent matrix."""

    blocks: list  # (exponent Fraction p/q in [0,1), eigenvalue mpc, [sizes desc])
    order: int  # lcm of eigenvalue orders (order of the semisimple part)
    semisimple: bool

    def block_count(self) -> int:
        return sum(len(sizes) for _, _, sizes in self.blocks)

    def eigen_exponents(self) -> list[Fraction]:
        out = []
        for expo, _, sizes in self.blocks:
            out.extend([expo] * len(sizes))
        return out

    def pairs(self) -> list[tuple[Fraction, int]]:
        """(eigenvalue exponent, block size) with one entry per block."""
        out = []
        for expo, _, sizes in self.blocks:
            for s in sizes:
                out.append((expo, s))
        return sorted(out)

    def to_doc(self):
        return {
            "blocks": [
                {"eigenvalue_exponent": str(expo), "block_sizes": sizes}
                for expo, _, sizes in self.blocks
            ],
            "order": self.order,
            "semisimple": self.semisimple,
        }


@dataclass
class MonodromyData:
    base: Fraction | tuple
    base_value: gmpy2.mpc
    matrices: list  # MonodromyMatrix, ordered generators then infinity last
    product_residual: gmpy2.mpfr
    prec: int

    def finite(self) -> list[MonodromyMatrix]:
        return [m for m in self.matrices if not m.point.is_infinity()]

    def at(self, key) -> MonodromyMatrix:
        for m in self.matrices:
            if m.point.key() == key:
                return m
        raise KeyError(f"no monodromy matrix for {key}")

    def to_doc(self):
        return {
            "base_point": [str(self.base[0]), str(self.base[1])],
            "precision_bits": self.prec,
            "product_residual": nums.nstr(self.product_residual, 64),
            "matrices": [m.to_doc() for m in self.matrices],
        }


# ---------------------------------------------------------------------------
# Continuation engine
# ---------------------------------------------------------------------------

class _Engine:
    """Taylor-stepping transport for one operator at one working precision."""

    def __init__(self, op: ThetaOperator, wp: int):
        self.op = op.canonical()
        self.n = self.op.order
        self.wp = wp
        self.dpolys = theta_to_d(self.op).polynomial_coeffs()
        lead = self.dpolys[-1]
        if lead.degree() < 1:
            self.avoid = []
        else:
            self.avoid = [z for z, _ in numeric_roots(lead, wp)]
        self.maxterms = 6 * wp + 64

    def nearest_avoid(self, z) -> gmpy2.mpfr:
        if not self.avoid:
            return nums.mpfr(1)
        return min(abs(z - a) for a in self.avoid)

    def segment(self, a, b):
        """Transport matrix over one segment with |b-a| <= 0.5 dist."""
        shifted = [
            [nums.mpc(0)] if p.is_zero() else shift_coeffs_numeric(p, a)
            for p in self.dpolys
        ]
        return _segment_transport(shifted, self.n, b - a, self.wp, self.maxterms)

    def transport(self, path):
        """Product of segment matrices along a polyline, substepping."""
        total = linalg.identity(self.n)
        err = nums.mpfr(0)
        for u, v in zip(path, path[1:]):
            cur = u
            while True:
                dist = self.nearest_avoid(cur)
                if dist <= 0:
                    raise NumericError(f"continuation hit a singularity near {nums.nstr(cur, 32)}")
                cap = dist * nums.mpfr(STEP_FACTOR)
                rem = abs(v - cur)
                if rem == 0:
                    break
                if rem <= cap:
                    step_to = v
                else:
                    step_to = cur + cap * (v - cur) / rem
                S, tail = self.segment(cur, step_to)
                total = linalg.mat_mul(S, total)
                err += tail
                cur = step_to
                if cur == v:
                    break
        return total, err


def _segment_transport(shifted, n, h, wp, maxterms):
    """Transport Taylor data along h from coefficient lists at the center."""
    lead = shifted[n]
    q_n0 = lead[0]
    if abs(q_n0) == 0:
        raise NumericError("leading coefficient vanishes at a step center")
    inv_lead = 1 / q_n0
    terms = []  # c_m as 4-vectors (one per basis solution)
    for m in range(n):
        terms.append([nums.mpc(1 if m == i else 0) for i in range(n)])
    habs = abs(h)
    tol = nums.mpfr(2) ** (-wp - 8)
    scale = nums.mpfr(1)
    hpow = habs ** n
    small_run = 0
    pairs = []
    for i, coeffs in enumerate(shifted):
        for k, c in enumerate(coeffs):
            if (i, k) != (n, 0) and c != 0:
                pairs.append((i, k, c))
    m = 0
    while True:
        # coefficient of tau^m determines c_{m+n}
        acc = [nums.mpc(0)] * n
        for i, k, c in pairs:
            idx = m - k + i
            if idx < 0 or m - k < 0 or idx >= len(terms):
                continue
            ff = 1
            for r in range(i):
                ff *= idx - r
            if ff == 0:
                continue
            w = c * ff
            src = terms[idx]
            for s in range(n):
                acc[s] += w * src[s]
        ffl = 1
        for r in range(n):
            ffl *= m + n - r
        w = -inv_lead / ffl
        new = [w * x for x in acc]
        terms.append(new)
        mag = max(abs(x) for x in new) * hpow
        hpow *= habs
        scale = max(scale, mag)
        if mag < tol * scale:
            small_run += 1
            if small_run >= n + 4 and m >= 8:
                break
        else:
            small_run = 0
        m += 1
        if m > maxterms:
            raise NumericError("Taylor series did not reach tolerance (step too large?)")
    total = len(terms)
    # transported data: d_l = sum_m C(m, l) c_m h^(m-l)
    out = [[nums.mpc(0)] * n for _ in range(n)]
    tail = nums.mpfr(0)
    for l in range(n):
        col = [nums.mpc(0)] * n
        hp = nums.mpc(1)
        for m in range(l, total):
            binom = math.comb(m, l)
            cm = terms[m]
            w = hp * binom
            for s in range(n):
                col[s] += cm[s] * w
            hp *= h
        for s in range(n):
            out[l][s] = col[s]
    # tail estimate: last few coefficient magnitudes at |h|
    hpw = habs ** (total - 1)
    for m in range(total - 1, max(total - 5, 0), -1):
        tail += max(abs(x) for x in terms[m]) * hpw
        hpw /= habs
    tail = tail / scale
    return out, tail


# ---------------------------------------------------------------------------
# Base point and loop construction
# ---------------------------------------------------------------------------

def _seg_point_dist(a, b, p):
    """Distance from point p to segment [a, b] (complex plane)."""
    ab = b - a
    denom = gmpy2.norm(ab)
    if denom == 0:
        return abs(p - a)
    s = ((p - a) * gmpy2.mpc(ab.real, -ab.imag)).real / denom
    if s < 0:
        s = nums.mpfr(0)
    elif s > 1:
        s = nums.mpfr(1)
    return abs(p - (a + s * ab))


def _loop_radii(genuine, avoid):
    radii = {}
    for s in genuine:
        z = s.as_mpc()
        others = [a for a in avoid if abs(a - z) > nums.mpfr("1e-12")]
        if others:
            d = min(abs(a - z) for a in others)
        else:
            d = max(abs(z), nums.mpfr(1))
        radii[s.key()] = d * nums.mpfr(RING_FACTOR)
    return radii


def _candidate_grid(avoid):
    res = [a.real for a in avoid] or [nums.mpfr(0)]
    ims = [a.imag for a in avoid] or [nums.mpfr(0)]
    lo = math.floor(min(res)) - 2
    hi = math.ceil(max(res)) + 2
    xs = [Fraction(k, 2) for k in range(2 * lo, 2 * hi + 1)]
    ys = [Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(-1),
          Fraction(3, 2), Fraction(-3, 2), Fraction(2), Fraction(-2)]
    ymax = math.ceil(max(abs(v) for v in ims)) if ims else 0
    if ymax >= 2:
        ys += [Fraction(ymax + 1), Fraction(-(ymax + 1))]
    return [(x, y) for y in ys for x in xs]


def _base_point(genuine, avoid, radii):
    """Deterministic rational base point with collision-free approaches."""
    best = None
    best_left = None
    real_sing = [s.as_mpc().real for s in genuine if abs(s.as_mpc().imag) < 1e-9]
    avoid_r = []
    for a in avoid:
        others = [b for b in avoid if abs(b - a) > nums.mpfr("1e-12")]
        d = min(abs(b - a) for b in others) if others else max(abs(a), nums.mpfr(1))
        avoid_r.append((a, d * nums.mpfr(RING_FACTOR)))
    for (x, y) in _candidate_grid(avoid):
        b = nums.mpc(x, y)
        ok = True
        clearance = nums.mpfr(10)
        for a, ra in avoid_r:
            if abs(b - a) < nums.mpfr(6) / 5 * ra:
                ok = False
                break
        if not ok:
            continue
        for s in genuine:
            z = s.as_mpc()
            r = radii[s.key()]
            if abs(b - z) <= r * nums.mpfr(13) / 10:
                ok = False
                break
            entry = z + r * (b - z) / abs(b - z)
            for a, ra in avoid_r:
                if abs(a - z) < nums.mpfr("1e-12"):
                    continue
                d = _seg_point_dist(b, entry, a) / ra
                if d < nums.mpfr(11) / 20:
                    ok = False
                    break
                clearance = min(clearance, d)
            if not ok:
                break
        if not ok:
            continue
        mind = min(abs(b - s.as_mpc()) for s in genuine) if genuine else nums.mpfr(1)
        score = (min(clearance, nums.mpfr(3)), min(mind, nums.mpfr(3)), -abs(b))
        key = (x, y)
        is_left = y == 0 and (not real_sing or all(float(x) < v for v in real_sing))
        cand = (score, key, b)
        if is_left and (best_left is None or _better(cand, best_left)):
            best_left = cand
        if best is None or _better(cand, best):
            best = cand
    chosen = best_left if best_left is not None else best
    if chosen is None:
        raise NumericError("no admissible base point on the candidate grid")
    return chosen[1], chosen[2]


def _better(cand, ref):
    (sc, key, _), (sr, keyr, _) = cand, ref
    if sc != sr:
        return sc > sr
    return key < keyr


def _build_loop(base_v, point, radius) -> Loop:
    z = point.as_mpc()
    u = (base_v - z) / abs(base_v - z)
    entry = z + radius * u
    ring = []
    for j in range(RING_VERTICES + 1):
        ang = nums.two_pi() * j / RING_VERTICES
        rot = gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))
        ring.append(z + radius * u * rot)
    return Loop(base=base_v, singularity=point, radius=radius,
                approach=[base_v, entry], ring=ring)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def continuation(op: ThetaOperator, path, initial, prec: int = nums.DEFAULT_PREC):
    """Continue a solution with Taylor data ``initial`` along a polyline.

    ``initial`` is (y, y', y''/2!, ..., y^(n-1)/(n-1)!) at path[0]; the
    returned vector carries the same data at path[-1].
    """
    wp = prec + nums.GUARD_BITS
    with nums.workprec(wp):
        eng = _Engine(op, wp)
        pts = [nums.mpc(p) if not isinstance(p, gmpy2.mpc) else p for p in path]
        T, _ = eng.transport(pts)
        vec = [nums.mpc(v) for v in initial]
        return linalg.mat_vec(T, vec)


def monodromy_matrices(
    op: ThetaOperator,
    prec: int = nums.DEFAULT_PREC,
    points=None,
) -> MonodromyData:
    """Local monodromy generators in the derivative-scaled basis at a
    deterministic base point, ordered by argument; the matrix at infinity
    is the inverse of the ordered product of the finite ones.

    ``points`` restricts the expensive loop transport to the listed
    singular points (keys or SingularPoint); the matrix at infinity is
    only available when all finite loops are computed.
    """
    op = op.canonical()
    rows, apparent = local_data(op, prec)
    for p, _ in rows:
        if not p.is_regular:
            raise MathDomainError(f"irregular singular point {p}; monodromy engine requires a Fuchsian operator")
    genuine = [p for p, _ in rows if not p.is_infinity()]
    wp = prec + nums.GUARD_BITS
    wanted = None
    if points is not None:
        wanted = set()
        for q in points:
            if isinstance(q, SingularPoint):
                wanted.add(q.key())
            elif q == "inf" or q == ("infinity",):
                wanted.add(("infinity",))
            else:
                wanted.add(("rational", Fraction(q)) if not isinstance(q, tuple) else q)
        if ("infinity",) in wanted:
            wanted = None  # the matrix at infinity needs every finite loop
    with nums.workprec(wp):
        eng = _Engine(op, wp)
        radii = _loop_radii(genuine, eng.avoid)
        base_key, base_v = _base_point(genuine, eng.avoid, radii)
        ordered = sorted(
            genuine,
            key=lambda s: (
                gmpy2.atan2((s.as_mpc() - base_v).imag, (s.as_mpc() - base_v).real),
                abs(s.as_mpc() - base_v),
            ),
        )
        mats = []
        for s in ordered:
            if wanted is not None and s.key() not in wanted:
                mats.append(None)
                continue
            loop = _build_loop(base_v, s, radii[s.key()])
            A, err_a = eng.transport(loop.approach)
            R, err_r = eng.transport(loop.ring)
            Ainv = linalg.mat_inv(A)
            M = linalg.mat_mul(Ainv, linalg.mat_mul(R, A))
            err = (err_a * 2 + err_r) * max(nums.mpfr(1), linalg.frobenius_norm(M))
            mats.append(MonodromyMatrix(point=s, matrix=M, prec=prec,
                                        err_estimate=err, loop=loop))
        result = [m for m in mats if m is not None]
        residual = nums.mpfr(0)
        if all(m is not None for m in mats):
            prod = linalg.identity(eng.n)
            for m in mats:
                prod = linalg.mat_mul(m.matrix, prod)
            minf = linalg.mat_inv(prod)
            inf_point = next(
                (p for p, _ in rows if p.is_infinity()), SingularPoint.infinity()
            )
            check = linalg.mat_mul(prod, minf)
            residual = linalg.max_abs(linalg.mat_sub(check, linalg.identity(eng.n)))
            err_inf = sum((m.err_estimate for m in mats), nums.mpfr(0))
            result.append(
                MonodromyMatrix(point=inf_point, matrix=minf, prec=prec,
                                err_estimate=err_inf, loop=None)
            )
        return MonodromyData(
            base=base_key,
            base_value=base_v,
            matrices=result,
            product_residual=residual,
            prec=prec,
        )


def scalar_scale(mat: MonodromyMatrix, alpha: Fraction) -> MonodromyMatrix:
    """Multiply by exp(2 pi i alpha): the effect of an exponent shift on
    the local matrix at 0 (and, inversely, at infinity)."""
    with nums.workprec(mat.prec + nums.GUARD_BITS):
        w = nums.exp_2pi_i(Fraction(alpha))
        return MonodromyMatrix(
            point=mat.point,
            matrix=linalg.mat_scale(mat.matrix, w),
            prec=mat.prec,
            err_estimate=mat.err_estimate,
            loop=mat.loop,
        )


def jordan_classify(
    mat,
    max_order: int = 120,
    prec: int | None = None,
) -> JordanData:
    """Snap eigenvalues to roots of unity and read off Jordan block sizes
    from numeric ranks of powers of (M - zeta I)."""
    if isinstance(mat, MonodromyMatrix):
        matrix = mat.matrix
        prec = prec if prec is not None else mat.prec
    else:
        matrix = mat
        prec = prec if prec is not None else nums.DEFAULT_PREC
    n = len(matrix)
    wp = prec + nums.GUARD_BITS
    with nums.workprec(wp):
        matrix = [[nums.mpc(x) for x in row] for row in matrix]
        eigs = linalg.eigenvalues(matrix)
        radius = max(nums.mpfr("1e-5"), nums.mpfr(2) ** (-(wp // 4) + 8))
        clusters = []
        for z in sorted(eigs, key=lambda w: (w.real, w.imag)):
            for c in clusters:
                if abs(z - c[0]) < radius:
                    c.append(z)
                    break
            else:
                clusters.append([z])
        norm = max(nums.mpfr(1), linalg.frobenius_norm(matrix))
        blocks = []
        orders = []
        semisimple = True
        for members in clusters:
            mean = sum(members, nums.mpc(0)) / len(members)
            expo = nums.snap_unit_root(mean, prec, max_order)
            if expo is None:
                raise NumericError(
                    f"eigenvalue {nums.nstr(mean, 48)} is not a root of unity "
                    f"of order <= {max_order} within tolerance "
                    "(not quasi-unipotent within tolerance)"
                )
            zeta = nums.exp_2pi_i(expo)
            mult = len(members)
            shifted = [
                [matrix[i][j] - (zeta if i == j else 0) for j in range(n)]
                for i in range(n)
            ]
            power = shifted
            defects = []
            for k in range(1, mult + 1):
                scale = norm ** k
                r = linalg.rank(power, nums.eig_window(prec), scale=scale)
                defects.append(n - r)
                if k < mult:
                    power = linalg.mat_mul(power, shifted)
            sizes = _block_sizes(defects)
            if sum(sizes) != mult:
                raise NumericError(
                    f"Jordan block sizes {sizes} inconsistent with eigenvalue "
                    f"multiplicity {mult} (rank thresholds unreliable here)"
                )
            if any(s > 1 for s in sizes):
                semisimple = False
            orders.append(expo.denominator)
            blocks.append((expo, zeta, sizes))
        order = math.lcm(*orders) if orders else 1
        blocks.sort(key=lambda b: b[0])
        return JordanData(blocks=blocks, order=order, semisimple=semisimple)


def _block_sizes(defects) -> list[int]:
    """Block sizes from the defect sequence d_k = n - rank((M - zI)^k):
    the number of blocks of size >= k is d_k - d_{k-1}."""
    geq = []
    prev = 0
    for d in defects:
        geq.append(d - prev)
        prev = d
    sizes = []
    for k in range(len(geq)):
        nxt = geq[k + 1] if k + 1 < len(geq) else 0
        sizes.extend([k + 1] * (geq[k] - nxt))
    return sorted((s for s in sizes if s > 0), reverse=True)
