"""Frobenius series solutions at regular singular points.

Exponents in one congruence class mod Z are handled together.  Writing a
candidate solution as t^alpha * sum_{j,l} c[j][l] t^j log(t)^l / l!, the
theta-form recurrence turns into block equations

    chi0((alpha+j) I + N) c_j = -sum_k chi_k((alpha+j-k) I + N) c_{j-k}

where N lowers the log degree and chi_k collects the t^k-coefficients of
the local theta-form.  When alpha+j is a root of the indicial polynomial
chi0 of multiplicity mu, the block operator loses mu leading Taylor
coefficients: solving pushes the log degree up by mu (logs appear
exactly when the right-hand side is inconsistent) and mu new free
coefficients enter -- the classical escalation procedure.  Free
coefficients are tracked as formal parameters, so one march yields the
whole basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import nums
from .errors import MathDomainError, NumericError
from .local import SingularPoint, exponents_at, local_theta_numeric, local_theta_polys
from .operators import INFINITY, ThetaOperator
from .poly import Poly


@dataclass
class LogSeries:
    """t^exponent * sum_{l,j} coeff[l][j] * t^j * log(t)^l, truncated.

    coeff[l][j] is stored with plain log powers (no factorial scaling).
    """

    exponent: Fraction
    truncation: int
    coeff: list  # coeff[l][j] : gmpy2.mpc
    point: object = None
    group_size: int = 1
    slot: int = 0
    prec: int = nums.DEFAULT_PREC

    def log_degree(self, rel_tol=None) -> int:
        scale = self.max_abs()
        if scale == 0:
            return 0
        if rel_tol is None:
            rel_tol = nums.mpfr(2) ** (-(self.prec // 2))
        deg = 0
        for l, row in enumerate(self.coeff):
            if any(abs(c) > rel_tol * scale for c in row):
                deg = l
        return deg

    def max_abs(self):
        return max((abs(c) for row in self.coeff for c in row), default=nums.mpfr(0))

    def coefficient(self, l: int, j: int):
        if l < len(self.coeff) and 0 <= j < len(self.coeff[l]):
            return self.coeff[l][j]
        return nums.mpc(0)

    def shift_exponent(self, beta: Fraction) -> "LogSeries":
        """The series for t^beta * self (used by the shift law)."""
        return LogSeries(
            exponent=self.exponent + Fraction(beta),
            truncation=self.truncation,
            coeff=[list(row) for row in self.coeff],
            point=self.point,
            group_size=self.group_size,
            slot=self.slot,
            prec=self.prec,
        )

    def valuation(self, rel_tol=None) -> Fraction | None:
        """exponent + smallest t-offset carrying a non-negligible entry."""
        scale = self.max_abs()
        if scale == 0:
            return None
        if rel_tol is None:
            rel_tol = nums.mpfr(2) ** (-(self.prec // 2))
        best = None
        for row in self.coeff:
            for j, c in enumerate(row):
                if abs(c) > rel_tol * scale:
                    best = j if best is None else min(best, j)
                    break
        return None if best is None else self.exponent + best

    def to_doc(self) -> dict:
        return {
            "exponent": str(self.exponent),
            "truncation": self.truncation,
            "log_degree": self.log_degree(),
            "precision_bits": self.prec,
            "coefficients": [[nums.nstr(c, self.prec) for c in row] for row in self.coeff],
        }


def _local_theta_mpc(op: ThetaOperator, point) -> list[list[gmpy2.mpc]]:
    """Local theta-form coefficient lists at current working precision."""
    if isinstance(point, SingularPoint) and point.kind == "algebraic":
        return local_theta_numeric(op, point.as_mpc())
    polys = local_theta_polys(op, point)
    return [[nums.mpc(c) for c in p.coeffs] if not p.is_zero() else [] for p in polys]


def _taylor_rows(chi: list[gmpy2.mpc], beta: gmpy2.mpc, depth: int) -> list[gmpy2.mpc]:
    """chi^{(d)}(beta)/d! for d = 0..depth via synthetic division."""
    work = list(chi)
    out = []
    for _ in range(depth + 1):
        if not work:
            out.append(nums.mpc(0))
            continue
        acc = work[-1]
        for k in range(len(work) - 2, -1, -1):
            work[k], acc = acc, work[k] + acc * beta
        out.append(acc)
        work.pop()
    return out


def _apply_block(taylor, vecs, out, scale=-1):
    """out[l'] += scale * sum_d taylor[d] * vecs[l'+d] (parameter vectors)."""
    height = len(vecs)
    for lp in range(height):
        acc = None
        for d, e in enumerate(taylor):
            if lp + d >= height:
                break
            if e == 0:
                continue
            row = vecs[lp + d]
            if acc is None:
                acc = [e * x for x in row]
            else:
                for q, x in enumerate(row):
                    acc[q] += e * x
        if acc is not None:
            while len(out) <= lp:
                out.append(None)
            if out[lp] is None:
                out[lp] = [scale * x for x in acc]
            else:
                for q, x in enumerate(acc):
                    out[lp][q] += scale * x
    return out


def frobenius_basis(
    op: ThetaOperator,
    point,
    K: int = 40,
    prec: int = nums.DEFAULT_PREC,
) -> list[LogSeries]:
    """Basis of local solutions at a regular singular (or ordinary) point,
    grouped by distinct exponent, with logarithms where they are forced."""
    op = op.canonical()
    n = op.order
    if K < n:
        raise ValueError("truncation order must be at least the operator order")
    exps = exponents_at(op, point, prec)
    if not exps.all_rational():
        raise MathDomainError(
            "Frobenius grouping requires exponents snapped to rationals"
        )
    wp = prec + nums.GUARD_BITS
    with nums.workprec(wp):
        local = _local_theta_mpc(op, point)
        width = max(len(b) for b in local)
        chis = []
        for k in range(width):
            chis.append([b[k] if k < len(b) else nums.mpc(0) for b in local])
        out: list[LogSeries] = []
        for cls in _congruence_classes(exps):
            out.extend(_solve_class(cls, chis, K, point, prec))
    def sort_key(s):
        return (s.exponent, s.slot)
    return sorted(out, key=sort_key)


def _congruence_classes(exps):
    classes: dict[Fraction, list] = {}
    for v, m in exps.entries:
        key = v - v.__floor__()
        classes.setdefault(key, []).append((v, m))
    out = []
    for key in sorted(classes):
        roots = sorted(classes[key])
        out.append(roots)
    return out


def _solve_class(roots, chis, K, point, prec):
    """March the recurrence for one congruence class of exponents."""
    alpha = roots[0][0]
    offsets = {int(v - alpha): m for v, m in roots}
    n_params = sum(m for _, m in roots)
    cap = n_params  # log powers 0..cap-1 can appear
    rel_tol = nums.mpfr(2) ** (-(prec // 2))
    alpha_v = nums.mpc(alpha)
    chi0 = chis[0]
    width = len(chis)

    # param bookkeeping: list of (offset, slot)
    params: list[tuple[int, int]] = []
    # table[j] = list over log degree of parameter vectors
    table: list[list] = []

    for j in range(K + 1):
        beta = alpha_v + j
        rhs: list = []
        for k in range(1, min(j, width - 1) + 1):
            if not any(abs(c) != 0 for c in chis[k]):
                continue
            taylor = _taylor_rows(chis[k], beta - k, cap)
            _apply_block(taylor, table[j - k], rhs, scale=-1)
        rhs = [row for row in rhs]
        mu = offsets.get(j, 0)
        e = _taylor_rows(chi0, beta, cap)
        for d in range(mu):
            e[d] = nums.mpc(0)  # beta is an exact root of multiplicity mu
        deg_r = -1
        scale = nums.mpfr(0)
        for lp, row in enumerate(rhs):
            if row is None:
                continue
            m = max((abs(x) for x in row), default=nums.mpfr(0))
            scale = max(scale, m)
            if m > 0:
                deg_r = lp
        # drop negligible top rows that would push logs past the cap
        while deg_r >= 0 and deg_r + mu > cap - 1:
            row = rhs[deg_r]
            top = max((abs(x) for x in row), default=nums.mpfr(0))
            if top > rel_tol * max(scale, nums.mpfr(1)):
                raise NumericError(
                    f"log escalation beyond degree {cap - 1} at order {j} "
                    f"(inconsistent resonance at {point})"
                )
            rhs[deg_r] = None
            deg_r -= 1
            while deg_r >= 0 and rhs[deg_r] is None:
                deg_r -= 1
        height = deg_r + 1 + mu
        cvec = [[nums.mpc(0)] * len(params) for _ in range(height)]
        if mu == 0:
            for lp in range(deg_r, -1, -1):
                row = rhs[lp] if lp < len(rhs) and rhs[lp] is not None else None
                acc = list(row) if row is not None else [nums.mpc(0)] * len(params)
                for d in range(1, height - lp):
                    if e[d] == 0:
                        continue
                    upper = cvec[lp + d]
                    for q, x in enumerate(upper):
                        acc[q] -= e[d] * x
                inv = 1 / e[0]
                cvec[lp] = [x * inv for x in acc]
        else:
            for lp in range(deg_r, -1, -1):
                row = rhs[lp] if lp < len(rhs) and rhs[lp] is not None else None
                acc = list(row) if row is not None else [nums.mpc(0)] * len(params)
                for d in range(mu + 1, height - lp):
                    if e[d] == 0:
                        continue
                    upper = cvec[lp + d]
                    for q, x in enumerate(upper):
                        acc[q] -= e[d] * x
                inv = 1 / e[mu]
                cvec[lp + mu] = [x * inv for x in acc]
            # mu new free parameters enter at log slots 0..mu-1
            for slot in range(mu):
                params.append((j, slot))
                for row_ in table:
                    for l in range(len(row_)):
                        row_[l].append(nums.mpc(0))
                for l in range(height):
                    cvec[l].append(nums.mpc(1) if l == slot else nums.mpc(0))
        table.append(cvec)

    # assemble one LogSeries per parameter
    series = []
    group_sizes = {off: m for off, m in offsets.items()}
    for p, (off, slot) in enumerate(params):
        beta = alpha + off
        rows = []
        for l in range(cap):
            row = []
            for j in range(off, K + 1):
                vecs = table[j]
                val = vecs[l][p] if l < len(vecs) else nums.mpc(0)
                row.append(val)
            rows.append(row)
        # internal basis is log^l / l!; convert to plain log powers
        fact = 1
        for l in range(cap):
            if l > 1:
                fact *= l
            inv = nums.mpfr(Fraction(1, fact)) if l > 1 else nums.mpfr(1)
            rows[l] = [c * inv for c in rows[l]]
        while len(rows) > 1 and all(c == 0 for c in rows[-1]):
            rows.pop()
        series.append(
            LogSeries(
                exponent=beta,
                truncation=K - off,
                coeff=rows,
                point=point,
                group_size=group_sizes[off],
                slot=slot,
                prec=prec,
            )
        )
    return series


def apply_operator(
    op: ThetaOperator,
    series: LogSeries,
    prec: int | None = None,
) -> LogSeries:
    """Formal application of op to the truncated series (residual check).

    Uses Theta(t^b log^l) = b t^b log^l + l t^b log^(l-1); for a member of
    frobenius_basis the residual valuation is at least exponent + K + 1
    with K the member's truncation order.
    """
    if prec is None:
        prec = series.prec
    op = op.canonical()
    wp = prec + nums.GUARD_BITS
    with nums.workprec(wp):
        local = _local_theta_mpc(op, series.point)
        width = max(len(b) for b in local)
        chis = []
        for k in range(width):
            chis.append([b[k] if k < len(b) else nums.mpc(0) for b in local])
        K = series.truncation
        L = len(series.coeff)
        beta0 = nums.mpc(series.exponent)
        # internal (log^l / l!) coefficients as column vectors over j
        fact = [1] * (L + 1)
        for l in range(2, L + 1):
            fact[l] = fact[l - 1] * l
        table = []
        for j in range(K + 1):
            table.append([series.coefficient(l, j) * fact[l] for l in range(L)])
        out_len = K + width
        out = [[nums.mpc(0)] * L for _ in range(out_len)]
        for j in range(K + 1):
            taylors = None
            for k in range(width):
                chi = chis[k]
                if all(c == 0 for c in chi):
                    continue
                taylor = _taylor_rows(chi, beta0 + j, L - 1)
                tgt = out[j + k]
                src = table[j]
                for lp in range(L):
                    acc = nums.mpc(0)
                    for d in range(L - lp):
                        if taylor[d] == 0:
                            continue
                        acc += taylor[d] * src[lp + d]
                    tgt[lp] += acc
        rows = []
        for l in range(L):
            inv = nums.mpfr(Fraction(1, fact[l]))
            rows.append([out[j][l] * inv for j in range(out_len)])
        return LogSeries(
            exponent=series.exponent,
            truncation=out_len - 1,
            coeff=rows,
            point=series.point,
            group_size=series.group_size,
            slot=series.slot,
            prec=prec,
        )
