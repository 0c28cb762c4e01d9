"""Arbitrary-precision real/complex arithmetic carrier and precision control.

The working type is gmpy2.mpfr / gmpy2.mpc (MPFR/MPC backed), chosen for
speed in the analytic-continuation hot path.  mpmath (same gmpy backend)
is used behind small-matrix eigen/SVD and polynomial root routines; the
converters here are lossless in both directions.

Precision is controlled through the ``workprec`` context manager which
sets gmpy2's context and mpmath's ``mp.prec`` together.  Public entry
points of the numeric modules take a semantic precision ``prec`` (bits of
the *delivered* accuracy) and run internally at ``prec + GUARD_BITS`` so
that the snapping and rank thresholds tied to ``prec`` sit far above the
actual rounding noise.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction

import gmpy2
import mpmath
from mpmath import mp

DEFAULT_PREC = 128
MIN_PREC = 64
GUARD_BITS = 64


@contextlib.contextmanager
def workprec(bits: int):
    """Run a block with gmpy2 and mpmath both at ``bits`` of precision."""
    old_ctx = gmpy2.get_context()
    old_mp = mp.prec
    gmpy2.set_context(gmpy2.context(precision=bits))
    mp.prec = bits
    try:
        yield
    finally:
        gmpy2.set_context(old_ctx)
        mp.prec = old_mp


def current_prec() -> int:
    return gmpy2.get_context().precision


def mpfr(x) -> gmpy2.mpfr:
    """Convert int/Fraction/str/float/mpfr to mpfr at current precision."""
    if isinstance(x, Fraction):
        return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))
    if isinstance(x, gmpy2.mpq):
        return gmpy2.mpfr(x)
    return gmpy2.mpfr(x)


def mpc(re, im=0) -> gmpy2.mpc:
    if isinstance(re, (gmpy2.mpc, complex)) and im == 0:
        return gmpy2.mpc(re)
    return gmpy2.mpc(mpfr(re), mpfr(im))


def is_complexlike(x) -> bool:
    return isinstance(x, (gmpy2.mpc, gmpy2.mpfr, complex, float, int, Fraction))


def two_pi() -> gmpy2.mpfr:
    return 2 * gmpy2.const_pi()


def root_of_unity(p: int, q: int) -> gmpy2.mpc:
    """exp(2*pi*i*p/q) at current precision."""
    ang = two_pi() * mpfr(Fraction(p, q))
    return gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))


def exp_2pi_i(alpha: Fraction) -> gmpy2.mpc:
    return root_of_unity(alpha.numerator, alpha.denominator)


def mpfr_to_fraction(x: gmpy2.mpfr) -> Fraction:
    """Exact rational value of a finite mpfr."""
    if not gmpy2.is_finite(x):
        raise ValueError("non-finite value has no rational representation")
    if x == 0:
        return Fraction(0)
    m, e = x.as_mantissa_exp()
    return Fraction(int(m)) * Fraction(2) ** int(e)


def to_mpmath(z) -> mpmath.mpc:
    """Lossless gmpy2 -> mpmath conversion (at mp's current precision)."""
    if isinstance(z, gmpy2.mpc):
        return mpmath.mpc(to_mpmath(z.real), to_mpmath(z.imag))
    x = gmpy2.mpfr(z)
    if x == 0:
        return mpmath.mpf(0)
    m, e = x.as_mantissa_exp()
    return mpmath.mpf((int(m), int(e)))


def from_mpmath(z) -> gmpy2.mpc:
    """Lossless mpmath -> gmpy2 conversion (rounds at current context)."""
    if isinstance(z, mpmath.mpc) or (hasattr(z, "imag") and z.imag != 0):
        return gmpy2.mpc(_mpf_to_mpfr(z.real), _mpf_to_mpfr(z.imag))
    return gmpy2.mpc(_mpf_to_mpfr(z), gmpy2.mpfr(0))


def _mpf_to_mpfr(x) -> gmpy2.mpfr:
    xm = mpmath.mpf(x)
    sign, man, exp, _ = xm._mpf_
    if man == 0:
        if xm == 0:
            return gmpy2.mpfr(0)
        raise ValueError(f"cannot convert special value {xm!r}")
    val = gmpy2.mpfr(man)
    val = -val if sign else val
    return gmpy2.mul_2exp(val, exp) if exp >= 0 else gmpy2.div_2exp(val, -exp)


# ---------------------------------------------------------------------------
# Tolerance windows.  All are tied to the *semantic* precision, not to the
# guarded working precision, so results computed with guard bits clear them
# with a wide margin.
# ---------------------------------------------------------------------------

def snap_window(prec: int) -> gmpy2.mpfr:
    """Window for snapping numeric local exponents to rationals."""
    return mpfr(2) ** (32 - prec)


def eig_window(prec: int) -> gmpy2.mpfr:
    """Window for snapping monodromy eigenvalues to roots of unity."""
    return mpfr(2) ** (24 - prec)


def sv_rel_threshold(prec: int) -> gmpy2.mpfr:
    """Relative singular-value threshold for nullspace membership."""
    return mpfr(2) ** (24 - prec)


def snap_fraction(x, prec: int, max_den: int = 120):
    """Snap a real value to a/b with b <= max_den, or None if out of window.

    Accepts mpfr or mpc (imaginary part must be inside the window).
    """
    if isinstance(x, gmpy2.mpc):
        if abs(x.imag) >= snap_window(prec):
            return None
        x = x.real
    cand = mpfr_to_fraction(gmpy2.mpfr(x)).limit_denominator(max_den)
    if abs(x - mpfr(cand)) < snap_window(prec):
        return cand
    return None


def snap_unit_root(z: gmpy2.mpc, prec: int, max_order: int = 120):
    """Snap a complex value to exp(2*pi*i*p/q), q <= max_order.

    Returns Fraction(p, q) in [0, 1) or None if no admissible root of
    unity lies within the eigenvalue window.
    """
    if abs(abs(z) - 1) >= eig_window(prec):
        return None
    ang = gmpy2.atan2(z.imag, z.real) / two_pi()
    frac = mpfr_to_fraction(ang).limit_denominator(max_order)
    frac -= frac.__floor__()
    if abs(z - exp_2pi_i(frac)) < eig_window(prec):
        return frac
    return None


def nstr(x, prec: int | None = None) -> str:
    """Deterministic decimal string with digits matching the precision."""
    if prec is None:
        prec = current_prec()
    ndig = max(10, int(prec * 0.30103) + 2)
    if isinstance(x, gmpy2.mpc):
        return f"{nstr(x.real, prec)} {nstr(x.imag, prec)}"
    x = gmpy2.mpfr(x)
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    ds, e, _ = x.digits(10, ndig)
    sign = ""
    if ds.startswith("-"):
        sign, ds = "-", ds[1:]
    return f"{sign}{ds[0]}.{ds[1:]}e{e - 1:+03d}"
