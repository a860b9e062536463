"""Dilogarithm, Clausen integral, branch zeros and saddle points.

The principal-branch dilogarithm is evaluated by its defining series inside
|z| <= 1/2 and by functional equations elsewhere (reflection at 1, inversion
at infinity, and a log-argument Bernoulli series in the remaining annulus).
Branch zeros w(A, B) of the analytically continued dilogarithm are located
with a damped Newton iteration run on a precision ladder; each zero feeds a
saddle point of the phase functions p_d used by the asymptotic machinery.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .combinatorics import _bernoulli_number
from .errors import (
    BranchError,
    ConvergenceError,
    DomainError,
    NoZeroError,
    SelfCheckError,
    StaleSaddleError,
)
from .numerics import BigComplex, PrecisionContext, _to_mpc, _to_mpfr

__all__ = [
    "li2",
    "clausen",
    "clausen_cont",
    "pd",
    "DilogZero",
    "dilog_zero",
    "SaddlePoint",
    "saddle_point",
    "WaveConstants",
    "wave_constants",
]


def _bern_mpfr(k: int) -> mpfr:
    b = _bernoulli_number(k)
    return mpfr(mpq(b.numerator, b.denominator))


def _li2_series(z: mpc, tol: mpfr) -> mpc:
    # sum z^n / n^2, |z| <= 1/2 so the ratio test is crisp
    term = z
    total = z
    n = 1
    while True:
        n += 1
        term = term * z
        t = term / (n * n)
        total += t
        if abs(t) < tol:
            return total


def _li2_logseries(z: mpc, tol: mpfr) -> mpc:
    # expansion in u = -log(1-z):  Li2(z) = sum_k B_k u^(k+1) / (k! (k+1)),
    # convergent for |u| < 2 pi
    u = -gmpy2.log(1 - z)
    q = abs(u) / (2 * gmpy2.const_pi())
    if q >= mpfr("0.995"):
        raise BranchError("dilogarithm argument too close to the cut")
    total = u - u * u / 4  # k = 0 and k = 1 terms (B_0 = 1, B_1 = -1/2)
    p = u * u  # u^(k+1) / k! at k = 2, built incrementally
    # |B_k / k!| <= 2.03 (2 pi)^-k for even k >= 2, so the tail from k on is
    # below 2.03 |u| q^k / (1 - q)
    qk = q * q
    bound_scale = mpfr("2.03") * abs(u) / (1 - q)
    k = 2
    while True:
        p = p * u / k
        if k % 2 == 0:
            total += _bern_mpfr(k) * p / (k + 1)
            if bound_scale * qk < tol:
                return total
        qk *= q
        k += 1


def _li2_raw(z: mpc, tol: mpfr) -> mpc:
    if gmpy2.is_zero(z.real) and gmpy2.is_zero(z.imag):
        return mpc(0)
    if gmpy2.is_zero(z.imag) and z.real >= 1:
        if z.real == 1:
            pi = gmpy2.const_pi()
            return mpc(pi * pi / 6)
        raise BranchError("dilogarithm evaluated on the cut [1, oo)")
    az = abs(z)
    if az <= mpfr("0.5"):
        return _li2_series(z, tol)
    pi = gmpy2.const_pi()
    w = 1 - z
    if abs(w) <= mpfr("0.5"):
        return (
            pi * pi / 6
            - gmpy2.log(z) * gmpy2.log(w)
            - _li2_series(w, tol)
        )
    if az >= 2:
        lg = gmpy2.log(-z)
        return -_li2_raw(1 / z, tol) - pi * pi / 6 - lg * lg / 2
    return _li2_logseries(z, tol)


def li2(z, ctx: PrecisionContext) -> BigComplex:
    """Principal-branch dilogarithm on C - (1, oo); Li2(1) = pi^2/6.

    Series evaluation inside |z| <= 1/2; reflection, inversion and a
    log-argument Bernoulli expansion cover the rest of the plane without
    leaving the principal branch.
    """
    with ctx.active():
        zz = _to_mpc(z)
        return BigComplex._raw(_li2_raw(zz, ctx.eps(-4)))


def clausen(theta, ctx: PrecisionContext) -> mpfr:
    """Clausen's integral Cl_2(theta): odd, 2 pi periodic."""
    with ctx.active():
        t = _to_mpfr(theta)
        twopi = 2 * gmpy2.const_pi()
        t = t - twopi * gmpy2.floor(t / twopi)
        if gmpy2.is_zero(t):
            return mpfr(0)
        z = mpc(gmpy2.cos(t), gmpy2.sin(t))
        if gmpy2.is_zero(z.imag) and z.real >= 1:
            return mpfr(0)  # theta = 0 mod 2 pi after rounding
        return _li2_raw(z, ctx.eps(-4)).imag


def clausen_cont(z, m: int, ctx: PrecisionContext) -> BigComplex:
    """Analytic continuation of Cl_2(2 pi z) to the strip m < Re(z) < m+1."""
    with ctx.active():
        zz = _to_mpc(z)
        if not (m < zz.real < m + 1):
            raise DomainError(f"Re(z) must lie in ({m}, {m + 1})")
        pi = gmpy2.const_pi()
        e = gmpy2.exp(2 * pi * mpc(0, 1) * zz)
        val = -mpc(0, 1) * _li2_raw(e, ctx.eps(-4)) + mpc(0, 1) * pi * pi * (
            zz * zz - (2 * m + 1) * zz + m * m + m + mpq(1, 6)
        )
        return BigComplex._raw(val)


def _pd_raw(z: mpc, d: int, tol: mpfr, derivatives: int = 0):
    """p_d(z) and optionally its first two derivatives (active context)."""
    pi = gmpy2.const_pi()
    i = mpc(0, 1)
    e = gmpy2.exp(2 * pi * i * z)
    p = (-_li2_raw(e, tol) + pi * pi / 6 + 4 * pi * pi * d) / (2 * pi * i * z)
    if derivatives == 0:
        return (p,)
    one_minus = 1 - e
    p1 = -(p - gmpy2.log(one_minus)) / z
    if derivatives == 1:
        return (p, p1)
    p2 = -(2 * p1 + 2 * pi * i * e / one_minus) / z
    return (p, p1, p2)


def _check_off_cuts(z: mpc, tol: mpfr) -> None:
    # cuts of p_d: vertical rays (-i oo, n] for integer n, plus z = 0
    if abs(z) < tol:
        raise DomainError("p_d is undefined at z = 0")
    frac = z.real - gmpy2.rint(z.real)
    if abs(frac) < tol and z.imag < tol:
        raise BranchError("z is on (or too close to) a vertical branch cut")


def pd(z, d: int, order: int, ctx: PrecisionContext) -> BigComplex:
    """The continued function p_d(z), or its first or second derivative."""
    if order not in (0, 1, 2):
        raise DomainError("order must be 0, 1 or 2")
    with ctx.active():
        zz = _to_mpc(z)
        _check_off_cuts(zz, ctx.eps(10))
        vals = _pd_raw(zz, d, ctx.eps(-4), derivatives=order)
        return BigComplex._raw(vals[order])


@dataclass(frozen=True)
class DilogZero:
    """A zero w(A, B) of Li2(w) + 4 pi^2 A + 2 pi i B log(w)."""

    A: int
    B: int
    w: BigComplex


_SEEDS = {
    (0, -1): ("0.9161978162", "-0.1824588972"),
    (0, -2): ("0.9684820460", "-0.1095311065"),
    (1, -3): ("-0.4594734813", "-0.8485350380"),
}

_ZERO_CACHE: dict[tuple[int, int, int], DilogZero] = {}
_ZERO_LOCK = threading.Lock()


def _zero_equation(w: mpc, A: int, B: int, tol: mpfr) -> tuple[mpc, mpc]:
    pi = gmpy2.const_pi()
    f = _li2_raw(w, tol) + 4 * pi * pi * A + 2 * pi * mpc(0, 1) * B * gmpy2.log(w)
    fp = (2 * pi * mpc(0, 1) * B - gmpy2.log(1 - w)) / w
    return f, fp


def _on_cuts(w: mpc, tiny: mpfr) -> bool:
    return abs(w.imag) < tiny and (w.real <= tiny or w.real >= 1 - tiny)


def _grid_seed(A: int, B: int) -> mpc:
    # coarse search over the annulus 0.1 < |w| < 3 minimizing |F|
    best, best_val = None, None
    tol = mpfr("1e-12")
    for ir in range(1, 30):
        r = mpfr("0.1") + ir * mpfr("0.1")
        for it in range(48):
            th = (it + mpfr("0.5")) * 2 * gmpy2.const_pi() / 48
            w = mpc(r * gmpy2.cos(th), r * gmpy2.sin(th))
            if _on_cuts(w, mpfr("1e-3")):
                continue
            try:
                f, _ = _zero_equation(w, A, B, tol)
            except (BranchError, ZeroDivisionError):
                continue
            v = abs(f)
            if best_val is None or v < best_val:
                best, best_val = w, v
    return best


def _newton_zero(A: int, B: int, seed: mpc, bits: int) -> mpc:
    w = seed
    steps = 0
    ladder = [bits]
    while ladder[-1] > 140:
        ladder.append(ladder[-1] // 2 + 30)
    for b in reversed(ladder):
        with gmpy2.context(precision=b):
            w = +w
            tol = mpfr(2) ** (-(b - 8))
            tiny = mpfr(2) ** (-(b // 2))
            f, fp = _zero_equation(w, A, B, tol / 16)
            for _ in range(120):
                steps += 1
                if steps > 200:
                    raise ConvergenceError(
                        f"Newton for w({A},{B}) did not converge in 200 steps"
                    )
                step = f / fp
                scale = 1
                while True:
                    cand = w - step / scale
                    if not _on_cuts(cand, tiny):
                        try:
                            f2, fp2 = _zero_equation(cand, A, B, tol / 16)
                        except (BranchError, ZeroDivisionError):
                            f2 = None
                        if f2 is not None and (abs(f2) < abs(f) or scale >= 1 << 20):
                            break
                    scale *= 2
                    if scale > 1 << 24:
                        raise ConvergenceError(
                            f"Newton step for w({A},{B}) kept increasing the residual"
                        )
                w, f, fp = cand, f2, fp2
                if abs(step) < abs(w) * tol:
                    break
    return w


def dilog_zero(A: int, B: int, ctx: PrecisionContext) -> DilogZero:
    """The unique zero w(A, B), found by Newton's method.

    Exists iff B != 0 and -|B|/2 < A <= |B|/2; the residual of the defining
    equation is verified to be below 10^(8 - decimal_digits).
    """
    if B == 0 or not (-abs(B) / 2 < A <= abs(B) / 2):
        raise NoZeroError(f"no dilogarithm zero for (A, B) = ({A}, {B})")
    key = (A, B, ctx.bits)
    with _ZERO_LOCK:
        hit = _ZERO_CACHE.get(key)
    if hit is not None:
        return hit

    if B > 0:
        conj = dilog_zero(A, -B, ctx)
        out = DilogZero(A, B, conj.w.conjugate())
        with _ZERO_LOCK:
            _ZERO_CACHE[key] = out
        return out

    with ctx.active():
        if (A, B) in _SEEDS:
            sr, si = _SEEDS[(A, B)]
            seed = mpc(mpfr(sr), mpfr(si))
        else:
            pi = gmpy2.const_pi()
            seed = gmpy2.exp(2 * pi * mpc(0, 1) * (A + mpc(0, mpfr("0.1")) * abs(B)) / B)
            if _on_cuts(seed, mpfr("1e-3")) or not (mpfr("0.05") < abs(seed) < 4):
                seed = _grid_seed(A, B)
        w = _newton_zero(A, B, seed, ctx.bits)
        f, _ = _zero_equation(w, A, B, ctx.eps(-4))
        if abs(f) > ctx.eps(8):
            raise ConvergenceError(
                f"residual of w({A},{B}) is {float(abs(f)):.3e}, above tolerance"
            )
        out = DilogZero(A, B, BigComplex._raw(w))
    with _ZERO_LOCK:
        _ZERO_CACHE[key] = out
    return out


@dataclass(frozen=True)
class SaddlePoint:
    """Saddle z* of p_d in the strip m - 1/2 < Re(z) < m + 1/2."""

    m: int
    d: int
    z_star: BigComplex
    p_value: BigComplex  # p_d(z*) = log w(d, -m)


def saddle_point(m: int, d: int, ctx: PrecisionContext) -> SaddlePoint:
    """Saddle point z* = m + log(1 - w(d, -m)) / (2 pi i), fully verified."""
    if m == 0 or not (-abs(m) / 2 < d <= abs(m) / 2):
        raise DomainError(f"no saddle for (m, d) = ({m}, {d})")
    zero = dilog_zero(d, -m, ctx)
    with ctx.active():
        w = +zero.w._v
        pi = gmpy2.const_pi()
        z = m + gmpy2.log(1 - w) / (2 * pi * mpc(0, 1))
        if not (m - 0.5 < z.real < m + 0.5):
            raise SelfCheckError("saddle left its unit strip")
        logw = gmpy2.log(w)
        p0, p1 = _pd_raw(z, d, ctx.eps(-4), derivatives=1)
        if abs(p1) > ctx.eps(10):
            raise StaleSaddleError(
                f"|p_d'(z*)| = {abs(p1):.3e} for (m, d) = ({m}, {d})"
            )
        if abs(p0 - logw) > ctx.eps(10):
            raise SelfCheckError("p_d(z*) does not match log w(d, -m)")
        return SaddlePoint(m, d, BigComplex._raw(z), BigComplex._raw(logw))


@dataclass(frozen=True)
class WaveConstants:
    """Growth rate, frequency, amplitude and phase of the first-wave term."""

    U: mpfr
    V: mpfr
    psi_lambda: mpfr
    tau_lambda: mpfr
    lam: Fraction


def wave_constants(lam, ctx: PrecisionContext) -> WaveConstants:
    """U = -log|w_0|, V = arg(1/w_0), and the lambda-dependent psi, tau."""
    lam = Fraction(lam)
    w0 = dilog_zero(0, -1, ctx).w
    z0 = saddle_point(1, 0, ctx).z_star
    with ctx.active():
        wv, zv = +w0._v, +z0._v
        pi = gmpy2.const_pi()
        U = -gmpy2.log(abs(wv))
        V = -gmpy2.atan2(wv.imag, wv.real)
        s = 1 + 2 * mpq(lam.numerator, lam.denominator)
        psi = 2 * abs(zv) * gmpy2.exp(pi * zv.imag * s)
        iz = mpc(0, 1) * zv
        tau = gmpy2.atan2(iz.imag, iz.real) - pi * zv.real * s
        twopi = 2 * pi
        tau = tau - twopi * gmpy2.rint(tau / twopi)
        if tau > pi:
            tau -= twopi
        elif tau <= -pi:
            tau += twopi
        return WaveConstants(U, V, psi, tau, lam)
