"""Saddle-point expansion coefficients for the Farey-class residue sums.

The machinery follows one pattern for every coefficient family: build the
Taylor series of a phase function at its saddle (stripping the double zero),
build the Taylor series of an amplitude function there, convert both into
the alpha coefficients of Perron's method through partial ordinary Bell
polynomials, and combine weighted alphas into the coefficient families

    a_t  (first waves),   c_t, c*_t  (class C),   d_t  (class D, by parity),
    e_t  (class E).

Square roots of amplitudes are taken on the branch reached by continuous
continuation from a real reference point on the original integration
interval; the leading constants are cross-checked against closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .dilog import DilogZero, SaddlePoint, _li2_raw, dilog_zero, saddle_point, wave_constants
from .errors import (
    DomainError,
    PoleError,
    SelfCheckError,
    StaleSaddleError,
    UsageError,
)
from .numerics import (
    BigComplex,
    PrecisionContext,
    TruncatedSeries,
    _gmpy_ctx,
    _to_mpc,
    s_add,
    s_deriv,
    s_integ,
    s_log,
    s_mul,
    s_pow_int,
    s_recip,
    s_scale,
    s_sqrt,
    s_trim,
)

__all__ = [
    "SeriesPair",
    "ExpansionCoeffs",
    "bell_partial",
    "alpha",
    "aux_eval",
    "amplitude_series",
    "phase_series",
    "expansion_coeffs",
    "expansion_eval",
    "sine_wave_form",
    "a1_closed_form",
]

FAMILIES = ("a", "c", "c_star", "d_odd", "d_even", "e")


@dataclass(frozen=True)
class SeriesPair:
    """Phase and amplitude expansions at a saddle, ready for alpha()."""

    phase: TruncatedSeries  # coefficients p_s (double zero already removed)
    amplitude: TruncatedSeries  # coefficients q_s
    mu: int = 2

    @property
    def p0(self) -> BigComplex:
        return self.phase.coeffs[0]


# -- partial ordinary Bell polynomials and Perron alphas ---------------------


def bell_partial(i: int, j: int, p) -> BigComplex:
    """Coefficient of x^i in (p1 x + p2 x^2 + ...)^j; p is indexed from 1."""
    if i < 0 or j < 0:
        raise DomainError("bell_partial indices must be non-negative")
    if j == 0:
        return BigComplex(1 if i == 0 else 0)
    if j >= 1 and len(p) < i:
        raise UsageError("bell_partial needs at least i coefficients of p")
    raw = [_to_mpc(x) for x in p]
    return BigComplex._raw(_bell_table(i, j, raw)[i][j])


def _bell_table(i_max: int, j_max: int, p: list) -> list:
    """table[i][j] = B-hat_{i,j}(p_1, p_2, ...) for raw mpc coefficients."""
    zero = mpc(0)
    one = mpc(1)
    table = [[zero] * (j_max + 1) for _ in range(i_max + 1)]
    table[0][0] = one
    for j in range(1, j_max + 1):
        for i in range(j, i_max + 1):
            acc = zero
            for m in range(1, i - j + 2):
                if m <= len(p):
                    acc = acc + p[m - 1] * table[i - m][j - 1]
            table[i][j] = acc
    return table


def _half_binomial(s: int, mu: int, j: int) -> Fraction:
    """binomial(-(s+1)/mu, j) as an exact rational."""
    top = Fraction(-(s + 1), mu)
    acc = Fraction(1)
    for r in range(j):
        acc *= top - r
    return acc / math.factorial(j)


def alpha(s: int, sp: SeriesPair) -> BigComplex:
    """Perron expansion coefficient alpha_s(q) from the series pair."""
    if s < 0:
        raise DomainError("s must be non-negative")
    pc = sp.phase.raw()
    qc = sp.amplitude.raw()
    if len(pc) < s + 1 or len(qc) < s + 1:
        raise UsageError("series order too small for alpha_s")
    mu = sp.mu
    with _gmpy_ctx(sp.phase.bits):
        p0 = pc[0]
        phat = [pc[i] / p0 for i in range(1, s + 1)]
        table = _bell_table(s, s, phat)
        power = gmpy2.exp(mpq(-(s + 1), mu) * gmpy2.log(p0))
        total = mpc(0)
        for i in range(0, s + 1):
            inner = mpc(0)
            for j in range(0, i + 1):
                b = _half_binomial(s, mu, j)
                if b:
                    inner += mpq(b.numerator, b.denominator) * table[i][j]
            total += qc[s - i] * inner
        return BigComplex._raw(power * total / mu)


# -- series builders at a saddle ---------------------------------------------
#
# All builders work on raw coefficient lists in the local variable
# t = z - z_center and assume an active gmpy2 context.


def _poly_z(z0: mpc, order: int, scale=1, shift=0) -> list:
    """Series of scale*(z + shift) about z0."""
    out = [mpc(scale * (z0 + shift)), mpc(scale)]
    return s_trim(out, order)


def _exp_linear(c0: mpc, c1: mpc, order: int) -> list:
    """Series of exp(c0 + c1 t)."""
    out = [gmpy2.exp(c0)]
    for m in range(1, order):
        out.append(out[-1] * c1 / m)
    return out


def _sin_cos_series(a: mpc, b: mpc, order: int) -> tuple[list, list]:
    """Series of sin(a + b t) and cos(a + b t)."""
    sa, ca = gmpy2.sin(a), gmpy2.cos(a)
    sin_t = [mpc(0)] * order
    cos_t = [mpc(0)] * order
    bp = mpc(1)
    fact = mpfr(1)
    for m in range(order):
        if m:
            bp = bp * b
            fact = fact * m
        c = bp / fact
        r = m % 4
        if r == 0:
            cos_t[m] = c
        elif r == 1:
            sin_t[m] = c
        elif r == 2:
            cos_t[m] = -c
        else:
            sin_t[m] = -c
    sin_full = s_add(s_scale(cos_t, sa), s_scale(sin_t, ca), order)
    cos_full = s_add(s_scale(cos_t, ca), s_scale(sin_t, -sa), order)
    return sin_full, cos_full


def _cot_series(a: mpc, b: mpc, order: int, tiny: mpfr) -> list:
    """Series of cot(a + b t)."""
    sin_s, cos_s = _sin_cos_series(a, b, order)
    if abs(sin_s[0]) < tiny:
        raise PoleError("cotangent evaluated at a pole")
    return s_mul(cos_s, s_recip(sin_s, order), order)


def _cot_deriv_series(a: mpc, b: mpc, r: int, order: int, tiny: mpfr) -> list:
    """Series of cot^{(r)}(a + b t), derivatives taken in the argument."""
    c = _cot_series(a, b, order + r, tiny)
    for _ in range(r):
        c = s_deriv(c)
        c = [x / b for x in c]
    return s_trim(c, order)


def _exp2piz_series(z0: mpc, order: int) -> list:
    pi = gmpy2.const_pi()
    return _exp_linear(2 * pi * mpc(0, 1) * z0, 2 * pi * mpc(0, 1), order)


def _log_one_minus_e_series(z0: mpc, order: int, tol: mpfr) -> list:
    """Series of log(1 - e^{2 pi i z}) at z0."""
    e = _exp2piz_series(z0, order)
    one_minus = [1 - e[0]] + [-x for x in e[1:]]
    return s_log(one_minus, order)


def _li2_series_at(z0: mpc, order: int, tol: mpfr) -> list:
    """Series of Li2(e^{2 pi i z}) at z0 via its derivative."""
    pi = gmpy2.const_pi()
    lg = _log_one_minus_e_series(z0, max(order - 1, 1), tol)
    integ = s_integ(s_scale(lg, -2 * pi * mpc(0, 1)))
    e0 = gmpy2.exp(2 * pi * mpc(0, 1) * z0)
    integ[0] = _li2_raw(e0, tol)
    return s_trim(integ, order)


def _pd_series(z0: mpc, d: int, order: int, tol: mpfr) -> list:
    """Series of p_d(z) at z0."""
    pi = gmpy2.const_pi()
    li2s = _li2_series_at(z0, order, tol)
    num = [-x for x in li2s]
    num[0] += pi * pi / 6 + 4 * pi * pi * d
    den = _poly_z(z0, order, scale=2 * pi * mpc(0, 1))
    return s_mul(num, s_recip(den, order), order)


def _sqrt_track(fn, x_ref, z_target, steps: int = 64) -> mpc:
    """Continuous square root of fn along [x_ref, z_target], from the
    principal (positive) branch at the real reference point."""
    prev = gmpy2.sqrt(mpc(fn(mpc(x_ref))))
    for i in range(1, steps + 1):
        z = x_ref + (z_target - x_ref) * mpfr(i) / steps
        v = gmpy2.sqrt(mpc(fn(z)))
        if abs(v - prev) > abs(v + prev):
            v = -v
        prev = v
    return prev


def _sqrt_series_tracked(radicand: list, fn, x_ref, z_target, order: int) -> list:
    lead = _sqrt_track(fn, x_ref, z_target)
    return s_sqrt(radicand, order, leading=lead)


# -- the concrete phase/amplitude catalogue ----------------------------------


_PHASES = ("p", "p_half", "p1")


def _phase_raw(phase: str, z0: mpc, order: int, tol: mpfr, check: mpfr) -> list:
    if phase == "p":
        ser = _pd_series(z0, 0, order + 2, tol)
    elif phase == "p1":
        ser = _pd_series(z0, 1, order + 2, tol)
    elif phase == "p_half":
        ser = s_scale(_pd_series(z0, 0, order + 2, tol), mpfr("0.5"))
    else:
        raise UsageError(f"unknown phase {phase!r}")
    if abs(ser[1]) > check:
        raise StaleSaddleError(
            f"phase {phase} has |p'(z*)| = {float(abs(ser[1])):.3e} at the supplied saddle"
        )
    return ser[2 : order + 2]


def phase_series(phase: str, sp_center: SaddlePoint, order: int, ctx: PrecisionContext) -> TruncatedSeries:
    """Taylor coefficients p_s of the phase at the saddle, with the double
    zero removed: p(z) - p(z*) = sum_s p_s (z - z*)^{s+2}."""
    if phase not in _PHASES:
        raise UsageError(f"unknown phase {phase!r}")
    with ctx.active():
        z0 = +sp_center.z_star._v
        coeffs = _phase_raw(phase, z0, order, ctx.eps(-4), ctx.eps(10))
        return TruncatedSeries._raw(coeffs, z0, ctx.bits)


def _amp_exp_factor(z0: mpc, c: mpc, order: int) -> list:
    """Series of exp(c z) at z0."""
    return _exp_linear(c * z0, c, order)


def _amp_raw(family: str, lam: Fraction, z0: mpc, order: int, tiny: mpfr) -> list:
    """Raw amplitude series for one family at its saddle (active context)."""
    pi = gmpy2.const_pi()
    i = mpc(0, 1)
    lamq = mpq(lam.numerator, lam.denominator)
    zpoly = _poly_z(z0, order)
    if family in ("q", "f_A"):
        sin_s, _ = _sin_cos_series(pi * (z0 - 1), pi, order)
        rad = s_mul(zpoly, s_recip(s_scale(sin_s, 2), order), order)
        fn = lambda z: z / (2 * gmpy2.sin(pi * (z - 1)))
        root = _sqrt_series_tracked(rad, fn, mpfr("1.25"), z0, order)
        out = s_mul(root, _amp_exp_factor(z0, -pi * i / 2, order), order)
        if family == "f_A":
            out = s_mul(out, _amp_exp_factor(z0, -2 * pi * i * lamq, order), order)
        return out
    if family in ("q_C", "f_C"):
        sin_s, _ = _sin_cos_series(pi * z0, pi, order)
        rad = s_mul(zpoly, s_recip(s_scale(sin_s, 2), order), order)
        fn = lambda z: z / (2 * gmpy2.sin(pi * z))
        root = _sqrt_series_tracked(rad, fn, mpfr("2.25"), z0, order)
        out = s_mul(root, _amp_exp_factor(z0, -pi * i / 2, order), order)
        if family == "f_C":
            out = s_mul(out, _amp_exp_factor(z0, -2 * pi * i * lamq, order), order)
        return out
    if family in ("q_C_star", "f_C_star"):
        root = _sqrt_series_tracked(zpoly, lambda z: z, mpfr("3.25"), z0, order)
        phase = gmpy2.exp(-3 * pi * i / 4)
        out = s_scale(root, phase)
        if family == "f_C_star":
            out = s_mul(out, _amp_exp_factor(z0, -2 * pi * i * lamq, order), order)
        return out
    if family in ("q_D", "f_D", "q_D_star", "f_D_star"):
        sin_s, _ = _sin_cos_series(pi * (z0 - 1) / 2, pi / 2, order)
        rad = s_mul(zpoly, s_recip(s_scale(sin_s, 2), order), order)
        fn = lambda z: z / (2 * gmpy2.sin(pi * (z - 1) / 2))
        root = _sqrt_series_tracked(rad, fn, mpfr("1.25"), z0, order)
        if family in ("q_D", "f_D"):
            ef = _exp_linear(-pi * i / 4 * (z0 + 3), -pi * i / 4, order)
            out = s_mul(root, ef, order)
            if family == "f_D":
                out = s_mul(out, _amp_exp_factor(z0, -pi * i * lamq, order), order)
            return out
        ef = _exp_linear(pi * i / 4 * (z0 - 1), pi * i / 4, order)
        out = s_mul(s_mul(s_scale(sin_s, 2), root, order), ef, order)
        if family == "f_D_star":
            out = s_mul(out, _amp_exp_factor(z0, -pi * i * lamq, order), order)
            out = s_scale(out, i)
        return out
    raise UsageError(f"unknown amplitude family {family!r}")


def amplitude_series(
    family: str, lam, sp_center: SaddlePoint, order: int, ctx: PrecisionContext
):
    """Amplitude Taylor series at the saddle for the named function family.

    ``f_E`` returns a list of series (the coefficient of each power of 1/N),
    everything else a single TruncatedSeries.
    """
    lam = Fraction(lam)
    with ctx.active():
        z0 = +sp_center.z_star._v
        tiny = ctx.eps(0)
        if family == "f_E":
            base = _amp_raw("f_C", lam, z0, order, tiny)
            out = []
            for ell in range(order):
                phi = _phi_star_raw(lam, ell, z0, order, ctx.eps(-4), tiny)
                out.append(TruncatedSeries._raw(s_mul(base, phi, order), z0, ctx.bits))
            return out
        coeffs = _amp_raw(family, lam, z0, order, tiny)
        return TruncatedSeries._raw(coeffs, z0, ctx.bits)


# -- auxiliary function families ---------------------------------------------


def _g_ell_raw(ell: int, z0: mpc, order: int, tiny: mpfr) -> list:
    from .combinatorics import bernoulli

    pi = gmpy2.const_pi()
    b = bernoulli(2 * ell)
    pref = -mpq(b.numerator, b.denominator) / gmpy2.fac(2 * ell)
    zp = s_pow_int(_poly_z(z0, order, scale=pi), 2 * ell - 1, order)
    cot = _cot_deriv_series(pi * z0, pi, 2 * ell - 2, order, tiny)
    return s_scale(s_mul(zp, cot, order), pref)


def _g_star_raw(ell: int, z0: mpc, order: int, tiny: mpfr) -> list:
    from .combinatorics import bernoulli

    pi = gmpy2.const_pi()
    b = bernoulli(2 * ell)
    pref = -mpq(b.numerator, b.denominator) / gmpy2.fac(2 * ell)
    zp = s_pow_int(_poly_z(z0, order, scale=pi / 2), 2 * ell - 1, order)
    cot = _cot_deriv_series(pi * (z0 - 1) / 2, pi / 2, 2 * ell - 2, order, tiny)
    return s_scale(s_mul(zp, cot, order), pref)


def _g_tilde_raw(ell: int, z0: mpc, order: int, tiny: mpfr) -> list:
    from .combinatorics import bernoulli

    pi = gmpy2.const_pi()
    b = bernoulli(2 * ell)
    pref = mpq(b.numerator, b.denominator) / gmpy2.fac(2 * ell)
    zp = s_pow_int(_poly_z(z0, order, scale=pi), 2 * ell - 1, order)
    inner = s_mul(_poly_z(z0, order, scale=pi), _cot_deriv_series(pi * z0, pi, 2 * ell - 1, order, tiny), order)
    inner = s_add(inner, s_scale(_cot_deriv_series(pi * z0, pi, 2 * ell - 2, order, tiny), 2 * ell - 1), order)
    return s_scale(s_mul(zp, inner, order), pref)


def _g_C_raw(ell: int, z0: mpc, order: int, tiny: mpfr) -> list:
    return s_scale(_g_ell_raw(ell, z0, order, tiny), mpq(1, 2 ** (2 * ell - 1)) - 1)


def _g_D_raw(ell: int, z0: mpc, order: int, tiny: mpfr) -> list:
    g = _g_ell_raw(ell, z0, order, tiny)
    gs = _g_star_raw(ell, z0, order, tiny)
    two = 2 ** (2 * ell - 1)
    # g - g* + 2^{2l-1} (2 g* - g)
    out = s_add(s_scale(g, 1 - two), s_scale(gs, 2 * two - 1), order)
    return out


def _phi_raw(sigma, m: int, z0: mpc, order: int, tol: mpfr, tiny: mpfr) -> list:
    pi = gmpy2.const_pi()
    i = mpc(0, 1)
    if m == 0:
        li2s = _li2_series_at(z0, order, tol)
        lg = _log_one_minus_e_series(z0, order, tol)
        zlg = s_mul(_poly_z(z0, order, scale=2 * pi * i), lg, order)
        out = [-(li2s[j] + zlg[j]) for j in range(order)]
        out[0] += pi * pi / 6 + 6 * pi * pi
        return s_scale(out, 1 / (4 * pi * pi))
    if m == 1:
        z2 = s_pow_int(_poly_z(z0, order), 2, order)
        cot = _cot_series(pi * z0, pi, order, tiny)
        out = s_scale(s_mul(z2, cot, order), 1 / (4 * i))
        out = s_add(out, s_scale(z2, mpq(1, 4)), order)
        out = s_add(out, s_scale(_poly_z(z0, order), -mpq(5, 4) / (pi * i)), order)
        return out
    if m % 2 == 1:
        return [mpc(0)] * order
    gt = _g_tilde_raw(m // 2, z0, order, tiny)
    out = s_scale(s_mul(_poly_z(z0, order), gt, order), 1 / (2 * pi * i))
    if m == 2 and sigma:
        sg = _to_mpc(sigma)
        out = s_add(out, s_scale(s_pow_int(_poly_z(z0, order), 2, order), -sg), order)
    return out


def _phi_star_raw(lam: Fraction, ell: int, z0: mpc, order: int, tol: mpfr, tiny: mpfr) -> list:
    out = _phi_raw(0, ell, z0, order, tol, tiny)
    if ell == 1 and lam:
        lamq = mpq(lam.numerator, lam.denominator)
        out = s_add(out, s_scale(s_pow_int(_poly_z(z0, order), 2, order), lamq), order)
    return out


def _u_family_raw(weight1: list, g_by_ell: dict, jmax: int, order: int) -> list:
    """u_j series for j = 0..jmax from exp(W1 x + sum_l G_l x^{2l-1})."""
    slots = [None] * (jmax + 1)  # coefficient series of x^w
    if jmax >= 1:
        slots[1] = weight1
    for ell, g in g_by_ell.items():
        w = 2 * ell - 1
        if ell >= 2 and w <= jmax:
            slots[w] = g if slots[w] is None else s_add(slots[w], g, order)
    zero = [mpc(0)] * order
    one = [mpc(0)] * order
    one[0] = mpc(1)
    us = [one]
    # ODE recurrence in x: (m+1) u_{m+1} = sum_i (i+1) slots[i+1] u_{m-i}
    for m in range(jmax):
        acc = None
        for i in range(m + 1):
            src = slots[i + 1] if i + 1 <= jmax else None
            if src is None:
                continue
            term = s_scale(s_mul(src, us[m - i], order), i + 1)
            acc = term if acc is None else s_add(acc, term, order)
        us.append(s_scale(acc, mpq(1, m + 1)) if acc is not None else list(zero))
    return us


def _u_series(kind: str, sigma: Fraction, z0: mpc, jmax: int, order: int, tiny: mpfr) -> list:
    """Series of u_{0,j}, u*_{sigma,j} or u_{D,sigma,j} for j = 0..jmax."""
    pi = gmpy2.const_pi()
    i = mpc(0, 1)
    sq = mpq(sigma.numerator, sigma.denominator)
    need = [ell for ell in range(1, (jmax + 1) // 2 + 1) if 2 * ell - 1 <= jmax]
    if kind == "u0":
        gs = {ell: _g_ell_raw(ell, z0, order, tiny) for ell in need}
        w1 = gs.get(1, [mpc(0)] * order)
    elif kind == "u_star":
        gs = {ell: _g_C_raw(ell, z0, order, tiny) for ell in need}
        lin = s_scale(_poly_z(z0, order), pi * i * (16 * sq + 1) / 8)
        w1 = s_add(gs.get(1, [mpc(0)] * order), lin, order) if jmax >= 1 else lin
    elif kind == "u_D":
        gs = {ell: _g_D_raw(ell, z0, order, tiny) for ell in need}
        lin = s_scale(_poly_z(z0, order), pi * i * sq)
        w1 = s_add(gs.get(1, [mpc(0)] * order), lin, order) if jmax >= 1 else lin
    else:
        raise UsageError(f"unknown u-family {kind!r}")
    return _u_family_raw(w1, gs, jmax, order)


_AUX_KINDS = ("g", "g_star", "g_tilde", "g_C", "g_D", "u0", "u_star", "u_D", "phi", "phi_star")


def aux_eval(family: str, args: dict, ctx: PrecisionContext) -> BigComplex:
    """Point evaluation of the auxiliary function families.

    ``args`` carries ``z`` plus, as needed, ``ell``/``j``/``m`` and
    ``sigma``/``lam``.  Cotangent derivatives are always taken from local
    cosine/sine series, never from symbolic tables.
    """
    if family not in _AUX_KINDS:
        raise UsageError(f"unknown auxiliary family {family!r}")
    with ctx.active():
        z0 = _to_mpc(args["z"])
        tiny = ctx.eps(0)
        tol = ctx.eps(-4)
        if family in ("g", "g_star", "g_tilde", "g_C", "g_D"):
            ell = int(args["ell"])
            if ell < 1:
                raise DomainError("ell must be >= 1")
            fn = {
                "g": _g_ell_raw,
                "g_star": _g_star_raw,
                "g_tilde": _g_tilde_raw,
                "g_C": _g_C_raw,
                "g_D": _g_D_raw,
            }[family]
            return BigComplex._raw(fn(ell, z0, 1, tiny)[0])
        if family in ("u0", "u_star", "u_D"):
            j = int(args["j"])
            if j < 0:
                raise DomainError("j must be >= 0")
            sigma = Fraction(args.get("sigma", 0))
            us = _u_series(family, sigma, z0, j, 1, tiny)
            return BigComplex._raw(us[j][0])
        if family == "phi":
            m = int(args["m"])
            sigma = args.get("sigma", 0)
            return BigComplex._raw(_phi_raw(sigma, m, z0, 1, tol, tiny)[0])
        lam = Fraction(args.get("lam", 0))
        ell = int(args["ell"])
        return BigComplex._raw(_phi_star_raw(lam, ell, z0, 1, tol, tiny)[0])


# -- expansion coefficient families ------------------------------------------


@dataclass(frozen=True)
class ExpansionCoeffs:
    """A coefficient family {a_t}, {c_t}, {c*_t}, {d_t} or {e_t}."""

    family: str
    lam: Fraction
    coeffs: tuple
    base_zero: DilogZero
    scale: str  # "full" for w^{-N}, "half" for w^{-N/2}

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise UsageError(f"unknown family {self.family!r}")
        if self.scale not in ("full", "half"):
            raise UsageError("scale must be 'full' or 'half'")


def _gamma_half(m: int) -> Fraction:
    """Rational part of Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)."""
    return Fraction(math.factorial(2 * m), 4**m * math.factorial(m))


def a1_closed_form(lam, ctx: PrecisionContext) -> BigComplex:
    """The closed form of the second first-wave coefficient a_1(lambda)."""
    lam = Fraction(lam)
    w0 = dilog_zero(0, -1, ctx).w
    z0 = saddle_point(1, 0, ctx).z_star
    with ctx.active():
        wv, zv = +w0._v, +z0._v
        pi = gmpy2.const_pi()
        i = mpc(0, 1)
        lq = mpq(lam.numerator, lam.denominator)
        tz = 2 * pi * i * zv
        bracket = tz * tz * (6 * lq * lq + 6 * lq + 1) / 12 - tz * (2 * lq + 1) + 1
        val = -wv / (pi * i * gmpy2.exp(pi * i * zv * (3 + 2 * lq))) * bracket
        return BigComplex._raw(val)


def _alpha_weighted_sum(phase: TruncatedSeries, amps: list, t: int, weight) -> mpc:
    """sum_{s=0}^{t} Gamma(s + 1/2) alpha_{2s}(amps[t - s]) (active ctx)."""
    sqrt_pi = gmpy2.sqrt(gmpy2.const_pi())
    acc = mpc(0)
    for s in range(t + 1):
        amp = amps[t - s]
        if amp is None:
            continue
        pair = SeriesPair(phase, amp)
        g = _gamma_half(s)
        acc += mpq(g.numerator, g.denominator) * sqrt_pi * alpha(2 * s, pair)._v
    return weight * acc


def expansion_coeffs(family: str, lam, m: int, ctx: PrecisionContext) -> ExpansionCoeffs:
    """Build coefficients 0..m-1 of the named expansion family at lambda.

    Family ``a`` is additionally verified against the closed forms of its
    first two coefficients.
    """
    if family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}")
    if m < 1:
        raise DomainError("need at least one coefficient")
    lam = Fraction(lam)
    order = 2 * m + 6
    jmax = m - 1

    if family == "a":
        sp = saddle_point(1, 0, ctx)
        base = dilog_zero(0, -1, ctx)
        phase = phase_series("p", sp, order, ctx)
        amp = amplitude_series("f_A", lam, sp, order, ctx)
        with ctx.active():
            us = _u_series("u0", Fraction(0), +sp.z_star._v, jmax, order, ctx.eps(0))
            amps = [
                TruncatedSeries._raw(s_mul(amp.raw(), u, order), +sp.z_star._v, ctx.bits)
                for u in us
            ]
            coeffs = []
            for t in range(m):
                val = _alpha_weighted_sum(phase, amps, t, -4 * mpc(0, 1))
                coeffs.append(BigComplex._raw(val))
        _self_check_a(coeffs, lam, ctx)
        return ExpansionCoeffs("a", lam, tuple(coeffs), base, "full")

    if family in ("c", "e"):
        sp = saddle_point(2, 0, ctx)
        base = dilog_zero(0, -2, ctx)
        phase = phase_series("p", sp, order, ctx)
        ampC = amplitude_series("f_C", lam, sp, order, ctx)
        with ctx.active():
            z0 = +sp.z_star._v
            us = _u_series("u0", Fraction(0), z0, jmax, order, ctx.eps(0))
            coeffs = []
            if family == "c":
                amps = [
                    TruncatedSeries._raw(s_mul(ampC.raw(), u, order), z0, ctx.bits)
                    for u in us
                ]
                for t in range(m):
                    val = _alpha_weighted_sum(phase, amps, t, mpc(1))
                    coeffs.append(BigComplex._raw(val))
            else:
                phis = [
                    _phi_star_raw(lam, kk, z0, order, ctx.eps(-4), ctx.eps(0))
                    for kk in range(m)
                ]
                sqrt_pi = gmpy2.sqrt(gmpy2.const_pi())
                for t in range(m):
                    acc = mpc(0)
                    for s in range(t + 1):
                        g = _gamma_half(s)
                        gam = mpq(g.numerator, g.denominator) * sqrt_pi
                        for kk in range(t - s + 1):
                            prod = s_mul(
                                s_mul(ampC.raw(), phis[kk], order), us[t - s - kk], order
                            )
                            pair = SeriesPair(
                                phase, TruncatedSeries._raw(prod, z0, ctx.bits)
                            )
                            acc += gam * alpha(2 * s, pair)._v
                    coeffs.append(BigComplex._raw(2 * acc))
        return ExpansionCoeffs(family, lam, tuple(coeffs), base, "full")

    if family == "c_star":
        sp = saddle_point(3, 1, ctx)
        base = dilog_zero(1, -3, ctx)
        phase = phase_series("p1", sp, order, ctx)
        amp = amplitude_series("f_C_star", lam, sp, order, ctx)
        with ctx.active():
            z0 = +sp.z_star._v
            us = _u_series("u_star", lam / 2, z0, jmax, order, ctx.eps(0))
            iamp = s_scale(amp.raw(), mpc(0, 1))
            amps = [
                TruncatedSeries._raw(s_mul(iamp, u, order), z0, ctx.bits) for u in us
            ]
            wroot = gmpy2.exp(-gmpy2.log(+base.w._v) / 2)  # w(1,-3)^{-1/2}
            inner = []
            for j in range(m):
                inner.append(_alpha_weighted_sum(phase, amps, j, mpc(1)))
            coeffs = []
            for t in range(m):
                acc = mpc(0)
                for j in range(t + 1):
                    acc += (
                        mpq(math.comb(t + 1, j + 1))
                        * mpq(-2) ** (j - t)
                        * inner[j]
                    )
                coeffs.append(BigComplex._raw(wroot / 2 * acc))
        return ExpansionCoeffs("c_star", lam, tuple(coeffs), base, "full")

    if family in ("d_odd", "d_even"):
        sp = saddle_point(1, 0, ctx)
        base = dilog_zero(0, -1, ctx)
        phase = phase_series("p_half", sp, order, ctx)
        with ctx.active():
            z0 = +sp.z_star._v
            coeffs = []
            if family == "d_odd":
                amp = amplitude_series("f_D", lam, sp, order, ctx)
                us = _u_series("u_D", Fraction(0), z0, jmax, order, ctx.eps(0))
                amps = [
                    TruncatedSeries._raw(s_mul(amp.raw(), u, order), z0, ctx.bits)
                    for u in us
                ]
                for t in range(m):
                    val = _alpha_weighted_sum(phase, amps, t, mpc(-2))
                    coeffs.append(BigComplex._raw(val))
            else:
                amp = amplitude_series("f_D_star", lam, sp, order, ctx)
                us = _u_series("u_D", lam, z0, jmax, order, ctx.eps(0))
                amps = [
                    TruncatedSeries._raw(s_mul(amp.raw(), u, order), z0, ctx.bits)
                    for u in us
                ]
                wroot = gmpy2.exp(-gmpy2.log(+base.w._v) / 2)
                inner = []
                for j in range(m):
                    inner.append(_alpha_weighted_sum(phase, amps, j, mpc(1)))
                for t in range(m):
                    acc = mpc(0)
                    for j in range(t + 1):
                        acc += (
                            mpq(math.comb(t + 1, j + 1))
                            * mpq(-1) ** (j - t)
                            * inner[j]
                        )
                    coeffs.append(BigComplex._raw(-2 * wroot * acc))
        return ExpansionCoeffs(family, lam, tuple(coeffs), base, "half")

    raise UsageError(f"unhandled family {family!r}")


def _self_check_a(coeffs: list, lam: Fraction, ctx: PrecisionContext) -> None:
    z0 = saddle_point(1, 0, ctx).z_star
    with ctx.active():
        pi = gmpy2.const_pi()
        i = mpc(0, 1)
        lq = mpq(lam.numerator, lam.denominator)
        a0_closed = 2 * (+z0._v) * gmpy2.exp(-pi * i * (+z0._v) * (1 + 2 * lq))
        tol = mpfr(10) ** (-(ctx.decimal_digits // 2))
        if abs(coeffs[0]._v - a0_closed) > tol * (1 + abs(a0_closed)):
            raise SelfCheckError("a_0 from the alpha machinery disagrees with its closed form")
        if len(coeffs) >= 2:
            a1c = a1_closed_form(lam, ctx)._v
            if abs(coeffs[1]._v - a1c) > tol * (1 + abs(a1c)):
                raise SelfCheckError("a_1 from the alpha machinery disagrees with its closed form")


def expansion_eval(ec: ExpansionCoeffs, N: int, ctx: PrecisionContext) -> mpfr:
    """Re[ base^{-N (or -N/2)} / N^2 * sum_t coeffs[t] / N^t ]."""
    if N < 1:
        raise DomainError("N must be positive")
    if ec.family == "d_odd" and N % 2 == 0:
        raise UsageError("d_odd coefficients require odd N")
    if ec.family == "d_even" and N % 2 == 1:
        raise UsageError("d_even coefficients require even N")
    with ctx.active():
        w = +ec.base_zero.w._v
        expo = mpq(-N, 2) if ec.scale == "half" else mpq(-N, 1)
        wpow = gmpy2.exp(expo * gmpy2.log(w))
        acc = mpc(0)
        Nf = mpfr(N)
        for t in range(len(ec.coeffs) - 1, -1, -1):
            acc = acc / Nf + ec.coeffs[t]._v
        return (wpow / (Nf * Nf) * acc).real


def sine_wave_form(N: int, lam, ctx: PrecisionContext) -> mpfr:
    """Leading oscillatory form (e^{UN}/N^2) psi_lambda sin(tau_lambda + VN)."""
    if N < 1:
        raise DomainError("N must be positive")
    wc = wave_constants(lam, ctx)
    with ctx.active():
        Nf = mpfr(N)
        return (
            gmpy2.exp(wc.U * Nf)
            / (Nf * Nf)
            * wc.psi_lambda
            * gmpy2.sin(wc.tau_lambda + wc.V * Nf)
        )
