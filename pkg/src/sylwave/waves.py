"""Sylvester waves and Farey residues of the restricted partition generator.

The generating function Q(z; N, sigma) has a pole of order floor(N/k) at
each Farey fraction h/k of order N.  This module computes

* the residues Q_{h k sigma}(N), by a simple-pole closed form or by local
  series expansion;
* the waves W_k(N, n), by five independent routes (residue sums, coefficient
  extraction at roots of unity, the power-sum/Apostol formula, closed forms
  for k near N, and the Bernoulli multinomial for the first wave);
* exact rational wave polynomials, recovered from multiprecision values by
  continued-fraction rationalization plus re-verification;
* waves of general denumerants.

Waves are real; every complex route symmetrizes conjugate roots in pairs so
the imaginary part vanishes by construction and is asserted before being
dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr, mpq, mpz

from .combinatorics import (
    _power_sums_class,
    bernoulli,
    ramanujan_sum,
    stirling2,
)
from .errors import (
    DomainError,
    NearPoleError,
    PrecisionError,
    SelfCheckError,
    UsageError,
)
from .numerics import (
    BigComplex,
    PrecisionContext,
    _to_mpc,
    s_exp,
    s_log,
    s_mul,
    s_recip,
)

__all__ = [
    "QResidue",
    "WavePolySet",
    "Denumerant",
    "q_eval",
    "q_residue",
    "wave",
    "wave_exact_w1",
    "apostol_beta",
    "wave_poly",
    "wave_denumerant",
    "denumerant_count",
    "wave_digits_policy",
]

WAVE_ROUTES = ("auto", "residue_sum", "series_at_roots", "theorem24", "closed_small", "glaisher_w1")


def wave_digits_policy(N: int, ctx: PrecisionContext) -> PrecisionContext:
    """Working precision for residue-extraction wave routes.

    Empirical floor 0.7 N + 40 decimal digits; covers the cancellation
    between the e^{-nz} growth and factorial decay in the local expansions.
    Validated by the precision-doubling contract.
    """
    need = int(math.ceil(0.7 * N + 40))
    if ctx.decimal_digits >= need:
        return ctx
    return PrecisionContext(need)


# -- roots of unity and factor-log series ----------------------------------


@lru_cache(maxsize=64)
def _zeta_table(k: int, bits: int) -> tuple:
    """e^(2 pi i v / k) for v = 0..k-1 at the given precision."""
    with gmpy2.context(precision=bits):
        pi2 = 2 * gmpy2.const_pi()
        out = []
        for v in range(k):
            th = pi2 * v / k
            out.append(mpc(gmpy2.cos(th), gmpy2.sin(th)))
        return tuple(out)


def _coprime_pairs(k: int) -> list[tuple[int, bool]]:
    """Primitive exponents h <= k/2 with a flag for a distinct partner k-h."""
    if k == 1:
        return [(0, False)]
    out = []
    for h in range(1, k // 2 + 1):
        if math.gcd(h, k) == 1:
            out.append((h, h != k - h))
    return out


def _e_log_coeffs(order: int) -> list:
    """Coefficients (from index 1) of log((e^u - 1)/u), numerically.

    Assumes an active gmpy2 context.
    """
    one = mpfr(1)
    fact = mpfr(1)
    e_series = []
    for i in range(order + 1):
        fact = fact * (i + 1)
        e_series.append(one / fact)
    # e_series[i] = 1/(i+1)! so e_series is (e^u - 1)/u
    return s_log(e_series, order + 1)[1:]


def _root_log_coeffs(zeta: mpc, order: int) -> list:
    """Coefficients (from index 1) of log((1 - zeta e^u)/(1 - zeta)).

    Assumes an active gmpy2 context; zeta != 1.
    """
    fact = mpfr(1)
    ser = [1 - zeta]
    for i in range(1, order + 1):
        fact = fact * i
        ser.append(-zeta / fact)
    return s_log(ser, order + 1)[1:]


@lru_cache(maxsize=4096)
def _root_log_coeffs_cached(k: int, v: int, order: int, bits: int) -> tuple:
    """_root_log_coeffs at zeta = e^(2 pi i v / k), cache-shared across h."""
    with gmpy2.context(precision=bits):
        return tuple(_root_log_coeffs(_zeta_table(k, bits)[v], order))


# -- Q(z; N, sigma) ----------------------------------------------------------


def q_eval(z, N: int, sigma, ctx: PrecisionContext) -> BigComplex:
    """Direct evaluation of e^{2 pi i sigma z} / prod_j (1 - e^{2 pi i j z})."""
    if N < 1:
        raise DomainError("N must be positive")
    with ctx.active():
        zz = _to_mpc(z)
        sg = _to_mpc(sigma)
        pi2i = 2 * gmpy2.const_pi() * mpc(0, 1)
        floor = mpfr(2) ** (-(ctx.bits // 2))
        e1 = gmpy2.exp(pi2i * zz)
        num = gmpy2.exp(pi2i * sg * zz)
        den = mpc(1)
        ej = mpc(1)
        for _ in range(N):
            ej = ej * e1
            f = 1 - ej
            if abs(f) < floor:
                raise NearPoleError("z is numerically on a pole of Q")
            den = den * f
        return BigComplex._raw(num / den)


@dataclass(frozen=True)
class QResidue:
    """2 pi i times the residue of Q(z; N, sigma) at z = h/k."""

    h: int
    k: int
    sigma: int
    N: int
    value: BigComplex

    def __post_init__(self) -> None:
        if not (0 <= self.h < self.k <= self.N) and not (self.k == 1 and self.h == 0):
            raise DomainError("residue index must satisfy 0 <= h < k <= N")
        if math.gcd(self.h, self.k) != 1:
            raise DomainError("h/k must be reduced")


def _pole_order(N: int, k: int) -> int:
    return N // k


@lru_cache(maxsize=64)
def _one_minus_zeta_logs(k: int, bits: int) -> tuple:
    """log(1 - zeta^r) for r = 1..k-1 at the given precision."""
    with gmpy2.context(precision=bits):
        zt = _zeta_table(k, bits)
        return tuple(gmpy2.log(1 - zt[r]) for r in range(1, k))


def _simple_closed_value(h: int, k: int, sigma: int, N: int) -> mpc:
    """Simple-pole closed form, valid when floor(N/k) = 1 (active context)."""
    bits = gmpy2.get_context().precision
    logs = _one_minus_zeta_logs(k, bits)
    # prod_{j<=N, j != k} (1 - zeta^(j h mod k)), grouped by residue class
    log_acc = mpc(0)
    for r in range(1, k):
        # j h = r (mod k)  <=>  j = r * h^{-1} (mod k)
        j0 = (r * pow(h, -1, k)) % k
        if j0 == 0:
            continue
        cnt = (N - j0) // k + 1
        log_acc += cnt * logs[r - 1]
    prod = gmpy2.exp(log_acc)
    pi2i = 2 * gmpy2.const_pi() * mpc(0, 1)
    phase = gmpy2.exp(pi2i * ((sigma * h) % k) / k)
    return phase / (-k * prod)


def _series_residue_value(h: int, k: int, sigma: int, N: int) -> mpc:
    """Local-series residue for any pole order (active context)."""
    s = _pole_order(N, k)
    order = s + 2
    bits = gmpy2.get_context().precision
    pi = gmpy2.const_pi()
    i2pi = 2 * pi * mpc(0, 1)
    zero = mpfr(0)

    # log of prod_c E(2 pi i c k t) for the s vanishing factors,
    # E(u) = (e^u - 1)/u
    elog = _e_log_coeffs(order)
    g = [mpc(0) for _ in range(order)]
    if s > 0:
        ps = _power_sums_class(1, 0, s, order - 1)  # sums of c^m, c <= s
        scale = mpc(1)
        for m in range(1, order):
            scale = scale * (i2pi * k)
            g[m] += elog[m - 1] * scale * ps[m]

    # analytic factors grouped by residue class
    const_log = mpc(0)
    if k > 1:
        logs = _one_minus_zeta_logs(k, bits)
        for w in range(1, k):
            v = (h * w) % k
            cl = _root_log_coeffs_cached(k, v, order - 1, bits)
            cnt = (N - w) // k + 1
            const_log += cnt * logs[v - 1]
            psw = _power_sums_class(k, w, N, order - 1)
            scale = mpc(1)
            for m in range(1, order):
                scale = scale * i2pi
                g[m] += cl[m - 1] * scale * psw[m]

    # exp(2 pi i sigma t) / (everything above)
    num = [mpc(0) for _ in range(order)]
    num[0] = mpc(1)
    scale = mpc(1)
    fact = mpfr(1)
    for m in range(1, order):
        scale = scale * (i2pi * sigma)
        fact = fact * m
        num[m] = scale / fact
    inv = s_recip(s_exp(g, order), order)
    series = s_mul(num, inv, order)

    # prefactor: 2 pi i e^{2 pi i sigma h / k} / ((-2 pi i k)^s s! prod(1-zeta))
    phase = gmpy2.exp(i2pi * ((sigma * h) % k) / k)
    denom = (-i2pi * k) ** s * mpfr(gmpy2.fac(s)) * gmpy2.exp(const_log)
    return i2pi * phase / denom * series[s - 1]


def q_residue(
    h: int,
    k: int,
    sigma: int,
    N: int,
    ctx: PrecisionContext,
    method: str = "auto",
) -> QResidue:
    """Residue 2 pi i Res_{z=h/k} Q(z; N, sigma) for h/k in the Farey set.

    ``simple_closed`` needs pole order 1 (N/2 < k); ``series`` expands
    Q locally to order floor(N/k) + 2 and reads off the 1/t coefficient;
    ``auto`` picks the closed form whenever it applies.
    """
    if method not in ("auto", "simple_closed", "series"):
        raise UsageError(f"unknown q_residue method {method!r}")
    if k < 1 or k > N or h < 0 or (h >= k and k > 1) or (k == 1 and h != 0):
        raise DomainError("need a reduced h/k with 0 <= h < k <= N")
    if math.gcd(h, k) != 1:
        raise DomainError("h/k must be reduced")
    s = _pole_order(N, k)
    if method == "simple_closed" and s != 1:
        raise UsageError("simple_closed requires pole order 1 (N/2 < k <= N)")
    with ctx.active():
        if (method == "auto" and s == 1) or method == "simple_closed":
            val = _simple_closed_value(h, k, sigma, N)
        else:
            val = _series_residue_value(h, k, sigma, N)
        return QResidue(h, k, sigma, N, BigComplex._raw(val))


# -- wave routes -------------------------------------------------------------


def _wave_series_at_roots(k: int, N: int, n: int, ctx: PrecisionContext) -> mpfr:
    """Coefficient extraction of the z^{N-1} term at each primitive root."""
    s = N // k
    order = max(s, 1)
    with ctx.active():
        bits = gmpy2.get_context().precision
        elog = _e_log_coeffs(order)

        # shared part: e^{-nz} and the multiples-of-k factors c k z/(e^{ckz}-1)
        base = [mpfr(0) for _ in range(order)]
        if order > 1:
            base[1] = mpfr(-n)
        ps0 = _power_sums_class(1, 0, s, order - 1)
        kp = mpfr(1)
        for m in range(1, order):
            kp = kp * k
            base[m] -= elog[m - 1] * kp * ps0[m]

        if k == 1:
            h_series = s_exp(base, order)
            coeff = h_series[s - 1]
            sign = 1 if (N - 1) % 2 == 0 else -1
            return sign * coeff / mpfr(gmpy2.fac(N))

        if k == 2:
            # the single primitive root is -1; everything stays real:
            # odd-j factors are j z * G(j z) with G(u) = -1/(e^u + 1),
            # G(u)/G(0) = 2/(e^u + 1)
            fact = mpfr(1)
            ser = [mpfr(1)]
            for ii in range(1, order + 1):
                fact = fact * ii
                ser.append(1 / (2 * fact))
            rl = s_log(ser, order + 1)  # log((e^u + 1)/2)
            ps1 = _power_sums_class(2, 1, N, order - 1)
            g = list(base)
            for m in range(1, order):
                g[m] -= rl[m] * ps1[m]
            inner = s_exp(g, order)[s - 1]
            cnt = (N + 1) // 2
            sign = 1 if (N - 1 + n + cnt) % 2 == 0 else -1
            return sign * inner / (mpfr(2) ** cnt * mpfr(gmpy2.fac(s)) * mpfr(k) ** s)

        zt = _zeta_table(k, bits)
        root_logs = [None] * k
        for v in range(1, k):
            root_logs[v] = s_log(
                _recip_apostol_series(zt[v], order), order
            )
        psw = [None] + [_power_sums_class(k, w, N, order - 1) for w in range(1, k)]
        counts = [0] + [(N - w) // k + 1 for w in range(1, k)]
        pi2 = 2 * gmpy2.const_pi()

        total = mpfr(0)
        for hh, paired in _coprime_pairs(k):
            g = [mpc(x) for x in base]
            const_log = mpc(0)
            for w in range(1, k):
                v = (hh * w) % k
                rl = root_logs[v]
                const_log += counts[w] * rl[0]
                for m in range(1, order):
                    g[m] += rl[m] * psw[w][m]
            inner = s_exp(g, order)[s - 1]
            # rho^{-n} with rho = e^{2 pi i h / k}
            th = pi2 * ((-n * hh) % k) / k
            rho_pow = mpc(gmpy2.cos(th), gmpy2.sin(th))
            contrib = rho_pow * gmpy2.exp(const_log) * inner
            total += 2 * contrib.real if paired else contrib.real
        sign = 1 if (N - 1) % 2 == 0 else -1
        denom = mpfr(gmpy2.fac(s)) * mpfr(k) ** s
        return sign * total / denom


def _recip_apostol_series(zeta: mpc, order: int) -> list:
    """Series of G(u) = 1/(zeta e^u - 1) to the given order (active ctx)."""
    fact = mpfr(1)
    ser = [zeta - 1]
    for i in range(1, order):
        fact = fact * i
        ser.append(zeta / fact)
    return s_recip(ser, order)


def _wave_theorem24(k: int, N: int, n: int, ctx: PrecisionContext) -> mpfr:
    """Power-sum/Apostol formula over primitive k-th roots."""
    s = N // k
    with ctx.active():
        bits = gmpy2.get_context().precision
        zt = _zeta_table(k, bits)
        pi2 = 2 * gmpy2.const_pi()
        # beta_m(zeta^v) for 0 <= v < k, 1 <= m <= s - 1
        betas = {}

        def beta(v: int, m: int) -> mpc:
            keyv = (v, m)
            if keyv not in betas:
                betas[keyv] = _beta_value(m, k, v, zt)
            return betas[keyv]

        psw = [_power_sums_class(k, w, N, max(s - 1, 1)) for w in range(k)]
        total = mpfr(0)
        for hh, paired in _coprime_pairs(k):
            rho = zt[hh % k]
            # A_1 .. A_{s-1}
            a = [mpc(0)] * s
            if s >= 2:
                acc = mpc(-n) - mpq(N * (N + 1), 2)
                for w in range(k):
                    acc -= beta((hh * w) % k, 1) * psw[w][1]
                a[1] = acc
                fact = mpfr(1)
                for m in range(2, s):
                    fact = fact * m
                    acc = mpc(0)
                    for w in range(k):
                        acc -= beta((hh * w) % k, m) * psw[w][m]
                    a[m] = acc / (m * fact)
            inner = s_exp([mpc(0)] + a[1:], s)[s - 1] if s > 1 else mpc(1)
            # prefactor (-1)^{s-1} rho^{-n} / (k^{2s} s! prod_{r<=N-ks}(1-rho^r))
            prod = mpc(1)
            for r in range(1, N - k * s + 1):
                prod = prod * (1 - zt[(hh * r) % k])
            th = pi2 * ((-n * hh) % k) / k
            rho_pow = mpc(gmpy2.cos(th), gmpy2.sin(th))
            contrib = rho_pow * inner / prod
            total += 2 * contrib.real if paired else contrib.real
        sign = 1 if (s - 1) % 2 == 0 else -1
        denom = mpfr(k) ** (2 * s) * mpfr(gmpy2.fac(s))
        return sign * total / denom


def _beta_value(m: int, k: int, v: int, zt: tuple) -> mpc:
    """Apostol beta_m at the k-th root zeta^v (active context)."""
    if v % k == 0:
        b = bernoulli(m)
        return mpc(mpfr(mpq(b.numerator, b.denominator)))
    zeta = zt[v % k]
    # Glaisher/Stirling form (2.16)
    acc = mpc(0)
    inv = 1 / (zeta - 1)
    invp = mpc(1)
    fact = 1
    for j in range(1, m + 1):
        invp = invp * inv
        if j >= 2:
            fact *= j - 1
        acc += stirling2(m, j) * fact * invp
    sign = 1 if (m - 1) % 2 == 0 else -1
    return sign * m * acc


def apostol_beta(m: int, k: int, h: int, ctx: PrecisionContext, method: str = "both") -> BigComplex:
    """Taylor coefficient beta_m of z/(rho e^z - 1) at rho = e^{2 pi i h/k}.

    ``both`` evaluates the Stirling form and the Bernoulli-polynomial root
    sum and checks agreement; at rho = 1 only the root sum applies and
    beta_m(1) = B_m.
    """
    if m < 0 or k < 1:
        raise DomainError("need m >= 0 and k >= 1")
    if method not in ("both", "stirling", "bernoulli"):
        raise UsageError(f"unknown apostol_beta method {method!r}")
    at_one = h % k == 0
    if at_one and method == "stirling":
        raise DomainError("the Stirling form of beta_m is undefined at rho = 1")
    with ctx.active():
        bits = gmpy2.get_context().precision
        zt = _zeta_table(k, bits)
        if m == 0:
            val = mpc(1) if at_one else mpc(0)
            return BigComplex._raw(val)
        # Bernoulli-polynomial root sum (2.17): k^{m-1} sum_j rho^j B_m(j/k)
        bsum = mpc(0)
        for j in range(k):
            b = bernoulli(m, Fraction(j, k))
            bsum += zt[(h * j) % k] * mpfr(mpq(b.numerator, b.denominator))
        bval = mpfr(k) ** (m - 1) * bsum
        if method == "bernoulli":
            return BigComplex._raw(bval)
        if at_one:
            return BigComplex._raw(bval)
        sval = _beta_value(m, k, h % k, zt)
        if method == "stirling":
            return BigComplex._raw(sval)
        if abs(sval - bval) > ctx.eps(8) * (1 + abs(sval)):
            raise SelfCheckError(
                f"beta_{m} Stirling and Bernoulli forms disagree at h/k={h}/{k}"
            )
        return BigComplex._raw(sval)


def _wave_residue_sum(k: int, N: int, n: int, ctx: PrecisionContext) -> mpfr:
    """W_k as minus the sum of Q_{h k (-n)}(N) over reduced h/k."""
    with ctx.active():
        total = mpfr(0)
        for hh, paired in _coprime_pairs(k):
            val = q_residue(hh, k, -n, N, ctx).value._v
            total += 2 * val.real if paired else val.real
        return -total


def _ell_for_k(k: int) -> int:
    if k % 4 == 0:
        return k
    if k % 4 == 2:
        return k // 2
    return 2 * k


def _wave_closed_small_exact(k: int, N: int, n: int) -> Fraction:
    """Closed forms for N - k in {0, 1, 2} (exact rational)."""
    d = N - k
    if d == 0:
        return Fraction(ramanujan_sum(k, n), k * k)
    if d == 1:
        if k < 2:
            raise DomainError("N = k + 1 closed form needs k >= 2")
        acc = Fraction(0)
        for j in range(k):
            acc += bernoulli(1, Fraction(j, k)) * ramanujan_sum(k, j - n)
        return -acc / (k * k)
    if d == 2:
        if k < 3:
            raise DomainError("N = k + 2 closed form needs k >= 3")
        acc = Fraction(0)
        for j in range(k):
            acc += (3 * bernoulli(1, Fraction(j, k)) + k * bernoulli(2, Fraction(j, k))) * ramanujan_sum(k, j - n)
        ell = _ell_for_k(k)
        acc2 = Fraction(0)
        for j in range(ell):
            acc2 += bernoulli(1, Fraction(j, ell)) * ramanujan_sum(ell, j - n)
        sign = 1 if n % 2 == 0 else -1
        return -acc / (4 * k * k) - sign * acc2 / (4 * k * k)
    raise UsageError("closed_small requires N - k in {0, 1, 2}")


def wave_closed_prime(p: int, N: int, n: int) -> Fraction:
    """Prime-k closed forms for N in {p, p+1, p+2} (exact rational)."""
    d = N - p
    nbar = n % p
    if d == 0:
        return Fraction(p - 1 if nbar == 0 else -1, p * p)
    if d == 1:
        pp = (p - 1) // 2
        return Fraction(pp - nbar, p * p)
    if d == 2:
        if p < 3:
            raise DomainError("the p+2 prime form needs p >= 3")
        sign = 1 if nbar % 2 == 0 else -1
        inner = (
            Fraction(-nbar * nbar + nbar * (p - 3))
            + Fraction(sign * p, 2)
            - Fraction(p * p - 9 * p + 11, 6)
        )
        return inner / (4 * p * p)
    raise UsageError("prime closed forms require N - p in {0, 1, 2}")


_GLAISHER_MAX_N = 80


def _wave_glaisher_w1(N: int, n: int) -> Fraction:
    """First wave by the Bernoulli multinomial sum (exact rational).

    Dynamic program over factor index and remaining total degree; only
    exponents with nonzero Bernoulli numbers contribute.
    """
    if N > _GLAISHER_MAX_N:
        raise UsageError(
            f"glaisher_w1 is a cross-check route, limited to N <= {_GLAISHER_MAX_N}"
        )
    budget = N - 1
    allowed = [0, 1] + list(range(2, budget + 1, 2))
    weights = {j: bernoulli(j) / math.factorial(j) for j in allowed}
    # table[r] = sum over assignments to factors i..N with total degree r
    table = [Fraction(0)] * (budget + 1)
    table[0] = Fraction(1)
    for i in range(N, 0, -1):
        new = [Fraction(0)] * (budget + 1)
        ipow = {0: 1}
        for j in allowed:
            ipow[j] = i**j
        for r in range(budget + 1):
            acc = Fraction(0)
            for j in allowed:
                if j > r:
                    break
                w = weights[j]
                if w:
                    acc += w * ipow[j] * table[r - j]
            new[r] = acc
        table = new
    total = Fraction(0)
    npow = Fraction(1)
    fact = 1
    for j0 in range(budget + 1):
        if j0 > 0:
            npow *= -n
            fact *= j0
        total += npow / fact * table[budget - j0]
    sign = 1 if (N - 1) % 2 == 0 else -1
    return sign * total / math.factorial(N)


def wave_exact_w1(N: int, n: int) -> Fraction:
    """Exact rational W_1(N, n).

    The product of the N rational series j z/(e^{jz} - 1) against e^{-nz}
    is formed through its logarithm (a closed Bernoulli sum), one exact
    series exponential recurrence recovers the degree-(N-1) coefficient.
    """
    if N < 1:
        raise DomainError("N must be positive")
    # log of the product: -(n + N(N+1)/4) z - sum_m B_2m S_2m(N) z^2m/(2m (2m)!)
    g = [mpq(0)] * N
    if N > 1:
        g[1] = -mpq(n) - mpq(N * (N + 1), 4)
    ps_all = _power_sums_class(1, 0, N, max(N - 1, 1))
    fact2m = mpz(2)
    for m in range(1, (N - 1) // 2 + 1):
        b = bernoulli(2 * m)
        g[2 * m] = -mpq(b.numerator, b.denominator) * ps_all[2 * m] / (2 * m * fact2m)
        fact2m = fact2m * (2 * m + 1) * (2 * m + 2)
    # exact exp via h' = g' h
    h = [mpq(1)]
    gp = [(i + 1) * g[i + 1] for i in range(N - 1)]
    for m in range(N - 1):
        acc = mpq(0)
        for i in range(m + 1):
            if gp[i]:
                acc += gp[i] * h[m - i]
        h.append(acc / (m + 1))
    val = h[N - 1]
    sign = 1 if (N - 1) % 2 == 0 else -1
    val = sign * val / gmpy2.fac(N)
    return Fraction(val.numerator, val.denominator)


def wave(k: int, N: int, n: int, ctx: PrecisionContext, route: str = "auto") -> mpfr:
    """The k-th Sylvester wave W_k(N, n) as a multiprecision real.

    Routes: ``residue_sum`` (minus the Farey residues at h/k),
    ``series_at_roots`` (z^{N-1} coefficient extraction), ``theorem24``
    (power-sum/Apostol formula), ``closed_small`` (N - k <= 2),
    ``glaisher_w1`` (k = 1 Bernoulli multinomial), or ``auto``.
    """
    if route not in WAVE_ROUTES:
        raise UsageError(f"unknown wave route {route!r}")
    if not 1 <= k <= N:
        raise DomainError("need 1 <= k <= N")
    if route == "auto":
        route = "theorem24" if 3 * k > N else "series_at_roots"
    if route == "closed_small":
        if N - k not in (0, 1, 2):
            raise UsageError("closed_small requires N - k in {0, 1, 2}")
        v = _wave_closed_small_exact(k, N, n)
        with ctx.active():
            return mpfr(mpq(v.numerator, v.denominator))
    if route == "glaisher_w1":
        if k != 1:
            raise UsageError("glaisher_w1 requires k = 1")
        v = _wave_glaisher_w1(N, n)
        with ctx.active():
            return mpfr(mpq(v.numerator, v.denominator))
    s = N // k
    eff = wave_digits_policy(N, ctx) if s > 2 else ctx
    if route == "series_at_roots":
        val = _wave_series_at_roots(k, N, n, eff)
    elif route == "theorem24":
        val = _wave_theorem24(k, N, n, eff)
    else:
        val = _wave_residue_sum(k, N, n, eff)
    with ctx.active():
        return +val


def wave_verified(k: int, N: int, n: int, ctx: PrecisionContext, route: str = "auto") -> mpfr:
    """wave() plus a doubled-precision rerun; raises on a mismatch."""
    v1 = wave(k, N, n, ctx, route)
    v2 = wave(k, N, n, ctx.scaled(2.0), route)
    with ctx.active():
        if abs(v1 - mpfr(v2)) > ctx.eps(10) * (1 + abs(v1)):
            raise PrecisionError(
                f"W_{k}({N},{n}) unstable under precision doubling"
            )
        return v1


# -- wave polynomials --------------------------------------------------------


@dataclass(frozen=True)
class WavePolySet:
    """The k polynomials w_{k,m}(N, x), exact rational coefficients.

    ``polys[m][i]`` is the coefficient of x^i in the polynomial selecting
    the residue class n = m (mod k).
    """

    k: int
    N: int
    polys: tuple
    degree_bound: int

    def __post_init__(self) -> None:
        if len(self.polys) != self.k:
            raise DomainError("need one polynomial per residue class")
        for p in self.polys:
            if len(p) > self.degree_bound + 1:
                raise DomainError("polynomial degree exceeds floor(N/k) - 1")

    def value(self, n: int) -> Fraction:
        coeffs = self.polys[n % self.k]
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * n + c
        return acc

    def common_denominator(self) -> int:
        den = 1
        for p in self.polys:
            for c in p:
                den = den * c.denominator // math.gcd(den, c.denominator)
        return den


def _interpolate(xs: list, ys: list):
    """Newton interpolation returning standard-basis coefficients."""
    npts = len(xs)
    table = list(ys)
    for j in range(1, npts):
        for i in range(npts - 1, j - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (xs[i] - xs[i - j])
    coeffs = [table[npts - 1]]
    for i in range(npts - 2, -1, -1):
        # multiply by (x - xs[i]) and add table[i]
        coeffs = [table[i] - xs[i] * coeffs[0]] + [
            coeffs[j] - xs[i] * coeffs[j + 1] for j in range(len(coeffs) - 1)
        ] + [coeffs[-1]]
    return coeffs


def wave_poly(k: int, N: int, ctx: PrecisionContext) -> WavePolySet:
    """Recover the exact rational polynomials behind W_k(N, n).

    Interpolates floor(N/k) wave values per residue class at the smallest
    nodes, rationalizes each coefficient by continued fractions, and
    re-verifies the result at three extra nodes.
    """
    if not 1 <= k <= N:
        raise DomainError("need 1 <= k <= N")
    s = N // k
    # coefficient denominators grow like N log N digits; the continued
    # fraction step needs roughly twice that many to lock onto them
    denom_guess = int(math.ceil(2.4 * N * math.log10(max(N, 2)))) + 20
    eff = wave_digits_policy(N, ctx.with_digits(max(ctx.decimal_digits, denom_guess)))
    polys = []
    with eff.active():
        tol = mpfr(10) ** (-(eff.decimal_digits // 2))
        for m in range(k):
            xs = [mpfr(m + j * k) for j in range(s)]
            ys = [wave(k, N, m + j * k, eff) for j in range(s)]
            coeffs = _interpolate(xs, ys) if s > 1 else [ys[0]]
            rat = []
            for c in coeffs:
                if abs(c) < tol:
                    rat.append(Fraction(0))
                else:
                    q = gmpy2.f2q(c, tol)
                    rat.append(Fraction(int(q.numerator), int(q.denominator)))
            poly = tuple(rat)
            for j in range(s, s + 3):
                nchk = m + j * k
                exact = Fraction(0)
                for c in reversed(poly):
                    exact = exact * nchk + c
                ref = wave(k, N, nchk, eff)
                err = abs(mpfr(mpq(exact.numerator, exact.denominator)) - ref)
                if err > mpfr(10) ** (-(eff.decimal_digits // 2)):
                    raise PrecisionError(
                        f"rationalized w_{k},{m}({N}, x) failed re-verification; "
                        f"retry with decimal_digits >= {2 * eff.decimal_digits}"
                    )
            polys.append(poly)
    return WavePolySet(k, N, tuple(polys), s - 1)


# -- general denumerants -----------------------------------------------------


@dataclass(frozen=True)
class Denumerant:
    """A fixed multiset of positive integer parts."""

    parts: tuple

    def __post_init__(self) -> None:
        if not self.parts or any(a < 1 for a in self.parts):
            raise DomainError("parts must be a nonempty multiset of positive integers")
        object.__setattr__(self, "parts", tuple(sorted(self.parts)))


def denumerant_count(A: Denumerant, n: int) -> int:
    """Brute-force count of solutions to sum a_i x_i = n, x_i >= 0."""
    if n < 0:
        return 0
    ways = [0] * (n + 1)
    ways[0] = 1
    for a in A.parts:
        for v in range(a, n + 1):
            ways[v] += ways[v - a]
    return ways[n]


def wave_denumerant(k: int, A: Denumerant, n: int, ctx: PrecisionContext) -> mpfr:
    """W_k(A, n): the k-th wave of a general denumerant."""
    mult = sum(1 for a in A.parts if a % k == 0)
    if mult == 0:
        raise DomainError(f"k = {k} divides no element of the part multiset")
    s = mult
    order = s + 2
    with ctx.active():
        bits = gmpy2.get_context().precision
        zt = _zeta_table(k, bits)
        pi2 = 2 * gmpy2.const_pi()
        total = mpfr(0)
        elog = _e_log_coeffs(order)
        for hh, paired in _coprime_pairs(k):
            # denominator factors of Q-like product with parts a_i, at rho^{-1}
            g = [mpc(0) for _ in range(order)]
            const = mpc(1)
            lead = mpfr(1)
            for a in A.parts:
                if a % k == 0:
                    lead = lead * a
                    for m in range(1, order):
                        # log E(-a z) contributes elog[m-1] * (-a)^m
                        g[m] += elog[m - 1] * mpfr(-a) ** m
                else:
                    v = (-hh * a) % k
                    cl = _root_log_coeffs(zt[v], order - 1)
                    const = const * (1 - zt[v])
                    for m in range(1, order):
                        g[m] += cl[m - 1] * mpfr(-a) ** m
            # numerator rho^n e^{nz}
            num = [mpc(0) for _ in range(order)]
            num[0] = mpc(1)
            scale = mpfr(1)
            fact = mpfr(1)
            for m in range(1, order):
                scale = scale * n
                fact = fact * m
                num[m] = mpc(scale / fact)
            series = s_mul(num, s_recip(s_exp(g, order), order), order)
            th = pi2 * ((n * hh) % k) / k
            rho_pow = mpc(gmpy2.cos(th), gmpy2.sin(th))
            contrib = rho_pow * series[s - 1] / (lead * const)
            total += 2 * contrib.real if paired else contrib.real
        return total
