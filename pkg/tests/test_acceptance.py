"""Acceptance gate: one test (and one printed pass/fail line) per criterion.

Run with ``pytest tests/test_acceptance.py -v -s``; the two large-N wave
columns (criteria 11 and 16) additionally need ``--runslow``.
"""

import math
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from sylwave import asymptotics as asy
from sylwave import combinatorics as cb
from sylwave import dilog
from sylwave import waves as wv
from sylwave import wavesums as ws
from sylwave.numerics import PrecisionContext, scalar_format


def report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:02d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def sig_match(got, want, figs: int) -> bool:
    g, w = float(got), float(want)
    return abs(g - w) <= abs(w) * 10 ** (1 - figs) * 0.51


def family_columns(family, lam, N, ms, ctx, sign=1):
    ec = asy.expansion_coeffs(family, lam, max(ms), ctx)
    out = []
    for m in ms:
        sub = asy.ExpansionCoeffs(ec.family, ec.lam, ec.coeffs[:m], ec.base_zero, ec.scale)
        out.append(sign * asy.expansion_eval(sub, N, ctx))
    return out


def test_criterion_01_sylvester_identity_exact():
    ctx = PrecisionContext(50)
    worst = 0.0
    for N in range(1, 26):
        for n in range(0, 51):
            with ctx.active():
                total = mpfr(0)
                for k in range(1, N + 1):
                    total += wv.wave(k, N, n, ctx)
                err = float(abs(total - cb.p_restricted(N, n)))
            worst = max(worst, err)
    report(1, worst < 1e-15, f"max |sum W_k - p_N(n)| = {worst:.2e} over N<=25, n<=50")


def test_criterion_02_three_regime_closure():
    ctx = PrecisionContext(50)
    worst = 0.0
    for N in range(1, 13):
        farey = cb.farey_enumerate(N)
        for n in range(-N * (N + 1) // 2 - 20, 21):
            with ctx.active():
                total = mpfr(0)
                for f in farey:
                    total += wv.q_residue(f.h, f.k, -n, N, ctx).value._v.real
                err = float(abs(-total - cb.p_restricted(N, n)))
            worst = max(worst, err)
    report(2, worst < 1e-15, f"max closure residual = {worst:.2e} over N<=12")


def test_criterion_03_wave_polynomials_exact():
    ctx = PrecisionContext(50)
    ok = True
    w15 = wv.wave_poly(1, 5, ctx).polys[0]
    ok &= w15 == tuple(Fraction(c, 86400) for c in (50651, 38250, 9300, 900, 30))
    w25 = wv.wave_poly(2, 5, ctx).polys
    ok &= w25 == ((Fraction(15, 128), Fraction(1, 64)), (Fraction(-15, 128), Fraction(-1, 64)))
    ok &= [p[0] for p in wv.wave_poly(3, 5, ctx).polys] == [Fraction(2, 27), Fraction(-1, 27), Fraction(-1, 27)]
    ok &= [p[0] for p in wv.wave_poly(4, 5, ctx).polys] == [Fraction(1, 16), Fraction(1, 16), Fraction(-1, 16), Fraction(-1, 16)]
    ok &= [p[0] for p in wv.wave_poly(5, 5, ctx).polys] == [Fraction(4, 25)] + [Fraction(-1, 25)] * 4
    w16 = wv.wave_poly(1, 6, ctx).polys[0]
    ok &= w16 == tuple(Fraction(c, 1036800) for c in (598731, 439810, 110250, 12320, 630, 12))
    w210 = wv.wave_poly(2, 10, ctx).polys
    want = tuple(Fraction(c, 88473600) for c in (9406331, 1905750, 125400, 3300, 30))
    ok &= w210[0] == want and w210[1] == tuple(-c for c in want)
    w310 = wv.wave_poly(3, 10, ctx).polys
    ok &= w310[0] == tuple(Fraction(c, 52488) for c in (4317, 344, 6))
    ok &= w310[1] == (Fraction(-770, 52488), Fraction(-28, 52488), Fraction(0))
    ok &= w310[2] == tuple(Fraction(c, 52488) for c in (-3547, -316, -6))
    report(3, bool(ok), "N=5 polynomial set, W_1(6,n), W_2(10,n), W_3(10,n) exact after rationalization")


def test_criterion_04_wave_8_8_decimals():
    ctx = PrecisionContext(50)
    vals = {k: float(wv.wave(k, 8, 8, ctx)) for k in (1, 2, 3, 8)}
    ok = (
        abs(vals[1] - 21.4127) < 5e-5
        and abs(vals[2] - 0.4112) < 5e-5
        and abs(vals[3] - (-0.0566)) < 5e-5
        and abs(vals[8] - 0.0625) < 5e-5
    )
    report(4, ok, f"W_k(8,8) = {vals[1]:.4f}, {vals[2]:.4f}, {vals[3]:.4f}, ..., {vals[8]:.4f}")


def test_criterion_05_first_wave_sizes_1000():
    ctx = PrecisionContext(50)
    want = {1: 2.41e31, 2: 4.09e13, 3: -3.03e7, 4: 8.14e4}
    got = {k: wv.wave(k, 1000, 1000, ctx) for k in want}
    ok = all(sig_match(got[k], want[k], 3) for k in want)
    report(5, ok, "W_k(1000,1000) = " + ", ".join(scalar_format(got[k], 3) for k in want))


def test_criterion_06_dilog_zeros():
    ctx = PrecisionContext(40)
    printed = {
        (0, -1): 0.9161978162 - 0.1824588972j,
        (0, -2): 0.9684820460 - 0.1095311065j,
        (1, -3): -0.4594734813 - 0.8485350380j,
    }
    ok = True
    worst_res = 0.0
    for (A, B), want in printed.items():
        z = dilog.dilog_zero(A, B, ctx)
        ok &= abs(complex(z.w) - want) < 1e-10
        with ctx.active():
            f, _ = dilog._zero_equation(+z.w._v, A, B, ctx.eps(-4))
            worst_res = max(worst_res, float(abs(f)))
    ok &= worst_res < 1e-30
    report(6, bool(ok), f"three zeros at 10 decimals; max residual {worst_res:.1e}")


def test_criterion_07_headline_constants():
    ctx = PrecisionContext(40)
    wc = dilog.wave_constants(1, ctx)
    with ctx.active():
        two_pi_over_v = 2 * gmpy2.const_pi() / wc.V
        uc = -gmpy2.log(abs(dilog.dilog_zero(0, -2, ctx).w._v))
        ucs = -gmpy2.log(abs(dilog.dilog_zero(1, -3, ctx).w._v))
    checks = [
        (wc.U, 0.0680762),
        (wc.V, 0.196576),
        (wc.psi_lambda, 26.8713),
        (wc.tau_lambda, -3.06816),
        (two_pi_over_v, 31.96311, 7),
        (uc, 0.0256706),
        (ucs, 0.0356795),
    ]
    ok = all(sig_match(c[0], c[1], c[2] if len(c) > 2 else 6) for c in checks)
    report(7, ok, "U, V, psi_1, tau_1, 2pi/V, U_C, U*_C at printed precision")


def test_criterion_08_coefficient_self_check():
    ctx = PrecisionContext(50)
    worst = 0.0
    for lam in (Fraction(1, 3), Fraction(1), Fraction(2)):
        ec = asy.expansion_coeffs("a", lam, 2, ctx)
        z0 = dilog.saddle_point(1, 0, ctx).z_star
        with ctx.active():
            pi = gmpy2.const_pi()
            i = gmpy2.mpc(0, 1)
            lq = gmpy2.mpq(lam.numerator, lam.denominator)
            a0 = 2 * (+z0._v) * gmpy2.exp(-pi * i * (+z0._v) * (1 + 2 * lq))
            a1 = asy.a1_closed_form(lam, ctx)._v
            worst = max(
                worst,
                float(abs(ec.coeffs[0]._v - a0) / abs(a0)),
                float(abs(ec.coeffs[1]._v - a1) / abs(a1)),
            )
    report(8, worst < 1e-20, f"a_0, a_1 vs closed forms: worst rel diff {worst:.1e}")


TABLE_A1_DIRECT = {Fraction(1, 3): -1.60784e30, Fraction(1): 1.72507e30, Fraction(2): -1.94291e31}
TABLE_A1_COLS = {
    Fraction(1, 3): (-1.60733e30, -1.60827e30, -1.60783e30, -1.60784e30),
    Fraction(1): (1.89943e30, 1.71839e30, 1.72504e30, 1.72506e30),
    Fraction(2): (-1.99478e31, -1.95514e31, -1.94125e31, -1.94292e31),
}


def test_criterion_09_a1_table():
    ctx = PrecisionContext(80)
    ok = True
    for lam, want_cols in TABLE_A1_COLS.items():
        cols = family_columns("a", lam, 1200, (1, 2, 3, 5), ctx)
        ok &= all(sig_match(g, w, 6) for g, w in zip(cols, want_cols))
        direct = ws.sum_A1(1200, -int(lam * 1200), ctx)
        ok &= sig_match(direct.value, TABLE_A1_DIRECT[lam], 6)
    report(9, bool(ok), "direct A-class sums and m=1,2,3,5 expansion columns at N=1200")


TABLE_C2 = {
    Fraction(1, 3): ((3.82015e7, 3.94694e7, 3.92935e7, 3.93016e7), 3.93016e7),
    Fraction(1): ((-7.55408e7, -9.44498e7, -8.92043e7, -8.98686e7), -8.98650e7),
    Fraction(2): ((-4.19152e9, -3.06226e9, -3.20956e9, -3.20879e9), -3.21242e9),
}
TABLE_C2S = {
    Fraction(1, 3): ((-3.41978e11, -3.38619e11, -3.38622e11, -3.38622e11), -3.38622e11),
    Fraction(1): ((-5.45974e11, -5.36354e11, -5.36405e11, -5.36404e11), -5.36404e11),
    Fraction(2): ((-5.14590e11, -5.00599e11, -5.00740e11, -5.00737e11), -5.00737e11),
}
TABLE_D = {
    (1200, Fraction(1, 3)): ((-1.54767e12, -1.53845e12, -1.53755e12, -1.53757e12), -1.53757e12),
    (1200, Fraction(1)): ((2.19568e12, 2.20664e12, 2.20164e12, 2.20181e12), 2.20181e12),
    (1200, Fraction(2)): ((-5.91241e12, -5.62009e12, -5.60529e12, -5.60869e12), -5.60866e12),
    (1203, Fraction(1, 3)): ((-2.17797e12, -2.18005e12, -2.17903e12, -2.17904e12), -2.17904e12),
    (1203, Fraction(1)): ((1.68218e12, 1.74105e12, 1.73537e12, 1.73545e12), 1.73545e12),
    (1203, Fraction(2)): ((-7.82854e12, -7.68896e12, -7.65629e12, -7.66011e12), -7.66007e12),
}
TABLE_E = {
    Fraction(1, 3): ((1.14604e8, 1.18408e8, 1.17881e8, 1.17905e8), 1.17905e8),
    Fraction(1): ((-2.26622e8, -2.83349e8, -2.67613e8, -2.69606e8), -2.69595e8),
    Fraction(2): ((-1.25746e10, -9.18677e9, -9.62868e9, -9.62637e9), -9.63726e9),
}


def test_criterion_10_class_sum_tables():
    ctx = PrecisionContext(80)
    ms = (1, 2, 3, 5)
    ok = True
    for lam, (cols, direct) in TABLE_C2.items():
        got = family_columns("c", lam, 1200, ms, ctx)
        ok &= all(sig_match(g, w, 6) for g, w in zip(got, cols))
        c2, c2s, _ = ws.sum_C(1200, -int(lam * 1200), ctx)
        ok &= sig_match(c2.value, direct, 6)
        ok &= sig_match(c2s.value, TABLE_C2S[lam][1], 6)
        got_s = family_columns("c_star", lam, 1200, ms, ctx)
        ok &= all(sig_match(g, w, 6) for g, w in zip(got_s, TABLE_C2S[lam][0]))
    for (N, lam), (cols, direct) in TABLE_D.items():
        fam = "d_odd" if N % 2 else "d_even"
        got = family_columns(fam, lam, N, ms, ctx)
        ok &= all(sig_match(g, w, 6) for g, w in zip(got, cols))
        d = ws.sum_D1(N, -int(lam * N), ctx)
        ok &= sig_match(d.value, direct, 6)
    for lam, (cols, direct) in TABLE_E.items():
        got = family_columns("e", lam, 1200, ms, ctx)
        ok &= all(sig_match(g, w, 6) for g, w in zip(got, cols))
        e = ws.sum_E1(1200, -int(lam * 1200), ctx)
        ok &= sig_match(e.value, direct, 6)
    report(10, bool(ok), "C2, C2*, D1 (N=1200, 1203), E1: direct sums and expansion columns")


TABLE_THM12 = {
    Fraction(1, 3): (-8.35526e90, -8.22612e90, -8.22662e90, -8.22663e90),
    Fraction(1): (-9.05354e91, -8.97235e91, -8.97192e91, -8.97194e91),
    Fraction(2): (-2.02861e92, -1.88676e92, -1.89108e92, -1.89104e92),
}


def test_criterion_11_thm12_table_coefficients():
    ctx = PrecisionContext(60)
    ok = True
    for lam, cols in TABLE_THM12.items():
        got = family_columns("a", lam, 3300, (1, 2, 3, 5), ctx)
        ok &= all(sig_match(g, w, 6) for g, w in zip(got, cols))
    report(11, bool(ok), "asymptotic columns at N=3300 for lambda in {1/3, 1, 2}")


@pytest.mark.slow
def test_criterion_11_slow_w1_3300_column():
    ctx = PrecisionContext(60)
    want = {Fraction(1, 3): -8.22663e90, Fraction(1): -8.97194e91, Fraction(2): -1.89104e92}
    ok = True
    vals = {}
    for lam, w in want.items():
        v = wv.wave(1, 3300, int(lam * 3300), ctx)
        vals[lam] = v
        ok &= sig_match(v, w, 6)
    report(11, bool(ok), "[slow] W_1(3300, 3300 lambda) column: " + ", ".join(scalar_format(v, 6) for v in vals.values()))


FIGURE2 = {275: -4.17495e-10, 300: 1.70288e-10, 432: 0.000220e-10, 500: -0.208549e-10, 600: -0.836948e-10}


def test_criterion_12_figure2_data():
    ok = True
    got = {}
    for n, want in FIGURE2.items():
        w1 = wv.wave_exact_w1(n, n)
        val = 1 - Fraction(w1) / cb.partition_p(n)
        got[n] = float(val)
        ok &= sig_match(got[n], want, 3)
    report(12, bool(ok), "1 - W_1(n,n)/p(n) at n in {275, 300, 432, 500, 600}")


def test_criterion_13_n432_anchor():
    w1 = wv.wave_exact_w1(432, 432)
    with PrecisionContext(40).active():
        approx = mpfr(gmpy2.mpq(w1.numerator, w1.denominator))
        text = scalar_format(approx, 22)
    ok = text.startswith("46647863284228241960.9") or text.startswith("46647863284228241960.8")
    leading = int(w1 * 10) == 466478632842282419608
    p_exact = cb.partition_p(432) == 46647863284229267991
    report(13, ok and leading and p_exact, f"W_1(432,432) = {text}, p(432) exact")


def test_criterion_14_pn2n_column():
    want = {2700: 1.94e77, 2800: 5.93e78, 2900: 1.71e80, 3000: 4.67e81, 3100: 1.21e83, 3200: 2.96e84, 3300: 6.92e85}
    ok = all(sig_match(cb.p_restricted_2n(N), w, 3) for N, w in want.items())
    report(14, ok, "p_N(2N) column for N = 2700..3300 via the prefix-sum identity")


def test_criterion_15_waves_approximate_partitions():
    ctx = PrecisionContext(80)
    N = 200
    n = N * N
    p = cb.p_restricted(N, n)
    fw = ws.first_waves(N, n, 100, ctx)
    with ctx.active():
        rel = float(abs(mpfr(p) / fw - 1))
    report(15, rel < 1e-6, f"|p_200(40000)/first_waves - 1| = {rel:.2e}")


W2_CONJ_TABLE = {
    Fraction(1, 3): (6.13580e37, 6.18769e37, 6.18681e37, 6.18680e37),
    Fraction(1): (2.20860e36, -2.19459e35, -1.79624e35, -1.79070e35),
    Fraction(5, 3): (-1.84871e38, -1.77143e38, -1.77234e38, -1.77239e38),
}


def test_criterion_16_conjecture_experiments():
    # non-blocking numerical experiments, reported with the main suite
    ctx = PrecisionContext(60)
    ok = True
    N = 3000
    sign = -1  # (-1)^(N+1) for even N
    for lam, cols in W2_CONJ_TABLE.items():
        got = family_columns("d_even", lam, N, (1, 2, 3, 5), ctx, sign=sign)
        ok &= all(sig_match(g, w, 6) for g, w in zip(got, cols))
    worst = 0.0
    for lam in (Fraction(1, 3), Fraction(1), Fraction(2)):
        ec = asy.expansion_coeffs("c", lam, 5, ctx)
        ee = asy.expansion_coeffs("e", lam, 5, ctx)
        with ctx.active():
            for t in range(5):
                worst = max(
                    worst,
                    float(abs(ee.coeffs[t]._v - 3 * ec.coeffs[t]._v) / (1 + abs(ec.coeffs[t]._v))),
                )
    ok &= worst < 1e-20
    report(16, bool(ok), f"[non-blocking] W_2 expansion table at N=3000; e_t = 3 c_t to {worst:.1e}")


@pytest.mark.slow
def test_criterion_16_slow_w2_3000_column():
    ctx = PrecisionContext(60)
    want = {Fraction(1, 3): 6.18680e37, Fraction(1): -1.79070e35, Fraction(5, 3): -1.77190e38}
    ok = True
    for lam, w in want.items():
        v = wv.wave(2, 3000, int(lam * 3000), ctx)
        ok &= sig_match(v, w, 6)
    report(16, bool(ok), "[non-blocking, slow] W_2(3000, 3000 lambda) column")
