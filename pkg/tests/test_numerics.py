"""Scalar and truncated-series contracts."""

import random

import gmpy2
import pytest
from gmpy2 import mpfr

from sylwave.errors import ParseError, SingularSeriesError, UsageError
from sylwave.numerics import (
    BigComplex,
    PrecisionContext,
    TruncatedSeries,
    scalar_format,
    scalar_parse,
    series_elementary,
    series_eval,
)

CTX = PrecisionContext(60)


def as_complex(x):
    return complex(x)


def test_context_invariants():
    assert CTX.decimal_digits == 60
    assert CTX.guard_digits == 16
    with pytest.raises(UsageError):
        PrecisionContext(10)
    with pytest.raises(UsageError):
        PrecisionContext(40, -3)


def test_parse_zero_and_complex_literal():
    z = scalar_parse("0", CTX)
    assert gmpy2.is_zero(z.re) and gmpy2.is_zero(z.im)
    w0 = scalar_parse("0.916198-0.182459i", CTX)
    assert abs(complex(w0) - (0.916198 - 0.182459j)) < 1e-15


def test_parse_small_exponent_doubled_precision():
    a = scalar_parse("1e-50", PrecisionContext(60))
    b = scalar_parse("1e-50", PrecisionContext(120))
    rel = abs((a - b) / b)
    assert rel < mpfr("1e-60")


def test_parse_roundtrip_lossless():
    vals = ["3.25", "-0.125e-7", "2i", "-1.5+2.25i", "0.916198-0.182459i"]
    for text in vals:
        v = scalar_parse(text, CTX)
        again = scalar_parse(scalar_format(v, CTX.decimal_digits), CTX)
        assert complex(again) == complex(v)


def test_parse_errors():
    for bad in ("", "1..2", "abc", "1+2", "i5", "2ii"):
        with pytest.raises(ParseError):
            scalar_parse(bad, CTX)


def test_bigcomplex_arithmetic_and_finiteness():
    a = BigComplex(2, CTX)
    b = scalar_parse("1+1i", CTX)
    assert complex(a * b) == 2 + 2j
    assert complex(a - b) == 1 - 1j
    assert complex(b.conjugate()) == 1 - 1j
    assert float(abs(b)) == pytest.approx(2**0.5)
    with pytest.raises(UsageError):
        BigComplex(float("inf"), CTX)


def test_series_exp_of_zero():
    s = TruncatedSeries([0, 0, 0, 0], ctx=CTX).exp()
    assert [complex(c) for c in s.coeffs] == [1, 0, 0, 0]


def test_series_recip_geometric():
    s = TruncatedSeries([1, 1], ctx=CTX).recip()
    assert [complex(c) for c in s.coeffs] == [1, -1]


def test_series_log_exp_roundtrip():
    rng = random.Random(7)
    coeffs = [0] + [rng.uniform(-1, 1) for _ in range(7)]
    f = TruncatedSeries(coeffs, ctx=CTX)
    back = f.exp().log()
    err = max(abs(complex(x) - complex(y)) for x, y in zip(back.coeffs, f.coeffs))
    assert err < 10 ** (-CTX.decimal_digits + 5)


def test_series_eval_examples():
    s = TruncatedSeries([1, 2, 3], center=5, ctx=CTX)
    assert complex(series_eval(s, 5)) == 1
    lin = TruncatedSeries([0, 1], center=2, ctx=CTX)
    assert complex(series_eval(lin, 7)) == 5


def test_series_eval_vs_doubled_precision_horner():
    rng = random.Random(11)
    coeffs = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(9)]
    z = complex(0.37, -0.21)
    lo = TruncatedSeries(coeffs, ctx=CTX)
    hi = TruncatedSeries(coeffs, ctx=PrecisionContext(120))
    v_lo = series_eval(lo, z)
    v_hi = series_eval(hi, z)
    assert abs(complex(v_lo) - complex(v_hi)) < 1e-55 * 10  # well under 60-digit ulp scale


def test_series_mul_associative():
    rng = random.Random(3)
    mk = lambda: TruncatedSeries([rng.uniform(-1, 1) for _ in range(6)], ctx=CTX)
    a, b, c = mk(), mk(), mk()
    left = a.mul(b).mul(c)
    right = a.mul(b.mul(c))
    err = max(abs(complex(x) - complex(y)) for x, y in zip(left.coeffs, right.coeffs))
    assert err < 1e-58


def test_series_recip_involution_and_sqrt_square():
    rng = random.Random(5)
    f = TruncatedSeries([1.5] + [rng.uniform(-1, 1) for _ in range(7)], ctx=CTX)
    back = f.recip().recip()
    err = max(abs(complex(x) - complex(y)) for x, y in zip(back.coeffs, f.coeffs))
    assert err < 1e-55
    sq = f.sqrt()
    prod = sq.mul(sq)
    err2 = max(abs(complex(x) - complex(y)) for x, y in zip(prod.coeffs, f.coeffs))
    assert err2 < 1e-55


def test_precision_doubling_contract():
    rng = random.Random(13)
    coeffs = [0.5] + [rng.uniform(-0.5, 0.5) for _ in range(9)]
    lo = TruncatedSeries(coeffs, ctx=PrecisionContext(40)).exp().log().sqrt()
    hi = TruncatedSeries(coeffs, ctx=PrecisionContext(80)).exp().log().sqrt()
    for x, y in zip(lo.coeffs, hi.coeffs):
        assert abs(complex(x) - complex(y)) < 1e-38


def test_series_errors():
    with pytest.raises(SingularSeriesError):
        TruncatedSeries([0, 1], ctx=CTX).recip()
    with pytest.raises(SingularSeriesError):
        TruncatedSeries([0, 1], ctx=CTX).log()
    with pytest.raises(SingularSeriesError):
        TruncatedSeries([0, 1], ctx=CTX).sqrt()
    a = TruncatedSeries([1, 1], center=0, ctx=CTX)
    b = TruncatedSeries([1, 1], center=1, ctx=CTX)
    with pytest.raises(UsageError):
        a.mul(b)
    with pytest.raises(UsageError):
        series_elementary("mul", a)
    with pytest.raises(UsageError):
        series_elementary("exp", a, b)
    with pytest.raises(UsageError):
        series_elementary("frobnicate", a)


def test_series_elementary_dispatch():
    a = TruncatedSeries([1, 1, 0.5], ctx=CTX)
    assert [complex(c) for c in series_elementary("derivative", a).coeffs] == [1, 1]
    anti = series_elementary("antiderivative", a)
    assert complex(anti.coeffs[0]) == 0
    prod = series_elementary("mul", a, a)
    assert abs(complex(prod.coeffs[2]) - 2.0) < 1e-50


def test_binary_ops_use_min_order():
    a = TruncatedSeries([1, 2, 3, 4], ctx=CTX)
    b = TruncatedSeries([1, 1], ctx=CTX)
    assert a.mul(b).order == 2
