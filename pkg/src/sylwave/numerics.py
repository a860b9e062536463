"""Arbitrary-precision scalars and truncated power series.

Everything in this package is built on the two types defined here:

* :class:`BigComplex` -- an immutable complex scalar backed by ``gmpy2.mpc``
  (MPFR/MPC under the hood).  Real quantities are exposed as ``gmpy2.mpfr``.
* :class:`TruncatedSeries` -- a degree-bounded power series with complex
  coefficients, supporting the elementary operations (mul, recip, exp, log,
  sqrt, derivative, antiderivative) needed for residue extraction and saddle
  expansions.

Precision is explicit: every operation threads a :class:`PrecisionContext`,
or inherits the precision stored in its operands.  There is no global
mutable precision; the thread-local gmpy2 context is set on entry to each
operation and restored on exit.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr, mpq, mpz

from .errors import (
    BranchError,
    ParseError,
    SingularSeriesError,
    UsageError,
)

__all__ = [
    "PrecisionContext",
    "BigComplex",
    "TruncatedSeries",
    "scalar_parse",
    "scalar_format",
    "series_elementary",
    "series_eval",
]

_LOG2_10 = math.log2(10)

# Template contexts per bit size; .copy() hands out a fresh object each
# activation because a single gmpy2 context cannot be entered re-entrantly.
_CTX_CACHE: dict[int, "gmpy2.context"] = {}
_CTX_LOCK = threading.Lock()


def _gmpy_ctx(bits: int):
    try:
        tpl = _CTX_CACHE[bits]
    except KeyError:
        with _CTX_LOCK:
            tpl = _CTX_CACHE.setdefault(
                bits,
                gmpy2.context(
                    precision=bits,
                    trap_overflow=True,
                    trap_divzero=True,
                    trap_invalid=True,
                ),
            )
    return tpl.copy()


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision for a computation.

    ``decimal_digits`` is the precision promised to the caller;
    ``guard_digits`` are carried internally on top of it to absorb rounding
    in long sums and products.  The default guard follows the package-wide
    policy ``10 + ceil(0.1 * decimal_digits)``.
    """

    decimal_digits: int
    guard_digits: int = -1  # -1 means "use the default policy"

    def __post_init__(self) -> None:
        if self.decimal_digits < 30:
            raise UsageError("decimal_digits must be at least 30")
        if self.guard_digits == -1:
            object.__setattr__(
                self, "guard_digits", 10 + math.ceil(0.1 * self.decimal_digits)
            )
        if self.guard_digits < 0:
            raise UsageError("guard_digits must be non-negative")

    @property
    def total_digits(self) -> int:
        return self.decimal_digits + self.guard_digits

    @property
    def bits(self) -> int:
        return int(math.ceil(self.total_digits * _LOG2_10)) + 4

    def active(self):
        """Context manager installing this precision on the current thread."""
        return _gmpy_ctx(self.bits)

    def scaled(self, factor: float = 2.0) -> "PrecisionContext":
        """A context with ``decimal_digits`` scaled up (used by rerun checks)."""
        return PrecisionContext(int(math.ceil(self.decimal_digits * factor)))

    def with_digits(self, decimal_digits: int) -> "PrecisionContext":
        return PrecisionContext(max(decimal_digits, 30))

    # -- small conveniences used across the package ------------------------

    def eps(self, slack: int = 0) -> mpfr:
        """10**(-(decimal_digits - slack)) as an mpfr."""
        with self.active():
            return mpfr(10) ** (-(self.decimal_digits - slack))

    def pi(self) -> mpfr:
        with self.active():
            return gmpy2.const_pi()

    def real(self, x) -> mpfr:
        with self.active():
            return _to_mpfr(x)

    def complex(self, re, im=0) -> "BigComplex":
        with self.active():
            return BigComplex(mpc(_to_mpfr(re), _to_mpfr(im)))


def _to_mpfr(x) -> mpfr:
    if isinstance(x, mpfr):
        return +x  # round into the active context
    if isinstance(x, (int, mpz)):
        return mpfr(x)
    if isinstance(x, Fraction):
        return mpfr(mpq(x.numerator, x.denominator))
    if isinstance(x, (mpq, float)):
        return mpfr(x)
    if isinstance(x, BigComplex):
        if not gmpy2.is_zero(x.im):
            raise UsageError("complex value where a real was required")
        return +x.re
    raise UsageError(f"cannot convert {type(x).__name__} to a real scalar")


def _to_mpc(x) -> mpc:
    if isinstance(x, BigComplex):
        return +x._v
    if isinstance(x, mpc):
        return +x
    if isinstance(x, complex):
        return mpc(x)
    return mpc(_to_mpfr(x))


class BigComplex:
    """Immutable arbitrary-precision complex scalar.

    Binary operations between two ``BigComplex`` values are carried out at
    the smaller of the two operand precisions, mirroring how precision
    honestly propagates; mixing with exact types (int, Fraction) keeps the
    inexact operand's precision.
    """

    __slots__ = ("_v",)

    def __init__(self, value, ctx: PrecisionContext | None = None):
        if ctx is not None:
            with ctx.active():
                v = _to_mpc(value)
        else:
            v = value if isinstance(value, mpc) else mpc(_to_mpc(value))
        if not (gmpy2.is_finite(v.real) and gmpy2.is_finite(v.imag)):
            raise UsageError("BigComplex components must be finite")
        object.__setattr__(self, "_v", v)

    # internal fast constructor: trusts the caller's mpc
    @classmethod
    def _raw(cls, v: mpc) -> "BigComplex":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_v", v)
        return obj

    @property
    def re(self) -> mpfr:
        return self._v.real

    @property
    def im(self) -> mpfr:
        return self._v.imag

    @property
    def bits(self) -> int:
        return self._v.precision[0]

    def conjugate(self) -> "BigComplex":
        with _gmpy_ctx(self.bits):
            return BigComplex._raw(gmpy2.mpc(self._v.real, -self._v.imag))

    def __abs__(self) -> mpfr:
        with _gmpy_ctx(self.bits):
            return abs(self._v)

    def _binary_bits(self, other) -> int:
        if isinstance(other, BigComplex):
            return min(self.bits, other.bits)
        if isinstance(other, (mpfr, mpc)):
            return min(self.bits, other.precision if isinstance(other, mpfr) else other.precision[0])
        return self.bits

    def _coerce(self, other) -> mpc:
        if isinstance(other, BigComplex):
            return other._v
        if isinstance(other, (int, mpz, mpfr, mpc, float, complex)):
            return other
        if isinstance(other, Fraction):
            return mpq(other.numerator, other.denominator)
        if isinstance(other, mpq):
            return other
        return NotImplemented

    def _apply(self, other, op):
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        with _gmpy_ctx(self._binary_bits(other)):
            return BigComplex._raw(mpc(op(self._v, rhs)))

    def __add__(self, other):
        return self._apply(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._apply(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._apply(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._apply(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._apply(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._apply(other, lambda a, b: b / a)

    def __pow__(self, other):
        return self._apply(other, lambda a, b: a ** b)

    def __neg__(self):
        with _gmpy_ctx(self.bits):
            return BigComplex._raw(-self._v)

    def __eq__(self, other):
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return self._v == rhs

    def __hash__(self):
        return hash(self._v)

    def __complex__(self):
        return complex(self._v)

    def __repr__(self):
        return f"BigComplex({scalar_format(self)})"

    # principal-branch helpers (arguments in (-pi, pi])
    def exp(self) -> "BigComplex":
        with _gmpy_ctx(self.bits):
            return BigComplex._raw(gmpy2.exp(self._v))

    def log(self) -> "BigComplex":
        if self._v == 0:
            raise BranchError("log of zero")
        with _gmpy_ctx(self.bits):
            return BigComplex._raw(gmpy2.log(self._v))

    def sqrt(self) -> "BigComplex":
        with _gmpy_ctx(self.bits):
            return BigComplex._raw(gmpy2.sqrt(self._v))


_NUM_RE = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_RE_REAL = re.compile(rf"^({_NUM_RE})$")
_RE_IMAG = re.compile(rf"^({_NUM_RE})[ij]$|^([+-]?)[ij]$")
_RE_BOTH = re.compile(rf"^({_NUM_RE})\s*([+-](?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?|[+-])\s*[ij]$")


def scalar_parse(text: str, ctx: PrecisionContext) -> BigComplex:
    """Parse a signed decimal, optionally with exponent and imaginary part.

    Accepted forms: ``"1.5"``, ``"1e-50"``, ``"3i"``, ``"-i"``,
    ``"0.916198-0.182459i"``.  The value is correct to ``ctx`` precision and
    round-trips through :func:`scalar_format`.
    """
    if not isinstance(text, str):
        raise ParseError("scalar_parse expects a string")
    s = text.strip().replace(" ", "")
    with ctx.active():
        m = _RE_REAL.match(s)
        if m:
            return BigComplex._raw(mpc(mpfr(m.group(1)), mpfr(0)))
        m = _RE_IMAG.match(s)
        if m:
            if m.group(1) is not None:
                return BigComplex._raw(mpc(mpfr(0), mpfr(m.group(1))))
            sign = -1 if m.group(2) == "-" else 1
            return BigComplex._raw(mpc(mpfr(0), mpfr(sign)))
        m = _RE_BOTH.match(s)
        if m:
            re_part = mpfr(m.group(1))
            imag_text = m.group(2)
            if imag_text in ("+", "-"):
                imag_text += "1"
            return BigComplex._raw(mpc(re_part, mpfr(imag_text)))
    raise ParseError(f"malformed scalar literal: {text!r}")


def _format_mpfr(x: mpfr, digits: int) -> str:
    if gmpy2.is_zero(x):
        return "0"
    mant, exp, _ = x.digits(10, digits)  # value = 0.mant * 10**exp
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    if -3 < exp <= min(max(digits, len(mant)), 24):
        if exp <= 0:
            return sign + "0." + "0" * (-exp) + mant
        if exp >= len(mant):
            return sign + mant + "0" * (exp - len(mant))
        return sign + mant[:exp] + "." + mant[exp:]
    body = mant[0] + ("." + mant[1:] if len(mant) > 1 else "")
    return f"{sign}{body}e{exp - 1:+d}"


def scalar_format(value, digits: int | None = None) -> str:
    """Decimal string for a scalar; lossless to ``digits`` significant figures.

    ``value`` may be a BigComplex, mpfr, int or Fraction.  With ``digits``
    omitted, the full precision carried by the value is printed.
    """
    if isinstance(value, (int, mpz)):
        return str(int(value))
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, mpfr):
        d = digits or max(2, int(value.precision / _LOG2_10))
        return _format_mpfr(value, d)
    if isinstance(value, BigComplex):
        d = digits or max(2, int(value.bits / _LOG2_10))
        re_s = _format_mpfr(value.re, d)
        if gmpy2.is_zero(value.im):
            return re_s
        im_s = _format_mpfr(value.im, d).lstrip("-")
        sign = "-" if value.im < 0 else "+"
        if gmpy2.is_zero(value.re):
            return ("-" if sign == "-" else "") + im_s + "i"
        return f"{re_s}{sign}{im_s}i"
    raise UsageError(f"cannot format {type(value).__name__}")


# ---------------------------------------------------------------------------
# Raw series kernels.
#
# These operate on plain Python lists of gmpy2 numbers (mpc or mpfr) and
# assume a gmpy2 context is already active.  TruncatedSeries wraps them; the
# heavier modules (waves, asymptotics) call them directly in hot loops.
# ---------------------------------------------------------------------------


def s_trim(a: list, n: int) -> list:
    return a[:n] if len(a) > n else a + [a[0] - a[0]] * (n - len(a))


def s_mul(a: list, b: list, n: int) -> list:
    out = []
    for m in range(n):
        lo = max(0, m - len(b) + 1)
        hi = min(m, len(a) - 1)
        acc = None
        for i in range(lo, hi + 1):
            t = a[i] * b[m - i]
            acc = t if acc is None else acc + t
        out.append(acc if acc is not None else a[0] - a[0])
    return out


def s_recip(a: list, n: int) -> list:
    if gmpy2.is_zero(a[0]):
        raise SingularSeriesError("reciprocal of a series with zero constant term")
    b0 = 1 / a[0]
    out = [b0]
    for m in range(1, n):
        acc = None
        hi = min(m, len(a) - 1)
        for i in range(1, hi + 1):
            t = a[i] * out[m - i]
            acc = t if acc is None else acc + t
        out.append(-b0 * acc if acc is not None else a[0] - a[0])
    return out


def s_exp(a: list, n: int) -> list:
    a = s_trim(a, n)
    h0 = gmpy2.exp(a[0])
    out = [h0]
    ap = [(i + 1) * a[i + 1] for i in range(n - 1)]  # coefficients of a'
    for m in range(n - 1):
        acc = None
        for i in range(m + 1):
            t = ap[i] * out[m - i]
            acc = t if acc is None else acc + t
        out.append(acc / (m + 1) if acc is not None else a[0] - a[0])
    return out


def s_log(a: list, n: int) -> list:
    if gmpy2.is_zero(a[0]):
        raise SingularSeriesError("log of a series with zero constant term")
    a = s_trim(a, n)
    out = [gmpy2.log(a[0])]
    inv0 = 1 / a[0]
    for m in range(1, n):
        acc = m * a[m]
        for i in range(1, m):
            acc = acc - i * out[i] * a[m - i]
        out.append(acc * inv0 / m)
    return out


def s_sqrt(a: list, n: int, leading=None) -> list:
    if gmpy2.is_zero(a[0]):
        raise SingularSeriesError("sqrt of a series with zero constant term")
    a = s_trim(a, n)
    s0 = gmpy2.sqrt(a[0]) if leading is None else leading
    out = [s0]
    half = 1 / (2 * s0)
    for m in range(1, n):
        acc = a[m]
        for i in range(1, m):
            acc = acc - out[i] * out[m - i]
        out.append(acc * half)
    return out


def s_deriv(a: list) -> list:
    return [(i + 1) * a[i + 1] for i in range(len(a) - 1)]


def s_integ(a: list) -> list:
    zero = a[0] - a[0]
    return [zero] + [a[i] / (i + 1) for i in range(len(a))]


def s_add(a: list, b: list, n: int) -> list:
    a, b = s_trim(a, n), s_trim(b, n)
    return [a[i] + b[i] for i in range(n)]


def s_scale(a: list, c) -> list:
    return [c * x for x in a]


def s_eval(a: list, t):
    acc = a[-1]
    for i in range(len(a) - 2, -1, -1):
        acc = acc * t + a[i]
    return acc


def s_pow_int(a: list, e: int, n: int) -> list:
    out = None
    base = s_trim(a, n)
    k = e
    while k:
        if k & 1:
            out = base if out is None else s_mul(out, base, n)
        k >>= 1
        if k:
            base = s_mul(base, base, n)
    if out is None:
        one = 1 + (a[0] - a[0])
        return s_trim([one], n)
    return out


class TruncatedSeries:
    """Power series about ``center`` truncated after ``order`` coefficients.

    ``coeffs[i]`` multiplies ``(z - center)**i``.  Binary operations require
    equal centers and truncate to the smaller order; nothing ever silently
    extends a series.
    """

    __slots__ = ("_center", "_coeffs", "_bits")

    def __init__(self, coeffs, center=0, ctx: PrecisionContext | None = None):
        if ctx is not None:
            with ctx.active():
                c = _to_mpc(center)
                cs = [_to_mpc(x) for x in coeffs]
            bits = ctx.bits
        else:
            c = _to_mpc(center)
            cs = [_to_mpc(x) for x in coeffs]
            bits = max((x.precision[0] for x in cs), default=c.precision[0])
        if not cs:
            raise UsageError("a TruncatedSeries needs at least one coefficient")
        object.__setattr__(self, "_center", c)
        object.__setattr__(self, "_coeffs", cs)
        object.__setattr__(self, "_bits", bits)

    @classmethod
    def _raw(cls, coeffs: list, center: mpc, bits: int) -> "TruncatedSeries":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_center", center)
        object.__setattr__(obj, "_coeffs", coeffs)
        object.__setattr__(obj, "_bits", bits)
        return obj

    @property
    def order(self) -> int:
        return len(self._coeffs)

    @property
    def bits(self) -> int:
        return self._bits

    @property
    def center(self) -> BigComplex:
        return BigComplex._raw(self._center)

    @property
    def coeffs(self) -> tuple:
        return tuple(BigComplex._raw(c) for c in self._coeffs)

    def raw(self) -> list:
        return list(self._coeffs)

    def _wrap(self, coeffs: list) -> "TruncatedSeries":
        return TruncatedSeries._raw(coeffs, self._center, self._bits)

    def _common(self, other: "TruncatedSeries") -> int:
        if not isinstance(other, TruncatedSeries):
            raise UsageError("expected a TruncatedSeries operand")
        if self._center != other._center:
            raise UsageError("series operands must share a center")
        return min(self.order, other.order)

    def mul(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self._common(other)
        with _gmpy_ctx(min(self._bits, other._bits)):
            return self._wrap(s_mul(self._coeffs, other._coeffs, n))

    def add(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self._common(other)
        with _gmpy_ctx(min(self._bits, other._bits)):
            return self._wrap(s_add(self._coeffs, other._coeffs, n))

    def sub(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self._common(other)
        with _gmpy_ctx(min(self._bits, other._bits)):
            return self._wrap(s_add(self._coeffs, s_scale(other._coeffs, -1), n))

    def scale(self, c) -> "TruncatedSeries":
        with _gmpy_ctx(self._bits):
            return self._wrap(s_scale(self._coeffs, _to_mpc(c)))

    def shift_const(self, c) -> "TruncatedSeries":
        with _gmpy_ctx(self._bits):
            out = list(self._coeffs)
            out[0] = out[0] + _to_mpc(c)
            return self._wrap(out)

    def recip(self) -> "TruncatedSeries":
        with _gmpy_ctx(self._bits):
            return self._wrap(s_recip(self._coeffs, self.order))

    def exp(self) -> "TruncatedSeries":
        with _gmpy_ctx(self._bits):
            return self._wrap(s_exp(self._coeffs, self.order))

    def log(self) -> "TruncatedSeries":
        with _gmpy_ctx(self._bits):
            return self._wrap(s_log(self._coeffs, self.order))

    def sqrt(self) -> "TruncatedSeries":
        with _gmpy_ctx(self._bits):
            return self._wrap(s_sqrt(self._coeffs, self.order))

    def derivative(self) -> "TruncatedSeries":
        if self.order < 2:
            raise UsageError("cannot differentiate an order-1 series")
        with _gmpy_ctx(self._bits):
            return self._wrap(s_deriv(self._coeffs))

    def antiderivative(self) -> "TruncatedSeries":
        with _gmpy_ctx(self._bits):
            return self._wrap(s_integ(self._coeffs))

    def pow_int(self, e: int) -> "TruncatedSeries":
        if e < 0:
            return self.pow_int(-e).recip()
        with _gmpy_ctx(self._bits):
            return self._wrap(s_pow_int(self._coeffs, e, self.order))

    def truncate(self, n: int) -> "TruncatedSeries":
        if n < 1:
            raise UsageError("order must be positive")
        with _gmpy_ctx(self._bits):
            return self._wrap(s_trim(self._coeffs, n))

    def eval(self, z) -> BigComplex:
        with _gmpy_ctx(self._bits):
            t = _to_mpc(z) - self._center
            return BigComplex._raw(mpc(s_eval(self._coeffs, t)))

    def __repr__(self):
        head = ", ".join(scalar_format(BigComplex._raw(c), 8) for c in self._coeffs[:4])
        tail = ", ..." if self.order > 4 else ""
        return f"TruncatedSeries(order={self.order}, [{head}{tail}])"


_ELEMENTARY = {
    "mul": lambda a, b: a.mul(b),
    "recip": lambda a, b: a.recip(),
    "exp": lambda a, b: a.exp(),
    "log": lambda a, b: a.log(),
    "sqrt": lambda a, b: a.sqrt(),
    "derivative": lambda a, b: a.derivative(),
    "antiderivative": lambda a, b: a.antiderivative(),
}


def series_elementary(kind: str, a: TruncatedSeries, b: TruncatedSeries | None = None) -> TruncatedSeries:
    """Dispatch the elementary series operations by name."""
    try:
        op = _ELEMENTARY[kind]
    except KeyError:
        raise UsageError(f"unknown series operation {kind!r}") from None
    if kind == "mul" and b is None:
        raise UsageError("mul needs a second operand")
    if kind != "mul" and b is not None:
        raise UsageError(f"{kind} takes a single operand")
    return op(a, b)


def series_eval(a: TruncatedSeries, z) -> BigComplex:
    return a.eval(z)
