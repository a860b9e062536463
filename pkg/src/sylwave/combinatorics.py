"""Exact integer and rational number theory.

Bernoulli numbers/polynomials, Stirling subset numbers, the Moebius
function, Ramanujan sums, Farey fractions and partition counting.  This
module is the brute-force ground truth for the multiprecision machinery:
everything here is exact (``int`` / ``fractions.Fraction``), with the single
exception of the Hardy-Ramanujan-Rademacher partial sums which are
multiprecision reals.

Caches are append-only and guarded by locks, so concurrent readers are safe.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr, mpz

from .errors import DomainError, PrecisionError
from .numerics import PrecisionContext

__all__ = [
    "bernoulli",
    "stirling2",
    "mobius",
    "ramanujan_sum",
    "FareyFraction",
    "farey_enumerate",
    "partition_p",
    "partition_p_hrr",
    "p_restricted",
    "p_restricted_2n",
    "power_sum_residue",
]


# -- Bernoulli numbers ------------------------------------------------------
#
# Even-index values come from tangent numbers (integer triangle, no rational
# arithmetic until the final division); the triangle is regrown geometrically
# as larger indices are requested.

_TAN_LOCK = threading.Lock()
_TANGENT: list[mpz] = []  # _TANGENT[i] = T_{i+1}


def _tangent(n: int) -> mpz:
    """n-th tangent number T_n (T_1=1, T_2=2, T_3=16, ...)."""
    global _TANGENT
    with _TAN_LOCK:
        if n > len(_TANGENT):
            size = max(n, 2 * len(_TANGENT), 8)
            T = [mpz(0)] * (size + 1)
            T[1] = mpz(1)
            for k in range(2, size + 1):
                T[k] = (k - 1) * T[k - 1]
            for k in range(2, size + 1):
                for j in range(k, size + 1):
                    T[j] = (j - k) * T[j - 1] + (j - k + 2) * T[j]
            _TANGENT = T[1:]
        return _TANGENT[n - 1]


# values loaded from an on-disk cache are consulted before recomputation
_BERN_PRIMED: dict[int, Fraction] = {}


@lru_cache(maxsize=None)
def _bernoulli_number(m: int) -> Fraction:
    if m == 0:
        return Fraction(1)
    if m == 1:
        return Fraction(-1, 2)
    if m % 2 == 1:
        return Fraction(0)
    hit = _BERN_PRIMED.get(m)
    if hit is not None:
        return hit
    n = m // 2
    t = int(_tangent(n))
    sign = 1 if n % 2 == 1 else -1
    return Fraction(sign * t * m, 4**n * (4**n - 1))


def prime_bernoulli(values: dict[int, Fraction]) -> None:
    """Seed even-index Bernoulli numbers (used by the on-disk cache)."""
    _BERN_PRIMED.update(values)


def bernoulli_cache_top() -> int:
    """Largest even index currently derivable without new tangent rows."""
    with _TAN_LOCK:
        return 2 * len(_TANGENT)


def bernoulli(m: int, x: Fraction | int | None = None) -> Fraction:
    """Bernoulli number B_m, or polynomial value B_m(x) when x is given.

    Convention fixed by the generating function z e^{tz}/(e^z - 1), so
    B_1 = -1/2 and B_1(x) = x - 1/2.
    """
    if m < 0:
        raise DomainError("bernoulli index must be non-negative")
    if x is None:
        return _bernoulli_number(m)
    x = Fraction(x)
    acc = Fraction(0)
    for j in range(m + 1):
        b = _bernoulli_number(j)
        if b:
            acc += math.comb(m, j) * b * x ** (m - j)
    return acc


_STIR_LOCK = threading.Lock()
_STIR_ROWS: list[list[int]] = [[1]]  # row m holds S(m, 0..m)


def stirling2(m: int, j: int) -> int:
    """Stirling subset number: partitions of an m-set into j nonempty blocks."""
    if m < 0 or j < 0:
        raise DomainError("stirling2 arguments must be non-negative")
    if j > m:
        return 0
    with _STIR_LOCK:
        while len(_STIR_ROWS) <= m:
            prev = _STIR_ROWS[-1]
            r = len(_STIR_ROWS)
            row = [0] * (r + 1)
            for jj in range(1, r):
                row[jj] = jj * prev[jj] + prev[jj - 1]
            row[r] = 1
            _STIR_ROWS.append(row)
        return _STIR_ROWS[m][j]


def mobius(m: int) -> int:
    """Moebius function by trial factorization."""
    if m < 1:
        raise DomainError("mobius argument must be positive")
    if m == 1:
        return 1
    result = 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            result = -result
        d += 1 if d == 2 else 2
    if m > 1:
        result = -result
    return result


def _divisors(k: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= k:
        if k % d == 0:
            small.append(d)
            if d != k // d:
                large.append(k // d)
        d += 1
    return small + large[::-1]


def ramanujan_sum(k: int, n: int) -> int:
    """Sum of rho^n over the primitive k-th roots of unity (an integer)."""
    if k < 1:
        raise DomainError("ramanujan_sum modulus must be positive")
    g = k if n == 0 else math.gcd(k, abs(n))
    return sum(d * mobius(k // d) for d in _divisors(g))


@dataclass(frozen=True)
class FareyFraction:
    """Reduced fraction h/k with 0 <= h < k."""

    h: int
    k: int

    def __post_init__(self) -> None:
        if self.k < 1 or not (0 <= self.h < self.k):
            raise DomainError(f"not a Farey fraction: {self.h}/{self.k}")
        if math.gcd(self.h, self.k) != 1:
            raise DomainError(f"not reduced: {self.h}/{self.k}")

    @property
    def value(self) -> Fraction:
        return Fraction(self.h, self.k)

    def __lt__(self, other: "FareyFraction") -> bool:
        return self.h * other.k < other.h * self.k

    def __str__(self) -> str:
        return f"{self.h}/{self.k}"


def farey_enumerate(N: int) -> list[FareyFraction]:
    """All Farey fractions of order N in [0, 1), ascending, starting at 0/1."""
    if N < 1:
        raise DomainError("Farey order must be positive")
    out = [FareyFraction(0, 1)]
    if N == 1:
        return out
    a, b, c, d = 0, 1, 1, N
    while c < d:  # stop before 1/1
        out.append(FareyFraction(c, d))
        t = (N + b) // d
        a, b, c, d = c, d, t * c - a, t * d - b
    return out


_PART_LOCK = threading.Lock()
_PARTITIONS: list[int] = [1]  # p(0)
_PART_PREFIX: list[int] = [1]  # sum_{m<=n} p(m)


def partition_p(n: int) -> int:
    """Exact p(n) via Euler's pentagonal-number recurrence (memoized)."""
    if n < 0:
        raise DomainError("partition_p argument must be non-negative")
    with _PART_LOCK:
        while len(_PARTITIONS) <= n:
            m = len(_PARTITIONS)
            acc = 0
            k = 1
            while True:
                g1 = k * (3 * k - 1) // 2
                if g1 > m:
                    break
                sign = 1 if k % 2 == 1 else -1
                acc += sign * _PARTITIONS[m - g1]
                g2 = k * (3 * k + 1) // 2
                if g2 <= m:
                    acc += sign * _PARTITIONS[m - g2]
                k += 1
            _PARTITIONS.append(acc)
            _PART_PREFIX.append(_PART_PREFIX[-1] + acc)
        return _PARTITIONS[n]


def _partition_prefix(n: int) -> int:
    """sum_{m=0}^{n} p(m)."""
    if n < 0:
        return 0
    partition_p(n)
    with _PART_LOCK:
        return _PART_PREFIX[n]


def p_restricted_2n(N: int) -> int:
    """p_N(2N) through p(2N) minus the partitions with a part above N."""
    if N < 1:
        raise DomainError("N must be positive")
    return partition_p(2 * N) - _partition_prefix(N - 1)


@lru_cache(maxsize=256)
def _p_restricted_row(N: int, n_max: int) -> tuple[int, ...]:
    ways = [0] * (n_max + 1)
    ways[0] = 1
    for part in range(1, min(N, n_max) + 1):
        for v in range(part, n_max + 1):
            ways[v] += ways[v - part]
    return tuple(ways)


def p_restricted(N: int, n: int) -> int:
    """Partitions of n into at most N parts, extended to all integer n.

    For n >= 0 this is the usual restricted count; it vanishes on
    -N(N+1)/2 < n < 0 and continues as (-1)^(N+1) p_N(-n - N(N+1)/2) below.
    """
    if N < 1:
        raise DomainError("N must be positive")
    if n >= 0:
        if N >= n:
            return partition_p(n)
        return _p_restricted_row(N, n)[n]
    shift = N * (N + 1) // 2
    if -shift < n < 0:
        return 0
    sign = -1 if N % 2 == 0 else 1  # (-1)^(N+1)
    return sign * p_restricted(N, -n - shift)


def _hrr_term(n: int, k: int) -> mpfr:
    """k-th term of the Hardy-Ramanujan-Rademacher series for p(n)."""
    x = mpfr(n) - mpfr(1) / 24
    pi = gmpy2.const_pi()
    # Selberg's form of A_k(n)
    acc = mpfr(0)
    for ell in range(2 * k):
        if (3 * ell * ell - ell) // 2 % k == (-n) % k:
            c = gmpy2.cos((6 * ell - 1) * pi / (6 * k))
            acc = acc + c if ell % 2 == 0 else acc - c
    a_k = gmpy2.sqrt(mpfr(k) / 3) * acc
    arg = 2 * pi / (gmpy2.sqrt(mpfr(6)) * k) * gmpy2.sqrt(x)
    body = gmpy2.cosh(arg) - gmpy2.sinh(arg) / arg
    return a_k / (2 * gmpy2.sqrt(3 * mpfr(k)) * x) * body


def partition_p_hrr(
    n: int, terms: int, ctx: PrecisionContext, verify: bool = False
) -> mpfr:
    """Partial sum of the Hardy-Ramanujan-Rademacher series through k=terms.

    With ``terms`` around ceil(sqrt(n)) and adequate precision the result
    rounds to the exact p(n).  ``verify=True`` reruns at doubled precision
    and raises :class:`PrecisionError` on a mismatch beyond 1 ulp.
    """
    if n < 1 or terms < 1:
        raise DomainError("n and terms must be positive")
    with ctx.active():
        total = mpfr(0)
        for k in range(1, terms + 1):
            total += _hrr_term(n, k)
    if verify:
        with ctx.scaled(2.0).active():
            total2 = mpfr(0)
            for k in range(1, terms + 1):
                total2 += _hrr_term(n, k)
        with ctx.active():
            if abs(total - mpfr(total2)) > abs(total) * ctx.eps(2):
                raise PrecisionError(
                    "HRR partial sum unstable under precision doubling"
                )
    return total


@lru_cache(maxsize=128)
def _power_sums_class(k: int, w: int, N: int, m_max: int) -> tuple:
    """(sum_{1<=j<=N, j=w mod k} j^m for m = 0..m_max) as exact integers."""
    sums = [mpz(0)] * (m_max + 1)
    start = w if w >= 1 else k
    for j in range(start, N + 1, k):
        jz = mpz(j)
        x = mpz(1)
        sums[0] += 1
        for m in range(1, m_max + 1):
            x *= jz
            sums[m] += x
    return tuple(sums)


def power_sum_residue(m: int, w: int, k: int, N: int) -> int:
    """Exact sum of j^m over 1 <= j <= N with j = w (mod k)."""
    if m < 0:
        raise DomainError("power must be non-negative")
    if k < 1 or not (0 <= w < k):
        raise DomainError("need 0 <= w < k")
    if N < 1:
        raise DomainError("N must be positive")
    return int(_power_sums_class(k, w, N, m)[m])
