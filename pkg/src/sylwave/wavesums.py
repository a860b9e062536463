"""Direct evaluation of the Farey-class residue sums.

The Farey fractions of order N (excluding the first 100 orders) split into
the classes

    A:  N/2 < k <= N,            h = 1 or k - 1
    C:  N/2 < k <= N, k odd,     h = 2 or k - 2
    D:  N/2 < k <= N, k odd,     h = (k -+ 1)/2
    E:  N/3 < k <= N/2,          h = 1 or k - 1
    B:  everything else with k >= 101

Each class sum is evaluated term by term from exact residue formulas (the
simple-pole closed form, or the explicit double-pole formula for class E),
never from the intermediate integral approximations.  All sums are real:
each class is closed under h -> k - h, so conjugate residues are folded as
2 Re(...) pairs, which requires integer sigma.

Terms are accumulated in a deterministic order (ascending k), optionally in
parallel per-k chunks that are reduced in sorted order so results are
bit-reproducible for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .asymptotics import aux_eval
from .combinatorics import p_restricted
from .dilog import clausen
from .errors import DomainError, IdentityError, UsageError, ZeroProductError
from .numerics import BigComplex, PrecisionContext
from .waves import _simple_closed_value, q_residue, wave

__all__ = [
    "ClassSum",
    "sine_product",
    "sine_product_main_term",
    "sum_A1",
    "sum_C",
    "sum_D1",
    "sum_E1",
    "sum_B",
    "first_waves",
    "key_identity_check",
    "KeyIdentityReport",
]

CLASS_IDS = ("A", "B", "C", "C2", "C2star", "D", "E", "first_waves")

DEFAULT_CLASS_DIGITS = 80
_CHUNK = 64  # per-k work unit for the thread pool


@dataclass(frozen=True)
class ClassSum:
    """One evaluated residue-class sum."""

    class_id: str
    N: int
    sigma: int
    value: mpfr
    term_count: int

    def __post_init__(self) -> None:
        if self.class_id not in CLASS_IDS:
            raise UsageError(f"unknown class id {self.class_id!r}")


def sine_product(theta, m: int, ctx: PrecisionContext, reciprocal: bool = False) -> mpfr:
    """prod_{j=1}^m 2 sin(pi j theta) for rational theta; empty product 1.

    ``reciprocal=True`` returns 1 over the product.
    """
    theta = Fraction(theta)
    if m < 0:
        raise DomainError("m must be non-negative")
    b = theta.denominator
    if m >= b:
        raise ZeroProductError(
            f"factor j = {b} vanishes in the sine product (theta = {theta})"
        )
    with ctx.active():
        pi = gmpy2.const_pi()
        a = theta.numerator
        acc = mpfr(1)
        flips = 0
        cache: dict[int, mpfr] = {}
        for j in range(1, m + 1):
            ja = j * a
            r = ja % b
            flips += ja // b  # sin(pi(x + q)) = (-1)^q sin(pi x)
            v = cache.get(r)
            if v is None:
                v = 2 * gmpy2.sin(pi * mpfr(r) / b)
                cache[r] = v
            acc *= v
        if flips % 2:
            acc = -acc
        return 1 / acc if reciprocal else acc


def sine_product_main_term(
    N: int, k: int, ctx: PrecisionContext, corrections: int = 0
) -> mpfr:
    """Euler-Maclaurin main term approximating 1 / sine_product(1/k, N-k).

    Valid for 1.01 < N/k < 1.49.  ``corrections`` appends the first few
    exp(g_l(N/k)/N^{2l-1}) factors.
    """
    with ctx.active():
        zhat = mpfr(N) / k
        if not (mpfr("1.01") < zhat < mpfr("1.49")):
            raise DomainError("sine_product_main_term needs 1.01 < N/k < 1.49")
        pi = gmpy2.const_pi()
        main = gmpy2.sqrt(zhat / (2 * N * gmpy2.sin(pi * (zhat - 1))))
        main *= gmpy2.exp(k / (2 * pi) * clausen(2 * pi * zhat, ctx))
        for ell in range(1, corrections + 1):
            g = aux_eval("g", {"ell": ell, "z": BigComplex._raw(mpc(zhat))}, ctx)
            main *= gmpy2.exp(g._v.real / mpfr(N) ** (2 * ell - 1))
        return main


def _map_ordered(fn, ks: list, threads: int, ctx: PrecisionContext):
    """Map fn over ks, preserving order; optional thread-pool execution.

    gmpy2 precision is thread-local, so each worker re-activates the
    context before touching any term.
    """
    if threads and threads > 1 and len(ks) > _CHUNK:
        chunks = [ks[i : i + _CHUNK] for i in range(0, len(ks), _CHUNK)]

        def run_chunk(ch):
            with ctx.active():
                return [fn(k) for k in ch]

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, chunks))
        return [v for part in parts for v in part]
    return [fn(k) for k in ks]


def _fold(values: list, ctx: PrecisionContext) -> mpfr:
    with ctx.active():
        acc = mpfr(0)
        for v in values:
            acc += v
        return acc


def _sin_reciprocal_product(a: int, b: int, m: int) -> mpfr:
    """1 / prod_{j=1}^m 2 sin(pi j a / b) (active context)."""
    pi = gmpy2.const_pi()
    acc = mpfr(1)
    flips = 0
    cache: dict[int, mpfr] = {}
    for j in range(1, m + 1):
        ja = j * a
        r = ja % b
        flips += ja // b  # sin(pi(x + q)) = (-1)^q sin(pi x)
        v = cache.get(r)
        if v is None:
            v = 2 * gmpy2.sin(pi * mpfr(r) / b)
            cache[r] = v
        acc *= v
    if flips % 2:
        acc = -acc
    return 1 / acc


def sum_A1(
    N: int,
    sigma: int,
    ctx: PrecisionContext | None = None,
    k_min: int | None = None,
    threads: int = 1,
) -> ClassSum:
    """Class-A sum over simple-pole residues at 1/k and (k-1)/k, N/2 < k <= N.

    Each term is exact: (2 (-1)^k / k^2) sin(phase) / sine product, with the
    phase reduced modulo 2 pi in exact integer arithmetic first.
    """
    ctx = ctx or PrecisionContext(DEFAULT_CLASS_DIGITS)
    lo = max(N // 2 + 1, k_min or 1)
    ks = list(range(lo, N + 1))

    def term(k: int) -> mpfr:
        pi = gmpy2.const_pi()
        x = (-N * N - N + 4 * sigma) % (4 * k)
        phase = pi / 2 * (mpfr(x) / k + (3 * N) % 4)
        sp = _sin_reciprocal_product(1, k, N - k)
        sgn = 1 if k % 2 == 0 else -1
        return sgn * 2 * gmpy2.sin(phase) / mpfr(k) ** 2 * sp

    with ctx.active():
        vals = _map_ordered(term, ks, threads, ctx)
        total = _fold(vals, ctx)
    count = sum(2 if k > 2 else 1 for k in ks)
    return ClassSum("A", N, sigma, total, count)


def sum_C(
    N: int,
    sigma: int,
    ctx: PrecisionContext | None = None,
    k_min: int | None = None,
    threads: int = 1,
) -> tuple[ClassSum, ClassSum, ClassSum]:
    """Class-C sums (odd k, h = 2 and k - 2): C1 = C2 + C2star.

    C2 covers 2N/k in [2, 3) through the exact summand formula; C2star
    covers 2N/k in [3, 4) through the generic simple-pole closed form.
    Requires integer sigma (the 2 Re folding of conjugate residues).
    """
    ctx = ctx or PrecisionContext(DEFAULT_CLASS_DIGITS)
    lo = max(N // 2 + 1, k_min or 1)
    ks2 = [k for k in range(lo, N + 1) if k % 2 == 1 and 3 * k > 2 * N]
    ks2s = [k for k in range(lo, N + 1) if k % 2 == 1 and 3 * k <= 2 * N]

    def term_c2(k: int) -> mpfr:
        pi = gmpy2.const_pi()
        x = (2 * (-N * N - N + 4 * sigma) + k * (5 * N - k)) % (8 * k)
        phase = pi / 2 * mpfr(x) / k
        sp = _sin_reciprocal_product(2, k, N - k)
        return -2 * gmpy2.cos(phase) / mpfr(k) ** 2 * sp

    def term_c2star(k: int) -> mpfr:
        return 2 * _simple_closed_value(2, k, sigma, N).real

    with ctx.active():
        v2 = _fold(_map_ordered(term_c2, ks2, threads, ctx), ctx)
        v2s = _fold(_map_ordered(term_c2star, ks2s, threads, ctx), ctx)
        v1 = v2 + v2s
    c2 = ClassSum("C2", N, sigma, v2, 2 * len(ks2))
    c2s = ClassSum("C2star", N, sigma, v2s, 2 * len(ks2s))
    c1 = ClassSum("C", N, sigma, v1, 2 * (len(ks2) + len(ks2s)))
    return c2, c2s, c1


def sum_D1(
    N: int,
    sigma: int,
    ctx: PrecisionContext | None = None,
    k_min: int | None = None,
    threads: int = 1,
    convention: str = "expansion",
) -> ClassSum:
    """Class-D sum (odd k, h = (k -+ 1)/2) over N/2 < k <= N.

    Odd N uses the exact phase/sine-product summand; even N goes through
    the generic simple-pole closed form.  Integer sigma required.

    Two orientations exist for this class.  ``convention='residue'``
    returns the plain sum of the class residues (the quantity entering the
    full Farey-partition identity).  ``convention='expansion'`` (default)
    multiplies by (-1)^(N+1), which only matters for even N: that is the
    orientation the d-coefficient asymptotic family approximates and the
    one used in the reference comparison tables.
    """
    if convention not in ("expansion", "residue"):
        raise UsageError(f"unknown sum_D1 convention {convention!r}")
    ctx = ctx or PrecisionContext(DEFAULT_CLASS_DIGITS)
    lo = max(N // 2 + 1, k_min or 1)
    ks = [k for k in range(lo, N + 1) if k % 2 == 1]

    if N % 2 == 1:

        def term(k: int) -> mpfr:
            pi = gmpy2.const_pi()
            x = (N * N + N - 4 * sigma + k * (N + 2 * k + 3)) % (8 * k)
            sp = _sin_reciprocal_product(k - 1, 2 * k, N - k)
            return 2 * gmpy2.cos(pi * mpfr(x) / (4 * k)) / mpfr(k) ** 2 * sp

    else:

        def term(k: int) -> mpfr:
            return 2 * _simple_closed_value((k - 1) // 2, k, sigma, N).real

    with ctx.active():
        total = _fold(_map_ordered(term, ks, threads, ctx), ctx)
        if convention == "expansion" and N % 2 == 0:
            total = -total
    return ClassSum("D", N, sigma, total, 2 * len(ks))


def sum_E1(
    N: int,
    sigma: int,
    ctx: PrecisionContext | None = None,
    k_min: int | None = None,
    threads: int = 1,
) -> ClassSum:
    """Class-E sum (h = 1 and k - 1) over N/3 < k <= N/2: double poles.

    Every term uses the explicit second-order residue formula with the
    cotangent-sum factor phi(N, k, sigma).  Integer sigma required.
    """
    ctx = ctx or PrecisionContext(DEFAULT_CLASS_DIGITS)
    lo = max(N // 3 + 1, k_min or 1)
    ks = list(range(lo, N // 2 + 1))

    def term(k: int) -> mpfr:
        pi = gmpy2.const_pi()
        # phi(N, k, sigma) = (N^2 + N - 4 sigma)/(4 k^2)
        #                  + (1/(2 pi i k)) sum_{k !| j} (pi j / k) cot(pi j / k)
        cot_sum = mpfr(0)
        for r in range(1, k):
            cnt = (N - r) // k + 1
            s1 = cnt * r + k * (cnt - 1) * cnt // 2  # sum of j = r (mod k), j <= N
            cot_sum += mpfr(s1) * (gmpy2.cos(pi * mpfr(r) / k) / gmpy2.sin(pi * mpfr(r) / k))
        phi = mpc(
            mpq(N * N + N - 4 * sigma, 4 * k * k)
        ) + (pi / k * cot_sum) / (2 * pi * mpc(0, 1) * k)
        x = (-N * N - N + 4 * sigma) % (4 * k)
        ang = pi / 2 * (mpfr(x) / k + (N - 2 * k) % 4)
        e = mpc(gmpy2.cos(ang), gmpy2.sin(ang))
        sp = _sin_reciprocal_product(1, k, N - 2 * k)
        q = phi * e * sp / (2 * mpfr(k) ** 2)
        return 2 * q.real

    with ctx.active():
        total = _fold(_map_ordered(term, ks, threads, ctx), ctx)
    return ClassSum("E", N, sigma, total, 2 * len(ks))


def _class_member(h: int, k: int, N: int) -> bool:
    """Is h/k in A, C, D or E (the named classes outside Farey order 100)?"""
    if 2 * k > N:
        if h in (1, k - 1):
            return True
        if k % 2 == 1 and (h in (2, k - 2) or h in ((k - 1) // 2, (k + 1) // 2)):
            return True
        return False
    if 3 * k > N:  # N/3 < k <= N/2
        return h in (1, k - 1)
    return False


def sum_B(
    N: int,
    sigma: int,
    ctx: PrecisionContext | None = None,
    threads: int = 1,
) -> ClassSum:
    """Leftover class: Farey fractions with k >= 101 outside A, C, D, E."""
    ctx = ctx or PrecisionContext(DEFAULT_CLASS_DIGITS)
    if N < 101:
        return ClassSum("B", N, sigma, ctx.real(0), 0)
    ks = list(range(101, N + 1))
    counts = [0]

    def per_k(k: int) -> mpfr:
        s = N // k
        acc = mpfr(0)
        cnt = 0
        for h in range(1, k // 2 + 1):
            if 2 * h == k or math.gcd(h, k) != 1:
                continue
            if _class_member(h, k, N):
                continue
            cnt += 2
            if s == 1:
                acc += 2 * _simple_closed_value(h, k, sigma, N).real
            else:
                acc += 2 * q_residue(h, k, sigma, N, ctx).value._v.real
        counts[0] += cnt
        return acc

    with ctx.active():
        total = _fold(_map_ordered(per_k, ks, threads, ctx), ctx)
    return ClassSum("B", N, sigma, total, counts[0])


def first_waves(
    N: int, n: int, K: int = 100, ctx: PrecisionContext | None = None
) -> mpfr:
    """Sum of the first K waves W_1(N, n) + ... + W_K(N, n)."""
    ctx = ctx or PrecisionContext(DEFAULT_CLASS_DIGITS)
    if K > N:
        raise DomainError("need K <= N")
    with ctx.active():
        total = mpfr(0)
        for k in range(1, K + 1):
            total += wave(k, N, n, ctx)
        return total


@dataclass(frozen=True)
class KeyIdentityReport:
    """All pieces of the key identity and its residual."""

    N: int
    n: int
    first_waves: mpfr
    p_restricted: int
    a1: ClassSum
    c1: ClassSum
    d1: ClassSum
    e1: ClassSum
    b: ClassSum
    residual: mpfr
    tolerance: mpfr
    passed: bool

    @property
    def farey_terms(self) -> int:
        return (
            self.a1.term_count
            + self.c1.term_count
            + self.d1.term_count
            + self.e1.term_count
            + self.b.term_count
        )


def key_identity_check(
    N: int, n: int, ctx: PrecisionContext | None = None, threads: int = 1
) -> KeyIdentityReport:
    """Verify: sum of first 100 waves = p_N(n) + A-class + remaining residues.

    Every piece is computed by an independent route.  For N < 200 the named
    classes overlap Farey order 100, so all class sums here run with
    k >= 101; their k <= 100 members are already inside the first-waves sum.
    """
    if N < 101:
        raise DomainError("the key identity split needs N >= 101")
    ctx = ctx or PrecisionContext(DEFAULT_CLASS_DIGITS)
    lhs = first_waves(N, n, 100, ctx)
    p = p_restricted(N, n)
    a1 = sum_A1(N, -n, ctx, k_min=101, threads=threads)
    _, _, c1 = sum_C(N, -n, ctx, k_min=101, threads=threads)
    d1 = sum_D1(N, -n, ctx, k_min=101, threads=threads, convention="residue")
    e1 = sum_E1(N, -n, ctx, k_min=101, threads=threads)
    b = sum_B(N, -n, ctx, threads=threads)
    with ctx.active():
        rhs = mpfr(p) + a1.value + c1.value + d1.value + e1.value + b.value
        scale = max(abs(lhs), mpfr(1))
        residual = abs(lhs - rhs) / scale
        tol = mpfr(10) ** (-(ctx.decimal_digits // 2) + 10)
        ok = residual < tol
    report = KeyIdentityReport(N, n, lhs, p, a1, c1, d1, e1, b, residual, tol, ok)
    if not ok:
        raise IdentityError(
            f"key identity residual {float(residual):.3e} exceeds {float(tol):.1e} "
            f"at (N, n) = ({N}, {n})"
        )
    return report
