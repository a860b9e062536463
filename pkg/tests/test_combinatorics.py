"""Exact number-theory layer: Bernoulli, Stirling, Farey, partitions."""

import itertools
import math
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from sylwave import combinatorics as cb
from sylwave.errors import DomainError
from sylwave.numerics import PrecisionContext

CTX = PrecisionContext(50)


def _nearest_int(v, ctx):
    with ctx.active():
        return int(gmpy2.rint(v))


def test_bernoulli_known_values():
    assert cb.bernoulli(1, Fraction(1, 3)) == Fraction(-1, 6)
    assert cb.bernoulli(2, 0) == Fraction(1, 6)
    assert cb.bernoulli(12) == Fraction(-691, 2730)


def test_bernoulli_binomial_recurrence_oracle():
    # sum_{j=0}^{m} C(m+1, j) B_j = 0 for m >= 1 (generating-function identity)
    for m in range(1, 24):
        total = sum(math.comb(m + 1, j) * cb.bernoulli(j) for j in range(m + 1))
        assert total == 0, m


def test_bernoulli_polynomial_vs_sum_of_powers():
    # sum_{j=0}^{n-1} j^m = (B_{m+1}(n) - B_{m+1}(0)) / (m+1)
    for m in range(0, 7):
        for n in (1, 2, 5, 9):
            lhs = sum(Fraction(j) ** m for j in range(n))
            rhs = (cb.bernoulli(m + 1, n) - cb.bernoulli(m + 1, 0)) / (m + 1)
            assert lhs == rhs


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def test_stirling2_examples_and_enumeration_oracle():
    assert cb.stirling2(0, 0) == 1
    counts = {}
    for part in _set_partitions([1, 2, 3]):
        counts[len(part)] = counts.get(len(part), 0) + 1
    assert cb.stirling2(3, 2) == counts[2] == 3
    # independent triangle recurrence
    table = {(0, 0): 1}
    for m in range(1, 7):
        for j in range(0, m + 1):
            table[(m, j)] = (
                j * table.get((m - 1, j), 0) + table.get((m - 1, j - 1), 0)
            )
    assert cb.stirling2(6, 3) == table[(6, 3)] == 90
    assert cb.stirling2(4, 9) == 0


def test_mobius():
    assert cb.mobius(1) == 1
    assert cb.mobius(4) == 0
    assert cb.mobius(30) == -1
    # summatory oracle: sum_{d | n} mu(d) = [n == 1]
    for n in range(1, 150):
        total = sum(cb.mobius(d) for d in range(1, n + 1) if n % d == 0)
        assert total == (1 if n == 1 else 0)


def _primitive_root_sum(k, n, digits=50):
    ctx = PrecisionContext(digits)
    with ctx.active():
        pi2 = 2 * gmpy2.const_pi()
        acc = gmpy2.mpc(0)
        for h in range(k):
            if math.gcd(h, k) == 1 or k == 1:
                acc += gmpy2.exp(gmpy2.mpc(0, 1) * pi2 * h * n / k)
        return acc


def test_ramanujan_sum_examples():
    for n in (-3, 0, 1, 7):
        assert cb.ramanujan_sum(1, n) == 1
    assert cb.ramanujan_sum(4, 2) == -2
    phi6 = sum(1 for h in range(1, 7) if math.gcd(h, 6) == 1)
    assert cb.ramanujan_sum(6, 0) == phi6 == 2


def test_ramanujan_sum_vs_root_sum():
    for k in (2, 3, 4, 5, 6, 9, 12):
        for n in (-5, 0, 1, 4, 17):
            exact = cb.ramanujan_sum(k, n)
            approx = _primitive_root_sum(k, n)
            assert abs(approx - exact) < mpfr("1e-30")


def _totient(k):
    return sum(1 for h in range(1, k + 1) if math.gcd(h, k) == 1)


def test_farey_examples():
    assert [str(f) for f in cb.farey_enumerate(1)] == ["0/1"]
    assert [str(f) for f in cb.farey_enumerate(3)] == ["0/1", "1/3", "1/2", "2/3"]
    seq = cb.farey_enumerate(100)
    assert len(seq) == 1 + sum(_totient(k) for k in range(2, 101))


def test_farey_sorted_and_symmetric():
    seq = cb.farey_enumerate(30)
    vals = [f.value for f in seq]
    assert vals == sorted(vals)
    assert len(set(vals)) == len(vals)
    present = {(f.h, f.k) for f in seq}
    for f in seq:
        if f.k >= 2:
            assert (f.k - f.h, f.k) in present


def test_partition_p():
    assert cb.partition_p(0) == 1
    assert cb.partition_p(8) == 22
    assert cb.partition_p(432) == 46647863284229267991


def test_partition_p_hrr_first_terms_of_eight():
    # partial sums through 1, 2, 3 terms: 21.7092, then +0.3463, then -0.0896
    ctx = PrecisionContext(40)
    t1 = cb.partition_p_hrr(8, 1, ctx)
    t2 = cb.partition_p_hrr(8, 2, ctx)
    t3 = cb.partition_p_hrr(8, 3, ctx)
    assert abs(float(t1) - 21.7092) < 5e-5
    assert abs(float(t2 - t1) - 0.3463) < 5e-5
    assert abs(float(t3 - t2) - (-0.0896)) < 5e-5


def test_partition_p_hrr_rounds_small():
    ctx = PrecisionContext(40)
    assert abs(float(cb.partition_p_hrr(1, 1, ctx)) - 1) < 0.5
    v = cb.partition_p_hrr(432, 21, ctx, verify=True)
    assert _nearest_int(v, ctx) == cb.partition_p(432)


def test_partition_p_hrr_rounds_to_exact_range():
    ctx = PrecisionContext(45)
    for n in range(1, 150):
        terms = math.isqrt(n) + 1
        v = cb.partition_p_hrr(n, terms, ctx)
        assert _nearest_int(v, ctx) == cb.partition_p(n), n


@pytest.mark.slow
def test_partition_p_hrr_rounds_to_exact_full():
    ctx = PrecisionContext(60)
    for n in range(150, 501):
        terms = math.isqrt(n) + 1
        v = cb.partition_p_hrr(n, terms, ctx)
        assert _nearest_int(v, ctx) == cb.partition_p(n), n


def _brute_p_restricted(N, n):
    # partitions of n into parts of size <= N
    if n == 0:
        return 1
    count = 0

    def rec(remaining, largest):
        nonlocal count
        if remaining == 0:
            count += 1
            return
        for part in range(min(remaining, largest), 0, -1):
            rec(remaining - part, part)

    rec(n, N)
    return count


def test_p_restricted_examples():
    assert cb.p_restricted(5, 0) == 1
    assert cb.p_restricted(4, -5) == 0
    assert cb.p_restricted(4, -10) == -cb.p_restricted(4, 0) == -1
    for N in (1, 2, 3, 5):
        for n in range(0, 12):
            assert cb.p_restricted(N, n) == _brute_p_restricted(N, n)
    for n in range(0, 20):
        assert cb.p_restricted(25, n) == cb.partition_p(n)


def test_p_restricted_2n_identity():
    assert cb.p_restricted(1000, 2000) == cb.p_restricted_2n(1000)
    assert cb.p_restricted(12, 24) == cb.partition_p(24) - sum(
        cb.partition_p(m) for m in range(12)
    )


def test_power_sum_residue():
    assert cb.power_sum_residue(0, 0, 2, 10) == 5
    assert cb.power_sum_residue(1, 1, 3, 10) == 1 + 4 + 7 + 10
    assert cb.power_sum_residue(2, 0, 1, 4) == 30
    with pytest.raises(DomainError):
        cb.power_sum_residue(1, 3, 3, 10)
