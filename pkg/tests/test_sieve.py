import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobisums.arith import InvalidArgument
from jacobisums.sieve import (
    ResourceLimitError,
    build_sieve,
    count_coprime_odd_upto,
    is_odd_squarefree,
    load_sieve,
    save_sieve,
)

from oracles import mobius, totient


def test_small_tables():
    t = build_sieve(10)
    assert list(t.mu[1:]) == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    one = build_sieve(1)
    assert one.mu[1] == 1 and one.phi[1] == 1
    assert build_sieve(12).phi[12] == 4


def test_against_factorization_oracle(table_1e4):
    for n in range(1, 3000):
        assert table_1e4.mu[n] == mobius(n), n
    for n in range(1, 600):
        assert table_1e4.phi[n] == totient(n), n


def test_spf_and_primes(table_1e4):
    for n in range(2, 10_001):
        p = int(table_1e4.spf[n])
        assert n % p == 0
        assert all(p % d for d in range(2, math.isqrt(p) + 1))
        if p == n:
            assert table_1e4.mu[n] == -1 and table_1e4.phi[n] == n - 1


def test_squarefree_by_square_divisors(table_1e6):
    n = np.arange(1, 100_001)
    sqfree = np.ones(n.size, dtype=bool)
    for d in range(2, math.isqrt(100_000) + 1):
        sqfree[d * d - 1 :: d * d] = False
    assert np.array_equal(sqfree, table_1e6.mu[1:100_001] != 0)


def test_squarefree_density(table_1e6):
    dens = np.count_nonzero(table_1e6.mu[1:]) / 1e6
    assert abs(dens - 6 / math.pi**2) / (6 / math.pi**2) < 0.02


@pytest.mark.parametrize("segment", [1, 7, 1000, 4096, 1 << 20])
def test_segment_size_does_not_matter(segment):
    ref = build_sieve(5000, 1 << 20)
    assert ref.same_as(build_sieve(5000, segment))


def test_phi_fits_64_bit_for_k_squared(table_1e4):
    k = np.arange(1, 10_001)
    assert np.all(k * table_1e4.phi[1:] > 0)


@pytest.mark.parametrize("n, expected", [(15, True), (9, False), (10, False), (1, True)])
def test_is_odd_squarefree(table_1e4, n, expected):
    assert is_odd_squarefree(table_1e4, n) is expected


def test_out_of_range(table_1e4):
    with pytest.raises(InvalidArgument):
        is_odd_squarefree(table_1e4, 10_001)
    with pytest.raises(InvalidArgument):
        build_sieve(0)


def test_memory_budget():
    with pytest.raises(ResourceLimitError):
        build_sieve(10**6, memory_budget=10**6)


@pytest.mark.parametrize("n, x, expected", [(1, 10, 5), (3, 9, 3), (15, 15, 4)])
def test_count_coprime_examples(table_1e4, n, x, expected):
    assert count_coprime_odd_upto(table_1e4, n, x) == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2000).map(lambda k: 2 * k + 1), st.floats(0, 5000))
def test_count_coprime_brute_force(n, x):
    t = test_count_coprime_brute_force.table
    want = sum(1 for m in range(1, math.floor(x) + 1, 2) if math.gcd(m, n) == 1)
    assert count_coprime_odd_upto(t, n, x) == want


test_count_coprime_brute_force.table = build_sieve(5000)


def test_cache_roundtrip(tmp_path, table_1e4):
    path = tmp_path / "t.sieve"
    save_sieve(table_1e4, path)
    first = path.read_bytes()
    assert first[:4] == b"JSSV"
    back = load_sieve(path)
    assert back.same_as(table_1e4)
    save_sieve(back, path)
    assert path.read_bytes() == first


def test_cache_rejects_garbage(tmp_path):
    p = tmp_path / "bad"
    p.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(ValueError):
        load_sieve(p)
