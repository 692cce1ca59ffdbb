import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jacobisums.arith import InvalidArgument
from jacobisums.regions import (
    HyperbolicRegion,
    Piece,
    build_equal_width_cover,
    dyadic_cover,
    dyadic_intervals,
    enumerate_region,
    floor_root,
    split_R,
    split_S,
)

from oracles import allowed


@pytest.mark.parametrize("T, z, expected", [
    (10, 2, [(3, 3)]),
    (10, 4, []),
    (16, 2, [(3, 3), (3, 5), (5, 3)]),
])
def test_enumerate_examples(table_1e4, T, z, expected):
    for res in ("odd_squarefree",) if expected else ("odd_squarefree", "odd", "all"):
        assert list(enumerate_region(HyperbolicRegion(T, z, res), table_1e4)) == expected


def test_enumerate_needs_table(table_1e4):
    with pytest.raises(InvalidArgument):
        list(enumerate_region(HyperbolicRegion(10**5, 2), table_1e4))


@pytest.mark.parametrize("res", ["odd_squarefree", "odd", "all"])
def test_enumerate_matches_brute_force(table_1e4, res):
    T, z = 700, 3.5
    want = [(n, m) for n in range(4, T + 1) for m in range(4, T // n + 1)
            if allowed(n, res) and allowed(m, "odd" if res == "all" else res)]
    assert list(enumerate_region(HyperbolicRegion(T, z, res), table_1e4)) == want


def test_odd_term_count_z0(table_1e4):
    T = 2000
    got = sum(1 for _ in enumerate_region(HyperbolicRegion(T, 0, "odd"), table_1e4))
    want = sum((T // n + 1) // 2 for n in range(1, T + 1, 2))
    assert got == want


def _signed_cover(pieces, n, m):
    return sum(p.sign for p in pieces if p.contains(n, m))


@pytest.mark.parametrize("T", [10**3, 10**4])
@pytest.mark.parametrize("z", [2, 4, 9, 25])
@pytest.mark.parametrize("split", [split_S, split_R])
def test_split_pointwise_identity(T, z, split):
    r = HyperbolicRegion(T, z)
    pieces = split(r)
    # points inside the region plus a margin outside it
    for n in range(1, T // 2 + 2):
        for m in range(1, T // n + 3):
            assert _signed_cover(pieces, n, m) == int(r.contains(n, m)), (n, m)


def test_split_S_collapses_for_large_z():
    T = 10**4
    z = 10  # T^(1/3)/log T is about 2.3
    parts = {p.name: p for p in split_S(HyperbolicRegion(T, z))}
    assert all(parts[k].is_empty for k in ("S2", "S3", "S4"))


@pytest.mark.parametrize("z", [10, 11, 40])
def test_split_R_collapses_for_large_z(z):
    parts = {p.name: p for p in split_R(HyperbolicRegion(10**4, z))}
    assert all(parts[k].is_empty for k in ("R2", "R3", "R4"))


def test_split_R_small():
    parts = {p.name: p for p in split_R(HyperbolicRegion(16, 2))}
    assert parts["R4"].is_empty


def test_split_S_T100_z9(table_1e4):
    # z1 = 9 so S1 = (9, 100]^2 under nm <= 100; only (10, 10), which is even
    s1 = split_S(HyperbolicRegion(100, 9))[0]
    assert list(s1.points()) == [(10, 10)]
    mask = table_1e4.mask("odd_squarefree")
    assert not any(mask[n] and mask[m] for n, m in s1.points())


def test_split_rejects_small_z():
    with pytest.raises(InvalidArgument):
        split_S(HyperbolicRegion(100, 1))
    with pytest.raises(InvalidArgument):
        split_R(HyperbolicRegion(1.5, 2))


def test_dyadic_examples():
    assert dyadic_intervals(2, 8) == [(2, 4), (4, 8)]
    assert dyadic_intervals(2, 10) == [(2, 4), (4, 8), (8, 10)]
    cov = dyadic_cover((10, 10**6), (10, 10**6))
    assert len(cov) <= math.ceil(math.log2(10**5)) ** 2
    with pytest.raises(InvalidArgument):
        dyadic_intervals(0, 4)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.integers(1, 200), st.integers(1, 40), st.integers(1, 200))
def test_dyadic_tiles_product(a, da, c, dc):
    pieces = dyadic_cover((a, a + da), (c, c + dc)).pieces(cap=10**9)
    for n in range(a - 1, a + da + 2):
        for m in (c, c + 1, (2 * c + dc) // 2, c + dc, c + dc + 1):
            hits = sum(p.contains(n, m) for p in pieces)
            assert hits == int(a < n <= a + da and c < m <= c + dc)


def test_equal_width_example():
    cov = build_equal_width_cover(10**4, 9, Fraction(1, 2))
    assert cov.H == list(range(3, 33))
    assert all(hi - lo == 3 for lo, hi in zip(cov.I_lo, cov.I_hi))
    assert cov.I_lo[0] == 9 and cov.I_hi[-1] == 99
    d = json.loads(cov.to_json())
    assert d["H"] == cov.H and d["I"][0] == [9, 12] and d["J"][0] == [9, 833]


def _cover_cases():
    for T in (10**3, 10**4):
        for z in (4, 9, 25):
            for delta in (Fraction(1, 4), Fraction(1, 2)):
                if Fraction(z) ** delta.denominator < Fraction(T) ** delta.numerator:
                    yield T, z, delta


@pytest.mark.parametrize("T, z, delta", list(_cover_cases()))
def test_equal_width_partition(T, z, delta):
    cov = build_equal_width_cover(T, z, delta)
    pieces = cov.rect_pieces() + cov.sliver_pieces() + cov.leftover_pieces()
    n_top = floor_root(T, delta.numerator, delta.denominator)
    assert n_top == cov.n_top
    for n in range(1, n_top + 3):
        for m in range(1, T // n + 3):
            inside = z < n <= n_top and m > z and n * m <= T
            hits = sum(p.contains(n, m) for p in pieces)
            assert hits == int(inside), (n, m, cov.locate(n, m))


@pytest.mark.parametrize("T, z, delta", list(_cover_cases()))
def test_sliver_bound(T, z, delta):
    cov = build_equal_width_cover(T, z, delta)
    total = 0
    for k, lo, hi, jh, jph in zip(cov.H, cov.I_lo, cov.I_hi, cov.J_hi, cov.Jp_hi):
        # the measure of I_k x J'_k is exactly T/(k(k+1)); the lattice count
        # can exceed it only by the floor slack along the two sides
        area = T / (k * (k + 1))
        size = (hi - lo) * (jph - jh)
        assert size <= area + math.sqrt(z) + area / math.sqrt(z) + 1
        total += area
    if cov.H:
        assert total <= T / cov.H[0]


def test_equal_width_errors():
    with pytest.raises(InvalidArgument):
        build_equal_width_cover(10**4, 100, 0.5)
    with pytest.raises(InvalidArgument):
        build_equal_width_cover(10**4, 9, 0.75)
    with pytest.raises(InvalidArgument):
        build_equal_width_cover(10**4, 1, 0.5)


def test_piece_points_respect_cap():
    p = Piece("x", 0, 10, 0, 10, 20)
    pts = list(p.points())
    assert all(n * m <= 20 for n, m in pts)
    assert len(pts) == sum(min(10, 20 // n) for n in range(1, 11))
