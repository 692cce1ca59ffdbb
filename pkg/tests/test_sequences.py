import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobisums.arith import InvalidArgument
from jacobisums.sequences import (
    BoundedSequence,
    PowerWeight,
    adversarial_pair,
    constant_one,
    eval_sequence,
    jacobi_character,
    load_custom_table,
    normalized_weight,
    point_mass,
    rademacher,
    rademacher_sign,
)

from oracles import jacobi as oracle_jacobi

SEQS = [constant_one(), rademacher(0), rademacher(12345), jacobi_character(11),
        jacobi_character(15), point_mass(13), BoundedSequence("zero")]


@pytest.mark.parametrize("s", SEQS, ids=lambda s: s.describe())
def test_bounded_and_array_matches_scalar(s):
    v = s.values(500)
    assert v[0] == 0
    assert np.all(np.abs(v) <= 1)
    assert [eval_sequence(s, n) for n in range(1, 501)] == v[1:].tolist()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 2**40))
def test_rademacher_pure_function(seed, n):
    s = rademacher_sign(seed, n)
    assert s in (-1, 1)
    assert s == rademacher_sign(seed, n)


def test_rademacher_seeds_uncorrelated():
    a = rademacher(1).values(100_000)[1:]
    b = rademacher(2).values(100_000)[1:]
    assert abs(a.mean()) < 0.02
    assert abs(np.mean(a * b)) < 0.02
    assert np.array_equal(a, rademacher(1).values(100_000)[1:])


def test_character_matches_oracle():
    assert eval_sequence(jacobi_character(11), 2) == -1
    v = jacobi_character(21).values(200)
    assert [oracle_jacobi(n, 21) for n in range(1, 201)] == v[1:].tolist()


def test_point_mass_and_constant():
    assert eval_sequence(point_mass(11), 11) == 1
    assert eval_sequence(point_mass(11), 12) == 0
    assert eval_sequence(constant_one(), 10**12) == 1
    assert point_mass(11).values(5).sum() == 0


def test_adversarial_pair():
    a, b, p = adversarial_pair(100)
    assert p == 101
    assert a == jacobi_character(101) and b == point_mass(101)


def test_bad_kinds():
    with pytest.raises(InvalidArgument):
        BoundedSequence("gaussian")
    with pytest.raises(InvalidArgument):
        jacobi_character(10)
    with pytest.raises(InvalidArgument):
        eval_sequence(constant_one(), 0)


def test_normalized_weight():
    assert normalized_weight(PowerWeight(1.0, 100), 50) == pytest.approx(0.5)
    assert normalized_weight(PowerWeight(0.0, 100), 3) == 1.0
    with pytest.raises(InvalidArgument):
        normalized_weight(PowerWeight(1.0, 100), 101)
    with pytest.raises(InvalidArgument):
        PowerWeight(-1, 10)


def test_custom_table(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("n,re,im\n1,1,0\n3,-1,0\n4,0.6,0.8\n")
    s = load_custom_table(p)
    assert not s.is_integral
    v = s.values(5)
    assert v.dtype == np.complex128
    assert v[4] == pytest.approx(0.6 + 0.8j) and v[2] == 0
    assert eval_sequence(s, 3) == -1

    p.write_text("n,re,im\n1,1,0\n3,-1,0\n")
    s = load_custom_table(p)
    assert s.is_integral and s.values(4).tolist() == [0, 1, 0, -1, 0]

    p.write_text("n,re,im\n2,1.5,0\n")
    with pytest.raises(InvalidArgument):
        load_custom_table(p)
