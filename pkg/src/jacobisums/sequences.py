"""Bounded coefficient sequences a_n, b_m and the power weight (n/scale)^c."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .arith import InvalidArgument, first_prime_above, jacobi_nb, jacobi_symbol

KINDS = ("constant_one", "rademacher_random", "jacobi_character", "point_mass", "custom_table", "zero")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SEED_MIX = 0xD1B54A32D192ED03


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _splitmix64_array(x: np.ndarray) -> np.ndarray:
    x = x + np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def rademacher_sign(seed: int, n: int) -> int:
    """+1 or -1 as a pure function of (seed, n)."""
    key = (_splitmix64(seed & _MASK64) * _SEED_MIX + n) & _MASK64
    return -1 if _splitmix64(key) >> 63 else 1


def _rademacher_array(seed: int, upto: int) -> np.ndarray:
    key0 = np.uint64((_splitmix64(seed & _MASK64) * _SEED_MIX) & _MASK64)
    with np.errstate(over="ignore"):
        keys = key0 + np.arange(upto + 1, dtype=np.uint64)
        bits = _splitmix64_array(keys) >> np.uint64(63)
    return 1 - 2 * bits.astype(np.int64)


@dataclass(frozen=True)
class BoundedSequence:
    """A coefficient rule n -> value with |value| <= 1.

    ``param`` is the seed for rademacher_random and the prime for
    jacobi_character / point_mass.  custom_table carries ``table`` as a
    mapping n -> complex.
    """

    kind: str = "constant_one"
    param: int = 0
    table: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown sequence kind {self.kind!r}")
        if self.kind == "jacobi_character" and (self.param < 1 or self.param % 2 == 0):
            raise InvalidArgument("jacobi_character needs an odd positive modulus")
        if self.kind == "custom_table":
            tab = self.table or {}
            bad = [n for n, v in tab.items() if abs(v) > 1 + 1e-12]
            if bad:
                raise InvalidArgument(f"custom_table values exceed modulus 1 at n={bad[:5]}")

    @property
    def is_integral(self) -> bool:
        """True when every value lies in {-1, 0, 1}."""
        if self.kind != "custom_table":
            return True
        return all(complex(v) in (-1, 0, 1) for v in (self.table or {}).values())

    def describe(self) -> str:
        if self.kind in ("constant_one", "zero"):
            return self.kind
        if self.kind == "custom_table":
            return f"custom_table[{len(self.table or {})}]"
        return f"{self.kind}({self.param})"

    def values(self, upto: int) -> np.ndarray:
        """Values at n = 0..upto (slot 0 is 0); int64 if integral else complex128."""
        upto = int(upto)
        if self.kind == "constant_one":
            out = np.ones(upto + 1, dtype=np.int64)
        elif self.kind == "zero":
            out = np.zeros(upto + 1, dtype=np.int64)
        elif self.kind == "rademacher_random":
            out = _rademacher_array(self.param, upto)
        elif self.kind == "jacobi_character":
            out = _character_values(self.param, upto)
        elif self.kind == "point_mass":
            out = np.zeros(upto + 1, dtype=np.int64)
            if 1 <= self.param <= upto:
                out[self.param] = 1
        else:
            dtype = np.int64 if self.is_integral else np.complex128
            out = np.zeros(upto + 1, dtype=dtype)
            for n, v in (self.table or {}).items():
                if 1 <= n <= upto:
                    out[n] = v.real if dtype is np.int64 else v
        out[0] = 0
        return out


def _character_values(p: int, upto: int) -> np.ndarray:
    # (n/p) is periodic in n with period p
    period = np.array([jacobi_nb(r, p) for r in range(p)], dtype=np.int64)
    return period[np.arange(upto + 1) % p]


def eval_sequence(s: BoundedSequence, n: int):
    n = int(n)
    if n < 1:
        raise InvalidArgument("sequence index must be >= 1")
    k = s.kind
    if k == "constant_one":
        return 1
    if k == "zero":
        return 0
    if k == "rademacher_random":
        return rademacher_sign(s.param, n)
    if k == "jacobi_character":
        return jacobi_symbol(n, s.param)
    if k == "point_mass":
        return 1 if n == s.param else 0
    v = (s.table or {}).get(n, 0)
    return int(v.real) if s.is_integral else complex(v)


def constant_one() -> BoundedSequence:
    return BoundedSequence("constant_one")


def rademacher(seed: int) -> BoundedSequence:
    return BoundedSequence("rademacher_random", int(seed))


def jacobi_character(p: int) -> BoundedSequence:
    return BoundedSequence("jacobi_character", int(p))


def point_mass(p: int) -> BoundedSequence:
    return BoundedSequence("point_mass", int(p))


def adversarial_pair(z) -> tuple[BoundedSequence, BoundedSequence, int]:
    """a_n = (n/p), b_m = 1{m = p} for the first prime p > z."""
    p = first_prime_above(z)
    return jacobi_character(p), point_mass(p), p


def load_custom_table(path) -> BoundedSequence:
    """Read a CSV with columns n, re, im (header optional); missing n are 0."""
    tab = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("n", "#n") or row[0].startswith("#"):
                continue
            n = int(row[0])
            re = float(row[1]) if len(row) > 1 and row[1].strip() else 0.0
            im = float(row[2]) if len(row) > 2 and row[2].strip() else 0.0
            tab[n] = complex(re, im)
    return BoundedSequence("custom_table", table=tab)


@dataclass(frozen=True)
class PowerWeight:
    c: float
    scale: float

    def __post_init__(self):
        if self.c < 0 or self.scale <= 0:
            raise InvalidArgument("PowerWeight needs c >= 0 and scale > 0")


def normalized_weight(w: PowerWeight, n) -> float:
    """(n / scale)^c, which stays in [0, 1] for n <= scale."""
    if n > w.scale:
        raise InvalidArgument(f"n={n} exceeds weight scale {w.scale}")
    if w.c == 0:
        return 1.0
    return (n / w.scale) ** w.c
