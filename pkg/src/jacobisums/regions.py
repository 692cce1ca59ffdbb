"""Hyperbolic summation regions and their decompositions.

Every piece is a clipped rectangle: n in (n_lo, n_hi], m in (m_lo, m_hi],
nm <= cap, all bounds integers.  Real cut points are floored exactly, since
for integer n the conditions n > x and n > floor(x) coincide.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .arith import InvalidArgument
from .sieve import SieveTable

RESTRICTIONS = ("odd_squarefree", "odd", "all")


def floor_real(x) -> int:
    return math.floor(Fraction(x))


def floor_root(x, p: int, q: int) -> int:
    """Largest integer n >= 0 with n^q <= x^p, exact for rational x."""
    x = Fraction(x)
    target = x**p
    n = max(int(float(x) ** (p / q)) - 1, 0)
    while n > 0 and Fraction(n) ** q > target:
        n -= 1
    while Fraction(n + 1) ** q <= target:
        n += 1
    return n


def floor_sqrt(x) -> int:
    return floor_root(x, 1, 2)


def _rational_exponent(delta) -> Fraction:
    d = Fraction(delta).limit_denominator(64)
    if abs(float(d) - float(delta)) > 1e-12:
        raise InvalidArgument(f"delta={delta} must be a rational with denominator <= 64")
    return d


def log_cut(T) -> float:
    """T^{1/3} / log T with the natural logarithm."""
    T = float(T)
    return T ** (1.0 / 3.0) / math.log(T)


@dataclass(frozen=True)
class HyperbolicRegion:
    T: float
    z: float
    restriction: str = "odd_squarefree"

    def __post_init__(self):
        if self.T <= 0:
            raise InvalidArgument("T must be positive")
        if self.z < 0:
            raise InvalidArgument("z must be nonnegative")
        if self.restriction not in RESTRICTIONS:
            raise InvalidArgument(f"unknown restriction {self.restriction!r}")

    @property
    def Tn(self) -> int:
        return floor_real(self.T)

    def contains(self, n: int, m: int) -> bool:
        """Membership ignoring the odd/squarefree filter."""
        return self.z < n <= self.T and self.z < m <= self.T and n * m <= self.T

    def piece(self) -> "Piece":
        zf, Tn = floor_real(self.z), self.Tn
        return Piece("S", zf, Tn, zf, Tn, Tn)


@dataclass(frozen=True)
class Piece:
    """n in (n_lo, n_hi], m in (m_lo, m_hi], nm <= cap, weighted by sign."""

    name: str
    n_lo: int
    n_hi: int
    m_lo: int
    m_hi: int
    cap: int
    sign: int = 1

    @property
    def is_empty(self) -> bool:
        if self.n_hi <= self.n_lo or self.m_hi <= self.m_lo:
            return True
        return (self.n_lo + 1) * (self.m_lo + 1) > self.cap

    def contains(self, n: int, m: int) -> bool:
        return (self.n_lo < n <= self.n_hi and self.m_lo < m <= self.m_hi
                and n * m <= self.cap)

    def points(self) -> Iterator[tuple[int, int]]:
        for n in range(self.n_lo + 1, self.n_hi + 1):
            top = min(self.m_hi, self.cap // n)
            for m in range(self.m_lo + 1, top + 1):
                yield n, m

    def to_dict(self) -> dict:
        return {"name": self.name, "n": [self.n_lo, self.n_hi], "m": [self.m_lo, self.m_hi],
                "cap": self.cap, "sign": self.sign}


def enumerate_region(r: HyperbolicRegion, table: SieveTable) -> Iterator[tuple[int, int]]:
    """Lattice points of the region under its restriction, n-major ascending.

    m is always odd (the symbol needs an odd modulus), also for 'all'.
    """
    if table.range_end < r.Tn:
        raise InvalidArgument(f"sieve table covers {table.range_end} < floor(T)={r.Tn}")
    nmask = table.mask(r.restriction)
    mmask = table.mask("odd" if r.restriction == "all" else r.restriction)
    for n, m in r.piece().points():
        if nmask[n] and mmask[m]:
            yield n, m


def _four_way(r: HyperbolicRegion, cut: int, prefix: str) -> list[Piece]:
    T, z = r.Tn, floor_real(r.z)
    c = max(cut, z)
    return [
        Piece(prefix + "1", c, T, c, T, T, +1),
        Piece(prefix + "2", z, c, z, T, T, +1),
        Piece(prefix + "3", z, T, z, c, T, +1),
        Piece(prefix + "4", z, c, z, c, T, -1),
    ]


def split_S(r: HyperbolicRegion) -> list[Piece]:
    """S = S1 + S2 + S3 - S4 with z1 = max(z, T^{1/3}/log T)."""
    if r.T < 2 or r.z < 2:
        raise InvalidArgument("split_S needs T >= 2 and z >= 2")
    z1 = max(Fraction(r.z), Fraction(log_cut(r.T)))
    return _four_way(r, math.floor(z1), "S")


def split_R(r: HyperbolicRegion) -> list[Piece]:
    """R = R1 + R2 + R3 - R4 with the inner cut at T^{1/4}."""
    if r.T < 2 or r.z < 2:
        raise InvalidArgument("split_R needs T >= 2 and z >= 2")
    return _four_way(r, floor_root(r.T, 1, 4), "R")


def z1_of(T, z) -> float:
    return max(float(z), log_cut(T))


def dyadic_intervals(lo, hi) -> list[tuple]:
    """(lo, 2lo], (2lo, 4lo], ... with the last interval clipped at hi."""
    if lo < 1 or hi <= lo:
        raise InvalidArgument(f"dyadic range ({lo}, {hi}] must be nonempty with lo >= 1")
    out = []
    a = lo
    while a < hi:
        b = min(2 * a, hi)
        out.append((a, b))
        a = b
    return out


@dataclass(frozen=True)
class DyadicCover:
    rectangles: list

    def __len__(self):
        return len(self.rectangles)

    def pieces(self, cap: int | None = None) -> list[Piece]:
        out = []
        for (a, b), (c, d) in self.rectangles:
            out.append(Piece("D", floor_real(a), floor_real(b), floor_real(c), floor_real(d),
                             cap if cap is not None else floor_real(b) * floor_real(d)))
        return out


def dyadic_cover(n_range, m_range) -> DyadicCover:
    ns = dyadic_intervals(*n_range)
    ms = dyadic_intervals(*m_range)
    return DyadicCover([(a, b) for a in ns for b in ms])


@dataclass(frozen=True)
class EqualWidthCover:
    """Equal-width strips I_k of length sqrt(z) over (z, T^delta].

    All endpoints are stored as integers: I_k = (I_lo[k], I_hi[k]],
    J_k = (zf, J_hi[k]], L_k = {n in I_k, J_hi[k] < m <= T/n} and
    L = {n in L', zf < m <= T/n} where L' is a union of integer intervals.
    """

    T: object
    z: object
    delta: Fraction
    Tn: int
    zf: int
    n_top: int
    H: list
    I_lo: list
    I_hi: list
    J_hi: list
    Jp_hi: list
    L_prime: list = field(default_factory=list)

    def rect_pieces(self) -> list[Piece]:
        return [Piece(f"IJ{k}", lo, hi, self.zf, jh, self.Tn)
                for k, lo, hi, jh in zip(self.H, self.I_lo, self.I_hi, self.J_hi)]

    def sliver_pieces(self) -> list[Piece]:
        return [Piece(f"L{k}", lo, hi, jh, self.Tn, self.Tn)
                for k, lo, hi, jh in zip(self.H, self.I_lo, self.I_hi, self.J_hi)]

    def leftover_pieces(self) -> list[Piece]:
        return [Piece("L", a, b, self.zf, self.Tn, self.Tn) for a, b in self.L_prime]

    def target_piece(self) -> Piece:
        return Piece("target", self.zf, self.n_top, self.zf, self.Tn, self.Tn)

    def locate(self, n: int, m: int) -> list[str]:
        """Names of every cover set containing (n, m); used by partition checks."""
        hits = [p.name for p in self.rect_pieces() + self.sliver_pieces() + self.leftover_pieces()
                if p.contains(n, m)]
        return hits

    def to_json(self) -> str:
        return json.dumps({
            "T": str(self.T), "z": str(self.z), "delta": str(self.delta),
            "H": self.H,
            "I": [[a, b] for a, b in zip(self.I_lo, self.I_hi)],
            "J": [[self.zf, b] for b in self.J_hi],
            "J_prime": [[a, b] for a, b in zip(self.J_hi, self.Jp_hi)],
            "L_prime": [list(x) for x in self.L_prime],
        })


def build_equal_width_cover(T, z, delta) -> EqualWidthCover:
    """Cover of {n <= T^delta, n, m > z, nm <= T} by strips of width sqrt(z).

    H = {k : sqrt(z) <= k <= T^delta/sqrt(z) - 1} is decided with exact
    rational arithmetic: k^2 >= z and ((k+1)^2 z)^q <= T^(2p) for delta = p/q.
    """
    d = _rational_exponent(delta)
    if not (0 < d <= Fraction(1, 2)):
        raise InvalidArgument("delta must lie in (0, 1/2]")
    Tq, zq = Fraction(T), Fraction(z)
    p, q = d.numerator, d.denominator
    if zq < 2:
        raise InvalidArgument("z must be >= 2")
    if zq**q >= Tq**p:
        raise InvalidArgument(f"need z < T^delta (z={z}, T={T}, delta={d})")

    Tn, zf = math.floor(Tq), math.floor(zq)
    n_top = floor_root(Tq, p, q)
    k = floor_sqrt(zq)
    if k * k < zq:
        k += 1
    H, I_lo, I_hi, J_hi, Jp_hi = [], [], [], [], []
    while ((k + 1) ** 2 * zq) ** q <= Tq ** (2 * p):
        H.append(k)
        I_lo.append(floor_sqrt(k * k * zq))
        I_hi.append(floor_sqrt((k + 1) ** 2 * zq))
        # m <= T / ((k+1) sqrt z)  <=>  m^2 <= T^2 / ((k+1)^2 z)
        J_hi.append(floor_sqrt(Tq * Tq / ((k + 1) ** 2 * zq)))
        Jp_hi.append(floor_sqrt(Tq * Tq / (k * k * zq)))
        k += 1
    if H:
        L_prime = [(a, b) for a, b in ((zf, I_lo[0]), (I_hi[-1], n_top)) if b > a]
    else:
        L_prime = [(zf, n_top)] if n_top > zf else []
    return EqualWidthCover(T, z, d, Tn, zf, n_top, H, I_lo, I_hi, J_hi, Jp_hi, L_prime)
