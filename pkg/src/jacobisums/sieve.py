"""Segmented sieve for mu, phi and smallest prime factor on [1, limit].

Arrays are indexed directly by n; slot 0 is a zero placeholder.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .arith import InvalidArgument, primes_upto

DEFAULT_MEMORY_BUDGET = 4 * 1024**3
_BYTES_PER_ENTRY = 1 + 8 + 4  # mu int8, phi int64, spf int32

_MAGIC = b"JSSV"
_VERSION = 1
_HEADER = struct.Struct("<4sIQ")


class ResourceLimitError(MemoryError):
    """The requested table would exceed the configured memory budget."""


@dataclass(frozen=True, eq=False)
class SieveTable:
    range_start: int
    range_end: int
    mu: np.ndarray
    phi: np.ndarray
    spf: np.ndarray
    _masks: dict = field(default_factory=dict, repr=False)

    @property
    def limit(self) -> int:
        return self.range_end

    def check(self, n: int) -> None:
        if not (self.range_start <= n <= self.range_end):
            raise InvalidArgument(f"{n} outside sieve range [{self.range_start}, {self.range_end}]")

    def mask(self, restriction: str) -> np.ndarray:
        """Boolean filter over 0..limit for 'odd_squarefree', 'odd' or 'all'."""
        key = restriction
        if key not in self._masks:
            idx = np.arange(self.range_end + 1)
            if restriction == "odd_squarefree":
                m = (idx & 1).astype(bool) & (self.mu != 0)
            elif restriction == "odd":
                m = (idx & 1).astype(bool)
            elif restriction == "all":
                m = idx >= 1
            else:
                raise InvalidArgument(f"unknown restriction {restriction!r}")
            m.setflags(write=False)
            self._masks[key] = m
        return self._masks[key]

    def factor(self, n: int) -> list[int]:
        """Distinct prime factors of n, ascending."""
        self.check(n)
        out = []
        while n > 1:
            p = int(self.spf[n])
            out.append(p)
            while n % p == 0:
                n //= p
        return out

    def same_as(self, other: "SieveTable") -> bool:
        return (
            self.range_end == other.range_end
            and np.array_equal(self.mu, other.mu)
            and np.array_equal(self.phi, other.phi)
            and np.array_equal(self.spf, other.spf)
        )


def _sieve_segment(lo, hi, base_primes, mu, phi, spf):
    idx = np.arange(lo, hi + 1, dtype=np.int64)
    rem = idx.copy()
    m = np.ones(idx.size, dtype=np.int8)
    ph = idx.copy()
    sp = np.zeros(idx.size, dtype=np.int32)
    for p in base_primes:
        p = int(p)
        if p > hi:
            break
        start = -(-lo // p) * p
        if start > hi:
            continue
        sl = slice(start - lo, None, p)
        s = sp[sl]
        s[s == 0] = p
        sp[sl] = s
        m[sl] *= -1
        ph[sl] = ph[sl] // p * (p - 1)
        rem[sl] //= p
        pk = p * p
        while pk <= hi:
            start = -(-lo // pk) * pk
            sl = slice(start - lo, None, pk)
            m[sl] = 0
            rem[sl] //= p
            pk *= p
    big = rem > 1
    m[big] *= -1
    ph[big] = ph[big] // rem[big] * (rem[big] - 1)
    unset = big & (sp == 0)
    sp[unset] = rem[unset]
    if lo == 1:
        sp[0] = 1
    mu[lo : hi + 1] = m
    phi[lo : hi + 1] = ph
    spf[lo : hi + 1] = sp


def build_sieve(limit: int, segment_size: int = 1 << 20,
                memory_budget: int = DEFAULT_MEMORY_BUDGET) -> SieveTable:
    """Build mu, phi and spf on [1, limit] one segment at a time.

    The output does not depend on ``segment_size``; it only bounds the
    working arrays of a single pass.
    """
    limit = int(limit)
    segment_size = int(segment_size)
    if limit < 1 or segment_size < 1:
        raise InvalidArgument("limit and segment_size must be positive")
    need = (limit + 1) * _BYTES_PER_ENTRY + 6 * 8 * min(segment_size, limit)
    if need > memory_budget:
        raise ResourceLimitError(f"sieve to {limit} needs ~{need} bytes, budget {memory_budget}")
    mu = np.zeros(limit + 1, dtype=np.int8)
    phi = np.zeros(limit + 1, dtype=np.int64)
    spf = np.zeros(limit + 1, dtype=np.int32)
    base = primes_upto(math.isqrt(limit))
    for lo in range(1, limit + 1, segment_size):
        _sieve_segment(lo, min(lo + segment_size - 1, limit), base, mu, phi, spf)
    for a in (mu, phi, spf):
        a.setflags(write=False)
    return SieveTable(1, limit, mu, phi, spf)


def is_odd_squarefree(table: SieveTable, n: int) -> bool:
    table.check(n)
    return bool(n & 1) and bool(table.mu[n] != 0)


def count_coprime_odd_upto(table: SieveTable, n: int, x) -> int:
    """Exact count of odd m <= x with gcd(m, n) = 1 (inclusion-exclusion over rad(2n))."""
    if x < 0:
        raise InvalidArgument("x must be nonnegative")
    primes = [2] + [p for p in table.factor(int(n)) if p != 2]
    X = math.floor(x)
    total = 0
    # squarefree divisors d of rad(2n) with their Mobius signs
    divs = [(1, 1)]
    for p in primes:
        divs += [(d * p, -s) for d, s in divs]
    for d, s in divs:
        total += s * (X // d)
    return total


def save_sieve(table: SieveTable, path) -> None:
    """Write the table as header + packed little-endian arrays, atomically."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_HEADER.pack(_MAGIC, _VERSION, table.range_end))
            fh.write(table.mu.astype("<i1").tobytes())
            fh.write(table.phi.astype("<i8").tobytes())
            fh.write(table.spf.astype("<i4").tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_sieve(path) -> SieveTable:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, limit = _HEADER.unpack_from(raw, 0)
    if magic != _MAGIC or version != _VERSION:
        raise ValueError(f"{path}: not a sieve cache (magic={magic!r}, version={version})")
    off = _HEADER.size
    n = limit + 1
    expected = off + n * _BYTES_PER_ENTRY
    if len(raw) != expected:
        raise ValueError(f"{path}: truncated sieve cache ({len(raw)} != {expected} bytes)")
    mu = np.frombuffer(raw, "<i1", n, off).astype(np.int8)
    phi = np.frombuffer(raw, "<i8", n, off + n).astype(np.int64)
    spf = np.frombuffer(raw, "<i4", n, off + 9 * n).astype(np.int32)
    for a in (mu, phi, spf):
        a.setflags(write=False)
    return SieveTable(1, int(limit), mu, phi, spf)
