"""Bilinear Jacobi sums over clipped rectangles and hyperbolic regions.

Two engines share one traversal: an exact int64 engine for coefficients in
{-1, 0, 1} with c = 0 and no phase, and a floating engine with per-chunk
Neumaier summation.  Work is split into contiguous n-chunks; chunk results
are merged in chunk order, so exact results do not depend on the partition.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .arith import InvalidArgument, jacobi_nb
from .regions import EqualWidthCover, HyperbolicRegion, Piece, floor_real, floor_sqrt
from .sequences import BoundedSequence
from .sieve import SieveTable

EXACT = "exact_integer"
FLOATING = "floating"

_INT64_SAFE = 1 << 62


def default_workers() -> int:
    return int(os.environ.get("JACOBISUMS_THREADS", "1") or 1)


@dataclass
class SumResult:
    value: object
    terms: int
    mode: str
    overflow: bool = False

    @property
    def real(self) -> float:
        return float(complex(self.value).real)

    def __add__(self, other: "SumResult") -> "SumResult":
        return _combine(self, other, +1)

    def __sub__(self, other: "SumResult") -> "SumResult":
        return _combine(self, other, -1)

    def record(self) -> dict:
        v = complex(self.value)
        return {"value_re": int(self.value) if self.mode == EXACT else v.real,
                "value_im": 0 if self.mode == EXACT else v.imag,
                "terms": self.terms, "mode": self.mode}


def _combine(a: SumResult, b: SumResult, sign: int) -> SumResult:
    mode = EXACT if a.mode == b.mode == EXACT else FLOATING
    if mode == EXACT:
        value = int(a.value) + sign * int(b.value)
    else:
        value = complex(a.value) + sign * complex(b.value)
    return SumResult(value, a.terms + sign * b.terms, mode, a.overflow or b.overflow)


@njit(cache=True)
def _chunk_bounds(n_lo, n_hi, parts):
    span = n_hi - n_lo
    out = np.empty(parts + 1, dtype=np.int64)
    for i in range(parts + 1):
        out[i] = n_lo + (span * i) // parts
    return out


@njit(cache=True, parallel=True)
def _kernel_int(a, b, nmask, mmask, mcount, n_lo, n_hi, m_lo, m_hi, cap, parts):
    bounds = _chunk_bounds(n_lo, n_hi, parts)
    vals = np.zeros(parts, dtype=np.int64)
    cnts = np.zeros(parts, dtype=np.int64)
    for c in prange(parts):
        acc = 0
        cnt = 0
        for n in range(bounds[c] + 1, bounds[c + 1] + 1):
            if not nmask[n]:
                continue
            top = cap // n
            if top > m_hi:
                top = m_hi
            if top <= m_lo:
                continue
            cnt += mcount[top] - mcount[m_lo]
            an = a[n]
            if an == 0:
                continue
            inner = 0
            for m in range(m_lo + 1, top + 1):
                if mmask[m]:
                    bm = b[m]
                    if bm != 0:
                        inner += bm * jacobi_nb(n, m)
            acc += an * inner
        vals[c] = acc
        cnts[c] = cnt
    return vals, cnts


@njit(cache=True, parallel=True)
def _kernel_complex(a, b, nmask, mmask, mcount, n_lo, n_hi, m_lo, m_hi, cap, parts):
    bounds = _chunk_bounds(n_lo, n_hi, parts)
    re = np.zeros(parts)
    im = np.zeros(parts)
    cnts = np.zeros(parts, dtype=np.int64)
    for c in prange(parts):
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        cnt = 0
        for n in range(bounds[c] + 1, bounds[c + 1] + 1):
            if not nmask[n]:
                continue
            top = cap // n
            if top > m_hi:
                top = m_hi
            if top <= m_lo:
                continue
            cnt += mcount[top] - mcount[m_lo]
            an = a[n]
            if an == 0:
                continue
            for m in range(m_lo + 1, top + 1):
                if mmask[m]:
                    bm = b[m]
                    if bm != 0:
                        j = jacobi_nb(n, m)
                        if j != 0:
                            t = an * bm * j
                            # Neumaier compensated update, real and imaginary separately
                            x = t.real
                            s = sr + x
                            if abs(sr) >= abs(x):
                                cr += (sr - s) + x
                            else:
                                cr += (x - s) + sr
                            sr = s
                            x = t.imag
                            s = si + x
                            if abs(si) >= abs(x):
                                ci += (si - s) + x
                            else:
                                ci += (x - s) + si
                            si = s
        re[c] = sr + cr
        im[c] = si + ci
        cnts[c] = cnt
    return re, im, cnts


class SumEngine:
    """Caches filters and coefficient arrays for one sieve table."""

    def __init__(self, table: SieveTable, workers: int | None = None):
        self.table = table
        self.workers = max(1, int(workers or default_workers()))
        self._counts = {}

    def _mmask(self, restriction):
        key = "odd" if restriction == "all" else restriction
        mask = self.table.mask(key)
        if key not in self._counts:
            self._counts[key] = np.concatenate(([0], np.cumsum(mask[1:], dtype=np.int64)))
        return mask, self._counts[key]

    def piece_sum(self, piece: Piece, a, b, restriction="odd_squarefree", c=0.0,
                  t_phase=0.0, parts=None) -> SumResult:
        """Sum of (nm)^(c + i t) a_n b_m (n/m) over one clipped rectangle.

        ``a`` and ``b`` are BoundedSequence objects or precomputed value
        arrays covering the piece.
        """
        parts = max(1, int(parts or self.workers))
        top = max(piece.n_hi, piece.m_hi)
        if top > self.table.range_end:
            raise InvalidArgument(f"piece reaches {top} beyond sieve limit {self.table.range_end}")
        if piece.is_empty:
            exact = c == 0 and t_phase == 0 and _integral(a) and _integral(b)
            return SumResult(0 if exact else 0j, 0, EXACT if exact else FLOATING)
        av = _values(a, top)
        bv = _values(b, top)
        nmask = self.table.mask(restriction)
        mmask, mcount = self._mmask(restriction)
        args = (piece.n_lo, piece.n_hi, piece.m_lo, piece.m_hi, piece.cap)
        nthreads = min(parts, numba.config.NUMBA_NUM_THREADS)
        numba.set_num_threads(nthreads)
        exact = (c == 0 and t_phase == 0 and av.dtype == np.int64 and bv.dtype == np.int64)
        overflow = False
        if exact and _pair_bound(piece) >= _INT64_SAFE:
            exact, overflow = False, True
        if exact:
            vals, cnts = _kernel_int(av, bv, nmask, mmask, mcount, *args, parts)
            value = 0
            for v in vals:
                value += int(v)
            return SumResult(value, int(cnts.sum()), EXACT)
        aw = _twist(av, c, t_phase)
        bw = _twist(bv, c, t_phase)
        re, im, cnts = _kernel_complex(aw, bw, nmask, mmask, mcount, *args, parts)
        value = complex(math.fsum(re), math.fsum(im))
        return SumResult(value, int(cnts.sum()), FLOATING, overflow)


def _integral(x) -> bool:
    if isinstance(x, BoundedSequence):
        return x.is_integral
    return np.asarray(x).dtype.kind in "iub"


def _values(x, upto):
    if isinstance(x, BoundedSequence):
        return x.values(upto)
    arr = np.asarray(x)
    if arr.shape[0] <= upto:
        raise InvalidArgument("coefficient array shorter than the piece")
    if arr.dtype.kind in "iub":
        return arr.astype(np.int64)
    return arr.astype(np.complex128)


def _twist(v, c, t):
    n = np.arange(v.shape[0], dtype=np.float64)
    n[0] = 1.0
    w = v.astype(np.complex128)
    if c != 0:
        w = w * n**c
    if t != 0:
        w = w * np.exp(1j * t * np.log(n))
    return w


def _pair_bound(piece: Piece) -> int:
    # crude count of lattice points; |value| <= terms
    rows = piece.n_hi - piece.n_lo
    return rows * min(piece.m_hi - piece.m_lo, piece.cap)


def _engine(table, workers):
    return table if isinstance(table, SumEngine) else SumEngine(table, workers)


def hyperbolic_sum(r: HyperbolicRegion, a, b, c: float = 0.0, table=None,
                   workers: int | None = None) -> SumResult:
    """Sum of (nm)^c a_n b_m (n/m) over z < n, m <= T, nm <= T."""
    eng = _engine(table, workers)
    if eng.table.range_end < r.Tn:
        raise InvalidArgument(f"sieve table covers {eng.table.range_end} < floor(T)={r.Tn}")
    return eng.piece_sum(r.piece(), a, b, r.restriction, c)


def pieces_sum(pieces, a, b, restriction="odd_squarefree", c=0.0, table=None,
               workers=None) -> dict:
    """Per-piece results plus their signed total under key 'total'."""
    eng = _engine(table, workers)
    out = {}
    total = None
    for p in pieces:
        res = eng.piece_sum(p, a, b, restriction, c)
        out[p.name] = res
        signed = res if p.sign > 0 else SumResult(0, 0, res.mode) - res
        total = signed if total is None else total + signed
    out["total"] = total
    return out


def rect_sum(n_interval, m_interval, a, b, c=0.0, t_phase=0.0, table=None, *,
             restriction="odd_squarefree", hyperbolic_cap=None, normalize=False,
             workers=None) -> SumResult:
    """Sum of (nm)^(c + i t) a_n b_m (n/m) over (n0, n1] x (m0, m1].

    With ``normalize`` the weights become (n/n1)^c (m/m1)^c, i.e. the sum is
    divided by (n1 m1)^c; for a dyadic box that is the 4NM scaling.
    """
    eng = _engine(table, workers)
    n0, n1 = (floor_real(x) for x in n_interval)
    m0, m1 = (floor_real(x) for x in m_interval)
    cap = floor_real(hyperbolic_cap) if hyperbolic_cap is not None else n1 * m1
    res = eng.piece_sum(Piece("rect", n0, n1, m0, m1, cap), a, b, restriction, c, t_phase)
    if normalize and c != 0:
        scale = (float(n1) * float(m1)) ** c
        res = SumResult(complex(res.value) / scale, res.terms, FLOATING, res.overflow)
    return res


@dataclass
class CoverBreakdown:
    rectangles: SumResult
    slivers: SumResult
    leftover: SumResult
    direct: SumResult
    rect_count: int

    @property
    def total(self) -> SumResult:
        return self.rectangles + self.slivers + self.leftover

    @property
    def exact_match(self) -> bool:
        t = self.total
        if t.mode == EXACT and self.direct.mode == EXACT:
            return t.value == self.direct.value and t.terms == self.direct.terms
        return (abs(complex(t.value) - complex(self.direct.value))
                <= 1e-9 * max(1.0, abs(complex(self.direct.value))))

    def record(self) -> dict:
        return {"rectangles": self.rectangles.record(), "slivers": self.slivers.record(),
                "leftover": self.leftover.record(), "direct": self.direct.record(),
                "rect_count": self.rect_count, "exact_match": self.exact_match}


def _sum_all(eng, pieces, a, b, restriction, c):
    total = SumResult(0, 0, EXACT)
    for p in pieces:
        total = total + eng.piece_sum(p, a, b, restriction, c)
    return total


def cover_recomposition_sum(cover: EqualWidthCover, a, b, c=0.0, table=None,
                            restriction="odd_squarefree", workers=None) -> CoverBreakdown:
    eng = _engine(table, workers)
    if eng.table.range_end < cover.Tn:
        raise InvalidArgument("sieve table does not cover the cover's T")
    rect = _sum_all(eng, cover.rect_pieces(), a, b, restriction, c)
    sliv = _sum_all(eng, cover.sliver_pieces(), a, b, restriction, c)
    left = _sum_all(eng, cover.leftover_pieces(), a, b, restriction, c)
    direct = eng.piece_sum(cover.target_piece(), a, b, restriction, c)
    return CoverBreakdown(rect, sliv, left, direct, len(cover.H))


@dataclass
class HyperbolaSplit:
    N1: SumResult
    N2: SumResult
    N3: SumResult

    @property
    def total(self) -> SumResult:
        return self.N1 + self.N2 - self.N3


def hyperbola_method_sum(T, table=None, workers=None) -> HyperbolaSplit:
    """N1 + N2 - N3 over odd n, m with nm <= T (no squarefree filter)."""
    eng = _engine(table, workers)
    Tn = floor_real(T)
    if eng.table.range_end < Tn:
        raise InvalidArgument(f"sieve table covers {eng.table.range_end} < floor(T)={Tn}")
    s = floor_sqrt(T)
    one = np.ones(Tn + 1, dtype=np.int64)
    n1 = eng.piece_sum(Piece("N1", 0, s, 0, Tn, Tn), one, one, "odd")
    n2 = eng.piece_sum(Piece("N2", 0, Tn, 0, s, Tn), one, one, "odd")
    n3 = eng.piece_sum(Piece("N3", 0, s, 0, s, Tn), one, one, "odd")
    return HyperbolaSplit(n1, n2, n3)


def square_n_main_term(T, table: SieveTable) -> float:
    """(T/2) * sum over odd k <= T^{1/4} of phi(k^2)/k^4, using phi(k^2) = k phi(k)."""
    from .regions import floor_root
    K = floor_root(T, 1, 4)
    table.check(max(K, 1))
    return float(T) / 2 * odd_phi_series(table, K)


def odd_phi_series(table: SieveTable, K: int) -> float:
    """sum_{odd k <= K} phi(k^2)/k^4 = sum phi(k)/k^3."""
    k = np.arange(1, K + 1, 2, dtype=np.float64)
    phi = table.phi[1 : K + 1 : 2].astype(np.float64)
    return math.fsum(phi / k**3)


def result_record(experiment: str, res: SumResult, **params) -> dict:
    rec = {"experiment": experiment}
    rec.update(params)
    rec.update(res.record())
    return rec


__all__ = [
    "SumResult", "SumEngine", "hyperbolic_sum", "rect_sum", "cover_recomposition_sum",
    "hyperbola_method_sum", "square_n_main_term", "odd_phi_series", "pieces_sum",
    "CoverBreakdown", "HyperbolaSplit", "result_record", "EXACT", "FLOATING",
]
