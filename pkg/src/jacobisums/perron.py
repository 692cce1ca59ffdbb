"""Truncated Perron integral for the indicator 1(nm <= tau).

    (1/pi) * int_{-R}^{R} (nm)^{it} sin(t log tau) / t dt

The real part is (2/pi) int_0^R cos(t log nm) sin(t log tau)/t dt.  It is
integrated panel by panel between consecutive zeros of sin(t log tau), and
neighbouring panels (which alternate in sign) are added pairwise before the
final sum.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .arith import InvalidArgument
from .output import atomic_write_text


class QuadratureError(ArithmeticError):
    """Panel quadrature did not reach the requested tolerance."""


def half_integer_shift(T) -> tuple[float, float]:
    """tau = T + theta with tau in Z + 1/2 and theta in [-1/2, 1/2]; ties go to +1/2."""
    if T < 2:
        raise InvalidArgument("half_integer_shift needs T >= 2")
    tau = math.floor(T) + 0.5
    return tau, tau - T


def f_tau(t, tau):
    """sin(t log tau)/t with the removable value log tau at t = 0."""
    b = math.log(tau)
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(t == 0, b, np.sin(b * t) / np.where(t == 0, 1.0, t))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PerronConfig:
    tau: float
    R: float = 1e3
    quadrature: str = "gauss_legendre"
    nodes: int = 16
    tolerance: float = 1e-6

    def __post_init__(self):
        if self.tau <= 1 or self.R <= 0:
            raise InvalidArgument("PerronConfig needs tau > 1 and R > 0")
        if self.quadrature not in ("gauss_legendre", "adaptive_simpson"):
            raise InvalidArgument(f"unknown quadrature {self.quadrature!r}")

    def with_R(self, R) -> "PerronConfig":
        return PerronConfig(self.tau, R, self.quadrature, self.nodes, self.tolerance)


def _panel_edges(a, b, R):
    h = math.pi / b
    sub = max(1, math.ceil(a / b))
    full = int(R // h)
    edges = np.arange(full * sub + 1, dtype=np.float64) * (h / sub)
    if R - edges[-1] > 1e-12 * R:
        edges = np.append(edges, R)
    return edges


def _gl_panels(a, b, edges, nodes):
    x, w = np.polynomial.legendre.leggauss(nodes)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = mid[:, None] + half[:, None] * x[None, :]
    even = np.cos(a * t) * np.sin(b * t) / t
    odd = np.sin(a * t) * np.sin(b * t) / t
    # mirrored nodes on [-R, 0]: the odd part cancels against its reflection
    odd_neg = np.sin(-a * t) * np.sin(-b * t) / (-t)
    re = (even * w).sum(axis=1) * half
    im = ((odd + odd_neg) * w).sum(axis=1) * half
    return re, im


def _simpson_panel(g, lo, hi, tol, depth=0):
    def simpson(a, fa, m, fm, b, fb):
        return (b - a) / 6.0 * (fa + 4 * fm + fb)

    fa, fb = g(lo), g(hi)
    m = 0.5 * (lo + hi)
    fm = g(m)
    stack = [(lo, fa, m, fm, hi, fb, simpson(lo, fa, m, fm, hi, fb), tol, 0)]
    total = 0.0
    while stack:
        a, fa, m, fm, b, fb, whole, eps, d = stack.pop()
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = g(lm), g(rm)
        left = simpson(a, fa, lm, flm, m, fm)
        right = simpson(m, fm, rm, frm, b, fb)
        if abs(left + right - whole) <= 15 * eps:
            total += left + right + (left + right - whole) / 15.0
        elif d > 40:
            raise QuadratureError(f"adaptive Simpson depth exceeded on [{a}, {b}]")
        else:
            stack.append((a, fa, lm, flm, m, fm, left, eps / 2, d + 1))
            stack.append((m, fm, rm, frm, b, fb, right, eps / 2, d + 1))
    return total


def _pairwise_total(panels) -> float:
    p = np.asarray(panels, dtype=np.float64)
    if p.size % 2:
        p = np.append(p, 0.0)
    return math.fsum(p[0::2] + p[1::2])


def perron_indicator(nm, cfg: PerronConfig) -> float:
    """Quadrature value of the truncated Perron integral at the integer nm."""
    if nm < 1:
        raise InvalidArgument("nm must be >= 1")
    a, b = math.log(nm), math.log(cfg.tau)
    edges = _panel_edges(a, b, cfg.R)
    if cfg.quadrature == "gauss_legendre":
        re, im = _gl_panels(a, b, edges, cfg.nodes)
        re2, _ = _gl_panels(a, b, edges, 2 * cfg.nodes)
        value = _pairwise_total(re2)
        drift = abs(value - _pairwise_total(re))
        if drift > cfg.tolerance:
            raise QuadratureError(
                f"Gauss-Legendre drift {drift:.3e} > {cfg.tolerance:.1e} "
                f"(nm={nm}, tau={cfg.tau}, R={cfg.R}, panels={edges.size - 1})")
        imag = abs(_pairwise_total(im))
        if imag > cfg.tolerance:
            raise QuadratureError(f"odd part integrates to {imag:.3e}")
    else:
        def g(t):
            return b if t == 0 else math.cos(a * t) * math.sin(b * t) / t
        eps = cfg.tolerance / (edges.size - 1)
        value = _pairwise_total([_simpson_panel(g, lo, hi, eps)
                                 for lo, hi in zip(edges[:-1], edges[1:])])
    return 2.0 / math.pi * value


def predicted_bound(nm, tau, R) -> float:
    """R^-1 |log nm - log tau|^-1."""
    return 1.0 / (R * abs(math.log(nm) - math.log(tau)))


@dataclass(frozen=True)
class ScanRow:
    nm: int
    R: float
    value: float
    observed_error: float
    predicted_bound: float

    @property
    def ratio(self) -> float:
        return self.observed_error / self.predicted_bound

    @property
    def flagged(self) -> bool:
        return self.ratio > 5.0


def perron_error_scan(T, R_list, sample, cfg: PerronConfig | None = None) -> list[ScanRow]:
    """Observed |integral - indicator| against the predicted bound for each (nm, R)."""
    tau, _ = half_integer_shift(T)
    base = cfg or PerronConfig(tau)
    if base.tau != tau:
        base = PerronConfig(tau, base.R, base.quadrature, base.nodes, base.tolerance)
    rows = []
    for R in R_list:
        c = base.with_R(R)
        for nm in sample:
            nm = int(nm)
            if nm > 2 * T:
                raise InvalidArgument(f"sample nm={nm} exceeds 2T")
            v = perron_indicator(nm, c)
            exact = 1.0 if nm <= tau else 0.0
            rows.append(ScanRow(nm, float(R), v, abs(v - exact), predicted_bound(nm, tau, R)))
    return rows


def max_error_by_R(rows) -> dict:
    out = {}
    for r in rows:
        out[r.R] = max(out.get(r.R, 0.0), r.observed_error)
    return out


def scan_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["nm", "R", "observed_error", "predicted_bound", "ratio"])
    for r in rows:
        w.writerow([r.nm, repr(r.R), repr(r.observed_error), repr(r.predicted_bound), repr(r.ratio)])
    return buf.getvalue()


def write_scan_csv(rows, path) -> None:
    atomic_write_text(path, scan_csv(rows))
