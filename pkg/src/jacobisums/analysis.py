"""Constants, lower-bound constructions and empirical bound checks.

Guard constants used here (ratio ceilings of 2, 5 and 20) are conventions of
this package for CI pass/fail; they are not claims about true constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import InvalidArgument, first_prime_above, jacobi_array
from .regions import HyperbolicRegion, floor_real
from .sequences import BoundedSequence, adversarial_pair, constant_one, rademacher
from .sieve import SieveTable, build_sieve
from .sums import SumEngine, SumResult, hyperbolic_sum, odd_phi_series

ZETA2 = math.pi**2 / 6


def zeta3(N: int = 200) -> float:
    """zeta(3) by direct summation to N plus an Euler-Maclaurin tail.

    Tail after N: 1/(2N^2) - 1/(2N^3) + 1/(4N^4) - 1/(12N^6), error O(N^-8).
    """
    head = math.fsum(1.0 / k**3 for k in range(N, 0, -1))
    tail = 1 / (2 * N**2) - 1 / (2 * N**3) + 1 / (4 * N**4) - 1 / (12 * N**6)
    return head + tail


def odd_square_constant() -> float:
    """6 zeta(2) / (7 zeta(3))."""
    return 6 * ZETA2 / (7 * zeta3())


def log_grid(K: int) -> list[int]:
    out, k = [], 1
    while k <= K:
        out.append(k)
        k *= 10
    if out[-1] != K:
        out.append(K)
    return out


@dataclass
class ConstantReport:
    zeta2: float
    zeta3: float
    euler_product_value: float
    series_partial: list
    lower_bound_constants: dict = field(default_factory=dict)

    def lower_bound_constant(self, p: int) -> float:
        return lower_bound_constant(p)

    def record(self) -> dict:
        return {"zeta2": self.zeta2, "zeta3": self.zeta3,
                "euler_product_value": self.euler_product_value,
                "series_partial": [[k, v] for k, v in self.series_partial]}


def euler_product_constant(precision_terms: int = 10_000, table: SieveTable | None = None,
                           grid=None) -> ConstantReport:
    """Closed-form constant and the odd partial sums of phi(k^2)/k^4 up to precision_terms."""
    K = int(precision_terms)
    if table is None or table.range_end < K:
        table = build_sieve(max(K, 1))
    z3 = zeta3()
    C = 6 * ZETA2 / (7 * z3)
    grid = grid or log_grid(K)
    partial = [(k, odd_phi_series(table, k)) for k in grid]
    return ConstantReport(ZETA2, z3, C, partial)


def lower_bound_constant(p: int) -> float:
    """Density 2 / (3 (1 + 1/p) zeta(2)) of n with mu^2(2pn) = 1."""
    return 2.0 / (3.0 * (1.0 + 1.0 / p) * ZETA2)


@dataclass
class LowerBoundReport:
    T: float
    z: float
    p: int
    observed: int
    terms: int
    predicted: float
    constant: float
    guard: float = 20.0

    @property
    def normalized_deviation(self) -> float:
        return abs(self.observed - self.predicted) / math.sqrt(self.T / self.p)

    @property
    def passed(self) -> bool:
        return self.normalized_deviation <= self.guard

    def record(self) -> dict:
        return {"experiment": "lower-bound", "T": self.T, "z": self.z, "p": self.p,
                "observed": self.observed, "terms": self.terms, "predicted": self.predicted,
                "constant": self.constant, "normalized_deviation": self.normalized_deviation,
                "guard": self.guard, "passed": self.passed}


def lower_bound_experiment(T, z, table, p: int | None = None, guard: float = 20.0,
                           workers=None) -> LowerBoundReport:
    """Exact sum for a_n = (n/p), b_m = 1{m = p}, p the first prime in (z, 2z]."""
    if z < 2:
        raise InvalidArgument("lower_bound_experiment needs z >= 2")
    if p is None:
        a, b, p = adversarial_pair(z)
    else:
        from .sequences import jacobi_character, point_mass
        a, b = jacobi_character(p), point_mass(p)
    if not (z < p <= 2 * z):
        raise InvalidArgument(f"prime {p} not in ({z}, {2 * z}]")
    res = hyperbolic_sum(HyperbolicRegion(T, z), a, b, 0.0, _eng(table, workers))
    const = lower_bound_constant(p)
    return LowerBoundReport(float(T), float(z), p, int(res.value), res.terms,
                            const * (float(T) / p - float(z)), const, guard)


def first_example_sum(T, table, workers=None) -> SumResult:
    """Sum of (n/m) over all odd n, m with nm <= T."""
    one = constant_one()
    return hyperbolic_sum(HyperbolicRegion(T, 0, "odd"), one, one, 0.0, _eng(table, workers))


def _eng(table, workers):
    return table if isinstance(table, SumEngine) else SumEngine(table, workers)


@dataclass
class MeanValueReport:
    variant: str
    M: int
    interval: tuple
    size: int
    L: object
    ratio: float
    guard: float

    @property
    def passed(self) -> bool:
        return self.variant != "Elliot" or self.ratio <= self.guard

    def record(self) -> dict:
        return {"experiment": "meanvalue", "variant": self.variant, "M": self.M,
                "interval": list(self.interval), "size": self.size,
                "L": self.L if isinstance(self.L, int) else float(self.L),
                "ratio": self.ratio, "guard": self.guard, "passed": self.passed}


def _jacobi_matrix(ms: np.ndarray, ns: np.ndarray) -> np.ndarray:
    mm, nn = np.meshgrid(ms, ns, indexing="ij")
    return jacobi_array(nn.ravel(), mm.ravel()).reshape(mm.shape).astype(np.int64)


def meanvalue_check(M: int, interval, a, table: SieveTable, variant: str = "Elliot",
                    guard: float = 2.0, epsilon: float = 0.1) -> list[MeanValueReport]:
    """L = sum*_{m<=M} |sum*_{n in I} a_n (n/m)|^2 and its ratio to the mean-value bound.

    ``interval`` is (lo, hi] with N = hi; ``a`` is one sequence or a list of
    them (the symbol matrix is shared).  |I| counts the integers in (lo, hi].
    Elliot ratio: L / ((M + N^2 ln N) |I|).  HB1 ratio: L / ((MN)^eps max(M, N) |I|).
    """
    if variant not in ("Elliot", "HB1"):
        raise InvalidArgument(f"unknown variant {variant!r}")
    lo, hi = (floor_real(x) for x in interval)
    M = int(M)
    if lo < 0 or hi <= lo:
        raise InvalidArgument("interval must be (lo, hi] with 0 <= lo < hi")
    table.check(max(M, hi))
    seqs = a if isinstance(a, (list, tuple)) else [a]
    mask = table.mask("odd_squarefree")
    ms = np.flatnonzero(mask[: M + 1])
    ns = lo + 1 + np.flatnonzero(mask[lo + 1 : hi + 1])
    J = _jacobi_matrix(ms, ns)
    N, size = hi, hi - lo
    if variant == "Elliot":
        denom = (M + N * N * math.log(N)) * size
    else:
        denom = (M * N) ** epsilon * max(M, N) * size
    out = []
    for s in seqs:
        vals = s.values(hi)[ns] if isinstance(s, BoundedSequence) else np.asarray(s)[ns]
        if vals.dtype.kind in "iu":
            inner = J @ vals.astype(np.int64)
            L = int((inner * inner).sum())
        else:
            inner = J.astype(np.complex128) @ vals.astype(np.complex128)
            L = float(math.fsum((inner.real**2 + inner.imag**2).tolist()))
        out.append(MeanValueReport(variant, M, (lo, hi), size, L, L / denom, guard))
    return out


# -- cancellation scans -------------------------------------------------------

def z_rule_from_name(name: str):
    """Map a rule name to T -> z (or a list of z).

    'quarter' gives T^{1/4}; 'log:A' gives (log T)^A; 'ladder' and 'dyadic'
    give the geometric sequences 2 * sqrt(2)^k and 2 * 2^k up to T^{1/4}.
    Anything else is read as a constant z.
    """
    if callable(name):
        return name
    if name == "quarter":
        return lambda T: float(T) ** 0.25
    if name.startswith("log:"):
        A = float(name[4:])
        return lambda T: math.log(T) ** A
    if name in ("ladder", "dyadic"):
        step = math.sqrt(2.0) if name == "ladder" else 2.0

        def ladder(T):
            top = float(T) ** 0.25
            zs, k = [], 0
            while True:
                z = 2.0 * step**k if step == 2.0 else 2.0 * 2.0 ** (k // 2) * (step if k % 2 else 1.0)
                if z > top:
                    return zs
                zs.append(z)
                k += 1
        return ladder
    c = float(name)
    return lambda T: c


@dataclass
class ScanPoint:
    T: float
    z: float
    seed: object
    value: int
    terms: int
    p: int | None = None

    @property
    def guard_ratio(self) -> float:
        return abs(self.value) * self.z**0.25 / (self.T * math.log(self.T))

    def record(self) -> dict:
        return {"T": self.T, "z": self.z, "seed": self.seed, "p": self.p, "value": self.value,
                "terms": self.terms, "guard_ratio": self.guard_ratio}


@dataclass
class ExponentFit:
    alpha_hat: float
    beta_hat: float
    intercept: float
    residuals: list
    config: dict
    points: list
    guard: float = 5.0

    @property
    def guard_max(self) -> float:
        return max(p.guard_ratio for p in self.points)

    @property
    def passed(self) -> bool:
        return self.guard_max <= self.guard

    def record(self) -> dict:
        return {"experiment": "cancellation-scan", "alpha_hat": self.alpha_hat,
                "beta_hat": self.beta_hat, "intercept": self.intercept,
                "residuals": self.residuals, "config": self.config,
                "guard": self.guard, "guard_max": self.guard_max, "passed": self.passed,
                "points": [p.record() for p in self.points]}


def fit_exponents(Ts, zs, values):
    """OLS of log|S| on [1, log T, log z]; the z column is dropped when collinear.

    Returns (alpha, beta, intercept, residuals, used_mask).  alpha is NaN
    when z is a function of T alone on the grid.
    """
    Ts, zs, v = (np.asarray(x, dtype=np.float64) for x in (Ts, zs, values))
    keep = np.abs(v) > 0
    y = np.log(np.abs(v[keep]))
    X = np.column_stack([np.ones(keep.sum()), np.log(Ts[keep]), np.log(zs[keep])])
    if np.linalg.matrix_rank(X, tol=1e-8 * max(1.0, np.abs(X).max())) < 3:
        coef, *_ = np.linalg.lstsq(X[:, :2], y, rcond=None)
        res = y - X[:, :2] @ coef
        return float("nan"), float(coef[1]), float(coef[0]), res.tolist(), keep
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    res = y - X @ coef
    return float(coef[2]), float(coef[1]), float(coef[0]), res.tolist(), keep


def cancellation_scan(T_grid, z_rule, seq_kind: str, seeds, table, guard: float = 5.0,
                      restriction: str = "odd_squarefree", workers=None) -> ExponentFit:
    """Exact hyperbolic sums over a (T, z, seed) grid with an exponent fit.

    seq_kind: 'one' (a = b = 1), 'rademacher' (a seeded 2s, b seeded 2s+1 per
    seed s) or 'adversarial' (a = (n/p), b = 1{m = p}, p first prime > z).
    """
    rule = z_rule_from_name(z_rule)
    eng = _eng(table, workers)
    pts = []
    for T in T_grid:
        zs = rule(T)
        zs = list(zs) if isinstance(zs, (list, tuple)) else [zs]
        for z in zs:
            if seq_kind == "rademacher":
                runs = [(s, rademacher(2 * s), rademacher(2 * s + 1), None) for s in seeds]
            elif seq_kind == "one":
                runs = [(None, constant_one(), constant_one(), None)]
            elif seq_kind == "adversarial":
                a, b, p = adversarial_pair(z)
                runs = [(None, a, b, p)]
            else:
                raise InvalidArgument(f"unknown seq_kind {seq_kind!r}")
            for seed, a, b, p in runs:
                r = hyperbolic_sum(HyperbolicRegion(T, z, restriction), a, b, 0.0, eng)
                pts.append(ScanPoint(float(T), float(z), seed, int(r.value), r.terms, p))
    if len(pts) < 3:
        raise InvalidArgument("cancellation_scan needs at least 3 grid points")
    alpha, beta, c0, res, _ = fit_exponents([p.T for p in pts], [p.z for p in pts],
                                            [p.value for p in pts])
    config = {"T_grid": [float(t) for t in T_grid],
              "z_rule": z_rule if isinstance(z_rule, str) else getattr(z_rule, "__name__", "custom"),
              "seq_kind": seq_kind, "seeds": list(seeds) if seeds else [],
              "restriction": restriction}
    return ExponentFit(alpha, beta, c0, res, config, pts, guard)


def plot_scan_svg(fit: ExponentFit, path) -> None:
    """Log-log plot of |S| against T with the fitted surface along the grid."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    pts = [p for p in fit.points if p.value != 0]
    T = np.array([p.T for p in pts])
    z = np.array([p.z for p in pts])
    S = np.abs([p.value for p in pts]).astype(float)
    alpha = 0.0 if math.isnan(fit.alpha_hat) else fit.alpha_hat
    pred = np.exp(fit.intercept + fit.beta_hat * np.log(T) + alpha * np.log(z))
    order = np.argsort(T * (1 + 1e-9 * z))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(T, S, "o", label="|S|")
    ax.loglog(T[order], pred[order], "-", label=f"fit: beta={fit.beta_hat:.3f}, alpha={fit.alpha_hat:.3f}")
    ax.set_xlabel("T")
    ax.set_ylabel("|S|")
    ax.set_title(f"cancellation scan ({fit.config.get('seq_kind')})")
    ax.legend()
    fig.tight_layout()
    from .output import atomic_write_text
    import io
    buf = io.StringIO()
    fig.savefig(buf, format="svg")
    plt.close(fig)
    atomic_write_text(path, buf.getvalue())


__all__ = [
    "ZETA2", "zeta3", "odd_square_constant", "ConstantReport", "euler_product_constant",
    "lower_bound_constant", "LowerBoundReport", "lower_bound_experiment", "first_example_sum",
    "MeanValueReport", "meanvalue_check", "ExponentFit", "ScanPoint", "cancellation_scan",
    "fit_exponents", "plot_scan_svg", "z_rule_from_name", "first_prime_above",
]
