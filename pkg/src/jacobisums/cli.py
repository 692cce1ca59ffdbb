"""Batch experiment runner.

Every subcommand prints ``key: value`` summary lines, optionally writes its
records to ``--output`` (csv or json, atomically) plus a run manifest next
to it, and exits 0 iff all of its guards pass.

Exit codes: 0 ok, 1 guard failed, 2 invalid config, 3 numeric failure,
4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .analysis import (
    cancellation_scan,
    euler_product_constant,
    lower_bound_experiment,
    meanvalue_check,
    odd_square_constant,
    plot_scan_svg,
)
from .arith import InvalidArgument
from .output import atomic_write_text, dumps_json, records_csv
from .perron import PerronConfig, QuadratureError, half_integer_shift, max_error_by_R, perron_error_scan
from .regions import HyperbolicRegion, build_equal_width_cover, floor_real
from .sequences import BoundedSequence, adversarial_pair, load_custom_table, rademacher
from .sieve import ResourceLimitError, build_sieve
from .sums import SumEngine, cover_recomposition_sum, hyperbola_method_sum, hyperbolic_sum, result_record

EXIT_OK, EXIT_GUARD, EXIT_CONFIG, EXIT_NUMERIC, EXIT_RESOURCE = 0, 1, 2, 3, 4

COMMANDS = ("sum", "cover-check", "asymptotic", "perron-scan", "meanvalue",
            "lower-bound", "cancellation-scan", "constant")


class ConfigError(InvalidArgument):
    pass


@dataclass
class ExperimentConfig:
    command: str
    T: float = 1e4
    z: float = 2.0
    c: float = 0.0
    delta: float = 0.25
    seq_a: str = "one"
    seq_b: str = "one"
    seeds: list = field(default_factory=list)
    R: float = 1e3
    output_path: str | None = None
    format: str = "json"
    threads: int = 1
    restriction: str = "odd_squarefree"
    M: int = 10_000
    N: int = 100
    variant: str = "Elliot"
    samples: int = 100
    T_grid: list = field(default_factory=list)
    z_rule: str = "quarter"
    seq_kind: str = "rademacher"
    guard: float | None = None
    svg: str | None = None
    p: int | None = None

    @property
    def T_int(self) -> int:
        return floor_real(self.T)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not (self.T >= 1):
            raise ConfigError("T must be >= 1")
        if self.command in ("sum", "cover-check", "lower-bound") and self.z < 2:
            raise ConfigError("z must be >= 2")
        if self.command == "cover-check" and not (0 < self.delta <= 0.5):
            raise ConfigError("delta must lie in (0, 1/2]")
        if self.c < 0:
            raise ConfigError("c must be >= 0")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.command == "cancellation-scan" and len(self.T_grid) < 3:
            raise ConfigError("cancellation-scan needs at least 3 T values")


def parse_sequence(desc: str, z=None) -> BoundedSequence:
    """one | zero | rademacher:SEED | jacobi:P | point:P | csv:PATH  (P may be 'auto')."""
    try:
        return _parse_sequence(desc, z)
    except ValueError as e:
        if isinstance(e, InvalidArgument):
            raise
        raise ConfigError(f"bad sequence descriptor {desc!r}: {e}") from None


def _parse_sequence(desc, z):
    kind, _, arg = desc.partition(":")
    if kind == "one":
        return BoundedSequence("constant_one")
    if kind == "zero":
        return BoundedSequence("zero")
    if kind == "rademacher":
        return rademacher(int(arg or 0))
    if kind in ("jacobi", "point"):
        if arg == "auto":
            if z is None:
                raise ConfigError("'auto' prime needs z")
            _, _, p = adversarial_pair(z)
        else:
            p = int(arg)
        return BoundedSequence("jacobi_character" if kind == "jacobi" else "point_mass", p)
    if kind == "csv":
        return load_custom_table(arg)
    raise ConfigError(f"bad sequence descriptor {desc!r}")


def _float_list(s):
    return [float(x) for x in s.split(",") if x.strip()]


def _int_list(s):
    return [int(x) for x in s.split(",") if x.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    env_threads = int(os.environ.get("JACOBISUMS_THREADS", "1") or 1)
    p = _Parser(prog="jacobisums", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--T", type=float, default=1e4)
        sp.add_argument("--output", dest="output_path")
        sp.add_argument("--format", choices=("csv", "json"), default="json")
        sp.add_argument("--threads", type=int, default=env_threads)

    def seqs(sp):
        sp.add_argument("--seq-a", default="one")
        sp.add_argument("--seq-b", default="one")
        sp.add_argument("--c", type=float, default=0.0)
        sp.add_argument("--restriction", default="odd_squarefree",
                        choices=("odd_squarefree", "odd", "all"))

    s = sub.add_parser("sum", help="hyperbolic sum over z < n, m, nm <= T")
    common(s)
    seqs(s)
    s.add_argument("--z", type=float, default=2.0)

    s = sub.add_parser("cover-check", help="equal-width cover recomposition vs direct sum")
    common(s)
    seqs(s)
    s.add_argument("--z", type=float, default=9.0)
    s.add_argument("--delta", type=float, default=0.25)

    s = sub.add_parser("asymptotic", help="hyperbola-method sum vs 6 zeta(2) / 7 zeta(3) T")
    common(s)
    s.set_defaults(restriction="odd")

    s = sub.add_parser("perron-scan", help="truncated Perron indicator error scan")
    common(s)
    s.add_argument("--R", type=float, default=1e3)
    s.add_argument("--samples", type=int, default=100)

    s = sub.add_parser("meanvalue", help="mean-value ratio for random +-1 sequences")
    common(s)
    s.add_argument("--M", type=int, default=10_000)
    s.add_argument("--N", type=int, default=100)
    s.add_argument("--seeds", type=_int_list, default=list(range(50)))
    s.add_argument("--variant", choices=("Elliot", "HB1"), default="Elliot")
    s.add_argument("--guard", type=float, default=2.0)

    s = sub.add_parser("lower-bound", help="a_n = (n/p), b_m = 1{m=p} construction")
    common(s)
    s.add_argument("--z", type=float, default=10.0)
    s.add_argument("--p", type=int)
    s.add_argument("--guard", type=float, default=20.0)

    s = sub.add_parser("cancellation-scan", help="exact sums over a T grid with exponent fit")
    common(s)
    s.add_argument("--T-grid", dest="T_grid", type=_float_list, default=[1e4, 1e5, 1e6])
    s.add_argument("--z-rule", default="quarter")
    s.add_argument("--seq-kind", choices=("rademacher", "one", "adversarial"), default="rademacher")
    s.add_argument("--seeds", type=_int_list, default=[1, 2, 3])
    s.add_argument("--guard", type=float, default=5.0)
    s.add_argument("--svg")

    s = sub.add_parser("constant", help="odd-square Euler product constant")
    common(s)
    return p


def config_from_args(argv) -> ExperimentConfig:
    ns = build_parser().parse_args(argv)
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    cfg = ExperimentConfig(**{k: v for k, v in vars(ns).items() if k in known and v is not None})
    cfg.validate()
    return cfg


def _table(limit):
    return build_sieve(max(int(limit), 1))


def run_sum(cfg):
    eng = SumEngine(_table(cfg.T_int), cfg.threads)
    a, b = parse_sequence(cfg.seq_a, cfg.z), parse_sequence(cfg.seq_b, cfg.z)
    res = hyperbolic_sum(HyperbolicRegion(cfg.T, cfg.z, cfg.restriction), a, b, cfg.c, eng)
    rec = result_record("sum", res, T=cfg.T, z=cfg.z, c=cfg.c, seq_a=a.describe(), seq_b=b.describe(),
                        restriction=cfg.restriction)
    summary = {"value": res.value, "terms": res.terms, "mode": res.mode}
    return [rec], summary, True


def run_cover_check(cfg):
    eng = SumEngine(_table(cfg.T_int), cfg.threads)
    a, b = parse_sequence(cfg.seq_a, cfg.z), parse_sequence(cfg.seq_b, cfg.z)
    cover = build_equal_width_cover(cfg.T, cfg.z, cfg.delta)
    br = cover_recomposition_sum(cover, a, b, cfg.c, eng, cfg.restriction)
    rec = {"experiment": "cover-check", "T": cfg.T, "z": cfg.z, "delta": cfg.delta, "c": cfg.c,
           **br.record()}
    summary = {"exact-match": str(br.exact_match).lower(), "rectangles": len(cover.H),
               "direct": br.direct.value}
    return [rec], summary, br.exact_match


def run_asymptotic(cfg):
    eng = SumEngine(_table(cfg.T_int), cfg.threads)
    split = hyperbola_method_sum(cfg.T, eng)
    one = BoundedSequence("constant_one")
    direct = hyperbolic_sum(HyperbolicRegion(cfg.T, 0, "odd"), one, one, 0.0, eng)
    total = split.total.value
    C = odd_square_constant()
    T = float(cfg.T)
    err = abs(total - C * T)
    bound = 10 * T**0.75 * math.log(T) if T > 1 else float("inf")
    rec = {"experiment": "asymptotic", "T": T, "N1": split.N1.value, "N2": split.N2.value,
           "N3": split.N3.value, "total": total, "direct": direct.value, "C": C, "CT": C * T,
           "normalized_error": err / T**0.75, "guard_bound": bound,
           "ratio_to_T": total / T}
    ok = total == direct.value and err <= bound
    summary = {"total": total, "C*T": C * T, "|total-C*T|/T^(3/4)": err / T**0.75,
               "hyperbola-matches-direct": str(total == direct.value).lower()}
    return [rec], summary, ok


def run_perron_scan(cfg):
    tau, theta = half_integer_shift(cfg.T)
    sample = np.unique(np.linspace(2, 2 * cfg.T_int, cfg.samples).round().astype(np.int64))
    rows = perron_error_scan(cfg.T, [cfg.R, 2 * cfg.R], sample, PerronConfig(tau, cfg.R))
    maxes = max_error_by_R(rows)
    recs = [{"nm": r.nm, "R": r.R, "observed_error": r.observed_error,
             "predicted_bound": r.predicted_bound, "ratio": r.ratio} for r in rows]
    flagged = sum(r.flagged for r in rows)
    decreasing = maxes[2 * cfg.R] < maxes[cfg.R]
    summary = {"tau": tau, "theta": theta, "flagged": flagged,
               "max-error": " ".join(f"R={R:g}:{e:.3e}" for R, e in maxes.items()),
               "doubling-R-reduces-max-error": str(decreasing).lower()}
    return recs, summary, flagged == 0 and decreasing


def run_meanvalue(cfg):
    table = _table(max(cfg.M, cfg.N))
    reps = meanvalue_check(cfg.M, (0, cfg.N), [rademacher(s) for s in cfg.seeds], table,
                           cfg.variant, guard=cfg.guard)
    recs = [dict(r.record(), seed=s) for s, r in zip(cfg.seeds, reps)]
    worst = max(r.ratio for r in reps)
    summary = {"variant": cfg.variant, "max-ratio": worst, "guard": cfg.guard}
    return recs, summary, all(r.passed for r in reps)


def run_lower_bound(cfg):
    eng = SumEngine(_table(cfg.T_int), cfg.threads)
    rep = lower_bound_experiment(cfg.T, cfg.z, eng, p=cfg.p, guard=cfg.guard)
    summary = {"p": rep.p, "observed": rep.observed, "predicted": rep.predicted,
               "normalized-deviation": rep.normalized_deviation}
    return [rep.record()], summary, rep.passed


def run_cancellation_scan(cfg):
    eng = SumEngine(_table(max(cfg.T_grid)), cfg.threads)
    fit = cancellation_scan(cfg.T_grid, cfg.z_rule, cfg.seq_kind, cfg.seeds, eng, guard=cfg.guard)
    if cfg.svg:
        plot_scan_svg(fit, cfg.svg)
    recs = [dict(p.record(), seq_kind=cfg.seq_kind) for p in fit.points]
    summary = {"alpha_hat": fit.alpha_hat, "beta_hat": fit.beta_hat,
               "guard-max": fit.guard_max, "guard": fit.guard}
    return recs, summary, fit.passed


def run_constant(cfg):
    rep = euler_product_constant(max(cfg.T_int, 1))
    recs = [{"K": k, "partial": v, "gap": rep.euler_product_value - v} for k, v in rep.series_partial]
    summary = {"constant": rep.euler_product_value, "zeta3": rep.zeta3,
               "partial": rep.series_partial[-1][1]}
    return recs, summary, True


RUNNERS = {
    "sum": run_sum, "cover-check": run_cover_check, "asymptotic": run_asymptotic,
    "perron-scan": run_perron_scan, "meanvalue": run_meanvalue, "lower-bound": run_lower_bound,
    "cancellation-scan": run_cancellation_scan, "constant": run_constant,
}


def _versions():
    import numba
    return {"jacobisums": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "numba": numba.__version__}


def run(cfg: ExperimentConfig, out=None) -> int:
    out = out or sys.stdout
    t0 = time.perf_counter()
    records, summary, ok = RUNNERS[cfg.command](cfg)
    wall_ms = (time.perf_counter() - t0) * 1e3
    for k, v in summary.items():
        print(f"{k}: {v}", file=out)
    print(f"guards-passed: {str(ok).lower()}", file=out)
    if cfg.output_path:
        for r in records:
            r.setdefault("wall_time_ms", round(wall_ms, 3))
        text = dumps_json(records) if cfg.format == "json" else records_csv(records)
        atomic_write_text(cfg.output_path, text)
        manifest = {"config": asdict(cfg), "T_int": cfg.T_int, "versions": _versions(),
                    "wall_time_ms": wall_ms, "guards_passed": ok}
        atomic_write_text(cfg.output_path + ".manifest.json", dumps_json(manifest))
    return EXIT_OK if ok else EXIT_GUARD


def _fail(kind, msg, code):
    print(f"error: {kind}: {json.dumps(str(msg))}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        return run(cfg)
    except (InvalidArgument, FileNotFoundError) as e:
        return _fail("invalid-config", e, EXIT_CONFIG)
    except ResourceLimitError as e:
        return _fail("resource", e, EXIT_RESOURCE)
    except (QuadratureError, ArithmeticError, FloatingPointError) as e:
        return _fail("numeric", e, EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
