"""Rademacher vs adversarial coefficients over a T grid; writes CSV records and SVG plots."""

import argparse
from dataclasses import dataclass, field

from jacobisums.analysis import cancellation_scan, plot_scan_svg
from jacobisums.output import atomic_write_text, dumps_json
from jacobisums.sieve import build_sieve
from jacobisums.sums import SumEngine


@dataclass
class Config:
    T_grid: list = field(default_factory=lambda: [10**4, 10**5, 10**6, 10**7])
    seeds: list = field(default_factory=lambda: [1, 2, 3])
    adversarial_rule: str = "ladder"
    prefix: str = "cancellation"


def main(cfg: Config):
    eng = SumEngine(build_sieve(max(cfg.T_grid)))
    rad = cancellation_scan(cfg.T_grid, "quarter", "rademacher", cfg.seeds, eng)
    adv = cancellation_scan(cfg.T_grid, cfg.adversarial_rule, "adversarial", [], eng)
    print(f"rademacher  z=T^1/4   guard max {rad.guard_max:.4f}  beta {rad.beta_hat:.3f}")
    print(f"adversarial z={cfg.adversarial_rule:<8} alpha {adv.alpha_hat:.3f}  beta {adv.beta_hat:.3f}")
    for name, fit in (("rademacher", rad), ("adversarial", adv)):
        atomic_write_text(f"{cfg.prefix}_{name}.json", dumps_json(fit.record()))
        plot_scan_svg(fit, f"{cfg.prefix}_{name}.svg")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T-grid", default="1e4,1e5,1e6,1e7")
    ap.add_argument("--seeds", default="1,2,3")
    ap.add_argument("--adversarial-rule", default="ladder", help="ladder | dyadic | quarter")
    ap.add_argument("--prefix", default="cancellation")
    a = ap.parse_args()
    main(Config([int(float(t)) for t in a.T_grid.split(",")],
                [int(s) for s in a.seeds.split(",")], a.adversarial_rule, a.prefix))
