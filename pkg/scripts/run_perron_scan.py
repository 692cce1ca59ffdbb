"""Perron indicator errors for R = R0, 2 R0, 4 R0, ... against R^-1 |log nm - log tau|^-1."""

import argparse
from dataclasses import dataclass

import numpy as np

from jacobisums.perron import half_integer_shift, max_error_by_R, perron_error_scan, write_scan_csv


@dataclass
class Config:
    T: float = 1000.0
    R0: float = 1e3
    doublings: int = 3
    samples: int = 100
    out: str = "perron_scan.csv"


def main(cfg: Config):
    tau, theta = half_integer_shift(cfg.T)
    sample = np.unique(np.linspace(2, 2 * cfg.T, cfg.samples).round().astype(int))
    Rs = [cfg.R0 * 2**k for k in range(cfg.doublings + 1)]
    rows = perron_error_scan(cfg.T, Rs, sample)
    write_scan_csv(rows, cfg.out)
    print(f"tau={tau} theta={theta}")
    prev = None
    for R, e in max_error_by_R(rows).items():
        worst = max(r.ratio for r in rows if r.R == R)
        step = "" if prev is None else f"  ratio to previous {e / prev:.3f}"
        print(f"R={R:>8g}  max error {e:.3e}  max error/bound {worst:.3f}{step}")
        prev = e


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=float, default=Config.T)
    ap.add_argument("--R0", type=float, default=Config.R0)
    ap.add_argument("--doublings", type=int, default=Config.doublings)
    ap.add_argument("--samples", type=int, default=Config.samples)
    ap.add_argument("--out", default=Config.out)
    a = ap.parse_args()
    main(Config(a.T, a.R0, a.doublings, a.samples, a.out))
