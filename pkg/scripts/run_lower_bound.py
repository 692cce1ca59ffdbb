"""Sharpness construction a_n = (n/p), b_m = 1{m = p} across z at fixed T."""

import argparse
from dataclasses import dataclass

from jacobisums.analysis import lower_bound_experiment
from jacobisums.output import atomic_write_text, records_csv
from jacobisums.sieve import build_sieve
from jacobisums.sums import SumEngine


@dataclass
class Config:
    T: int = 10**7
    zs: tuple = (10, 20, 50, 100, 200, 500, 1000)
    out: str = "lower_bound.csv"


def main(cfg: Config):
    eng = SumEngine(build_sieve(cfg.T))
    rows = []
    for z in cfg.zs:
        rep = lower_bound_experiment(cfg.T, z, eng)
        rows.append(rep.record())
        print(f"z={z:>5} p={rep.p:>5}  S={rep.observed:>8}  predicted={rep.predicted:10.1f}  "
              f"S*z/T={rep.observed * z / cfg.T:.4f}  dev/sqrt(T/p)={rep.normalized_deviation:.2f}")
    atomic_write_text(cfg.out, records_csv(rows))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=int, default=Config.T)
    ap.add_argument("--zs", default=",".join(map(str, Config.zs)))
    ap.add_argument("--out", default=Config.out)
    a = ap.parse_args()
    main(Config(a.T, tuple(int(z) for z in a.zs.split(",")), a.out))
