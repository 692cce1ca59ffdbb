"""Odd-square sum S(T) against C*T over a decade grid, with the hyperbola split."""

import argparse
import math
from dataclasses import dataclass

from jacobisums.analysis import odd_square_constant
from jacobisums.output import atomic_write_text, records_csv
from jacobisums.sieve import build_sieve
from jacobisums.sums import hyperbola_method_sum


@dataclass
class Config:
    T_max: int = 10**7
    out: str = "asymptotic.csv"


def main(cfg: Config):
    table = build_sieve(cfg.T_max)
    C = odd_square_constant()
    rows = []
    T = 10**3
    while T <= cfg.T_max:
        h = hyperbola_method_sum(T, table)
        S = h.total.value
        rows.append({"T": T, "N1": h.N1.value, "N2": h.N2.value, "N3": h.N3.value, "S": S,
                     "S_over_T": S / T, "gap": S / T - C,
                     "err_over_T34logT": abs(S - C * T) / (T**0.75 * math.log(T))})
        print(f"T={T:>9}  S/T={S / T:.6f}  C={C:.6f}  gap={S / T - C:+.5f}")
        T *= 10
    atomic_write_text(cfg.out, records_csv(rows))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T-max", type=int, default=Config.T_max)
    ap.add_argument("--out", default=Config.out)
    a = ap.parse_args()
    main(Config(a.T_max, a.out))
