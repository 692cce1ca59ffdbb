"""Equal-width cover recomposition against the direct sum for a (T, z, delta) grid."""

import argparse
import math
from dataclasses import dataclass
from fractions import Fraction

from jacobisums.regions import build_equal_width_cover
from jacobisums.sequences import rademacher
from jacobisums.sieve import build_sieve
from jacobisums.sums import SumEngine, cover_recomposition_sum


@dataclass
class Config:
    T: int = 10**6
    zs: tuple = (4, 9, 25, 100)
    deltas: tuple = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2))
    seed: int = 0


def main(cfg: Config):
    eng = SumEngine(build_sieve(cfg.T))
    a, b = rademacher(2 * cfg.seed), rademacher(2 * cfg.seed + 1)
    for d in cfg.deltas:
        for z in cfg.zs:
            if Fraction(z) ** d.denominator >= Fraction(cfg.T) ** d.numerator:
                continue
            br = cover_recomposition_sum(build_equal_width_cover(cfg.T, z, d), a, b, table=eng)
            small = br.slivers.terms + br.leftover.terms
            print(f"delta={str(d):>4} z={z:>4} |H|={br.rect_count:>4} exact={br.exact_match} "
                  f"rect={br.rectangles.value:>7} sliver+L terms={small:>8} "
                  f"(T/sqrt z = {cfg.T / math.sqrt(z):.0f})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=int, default=Config.T)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    main(Config(T=a.T, seed=a.seed))
