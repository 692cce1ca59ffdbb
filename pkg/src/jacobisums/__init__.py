"""Exact and large-scale evaluation of bilinear Jacobi-symbol sums over hyperbolic regions."""

import os

# TBB in this environment is too old for numba; OpenMP is the portable default.
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

from .arith import (  # noqa: E402
    InvalidArgument,
    euler_criterion_oracle,
    jacobi_symbol,
    reciprocity_sign,
)
from .sieve import SieveTable, build_sieve  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "InvalidArgument",
    "SieveTable",
    "build_sieve",
    "euler_criterion_oracle",
    "jacobi_symbol",
    "reciprocity_sign",
]
