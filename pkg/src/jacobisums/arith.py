"""Jacobi symbol kernel and small arithmetic predicates.

The hot path is :func:`jacobi_nb`, a division-free (binary) Jacobi algorithm
compiled with numba.  :func:`jacobi_symbol` is the validated scalar entry
point; :func:`euler_criterion_oracle` is an independent check used by tests.
"""

import math

import numpy as np
from numba import njit, prange


class InvalidArgument(ValueError):
    """Raised for arguments outside an operation's domain."""


@njit(cache=True, nogil=True)
def jacobi_nb(n, m):
    # n >= 0, m >= 1 odd; no validation here
    if m == 1:
        return 1
    t = 1
    while n != 0:
        tz = 0
        while (n & 1) == 0:
            n >>= 1
            tz += 1
        if tz & 1:
            r = m & 7
            if r == 3 or r == 5:
                t = -t
        if n < m:
            if (n & 3) == 3 and (m & 3) == 3:
                t = -t
            n, m = m, n
        n -= m
    if m == 1:
        return t
    return 0


@njit(cache=True, parallel=True)
def jacobi_array(ns, ms):
    out = np.empty(ns.shape[0], dtype=np.int8)
    for i in prange(ns.shape[0]):
        out[i] = jacobi_nb(ns[i], ms[i])
    return out


_WORD = 1 << 62


def _binary_jacobi(n, m):
    if m == 1:
        return 1
    t = 1
    while n:
        tz = (n & -n).bit_length() - 1
        n >>= tz
        if tz & 1 and (m & 7) in (3, 5):
            t = -t
        if n < m:
            if n & m & 3 == 3:
                t = -t
            n, m = m, n
        n -= m
    return t if m == 1 else 0


def jacobi_symbol(n: int, m: int) -> int:
    """Return the Jacobi symbol (n/m) for n >= 1 and odd m >= 1.

    >>> jacobi_symbol(2, 15)
    1
    """
    n, m = int(n), int(m)
    if n < 1 or m < 1:
        raise InvalidArgument(f"jacobi_symbol needs positive arguments, got ({n}, {m})")
    if m % 2 == 0:
        raise InvalidArgument(f"jacobi_symbol modulus must be odd, got {m}")
    if n < _WORD and m < _WORD:
        return int(jacobi_nb(n, m))
    return _binary_jacobi(n, m)


def euler_criterion_oracle(n: int, p: int) -> int:
    """Legendre symbol via n^((p-1)/2) mod p; p must be an odd prime."""
    n, p = int(n), int(p)
    if p % 2 == 0 or p < 3:
        raise InvalidArgument(f"euler_criterion_oracle needs an odd prime, got {p}")
    r = pow(n % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def reciprocity_sign(n: int, m: int) -> int:
    """(-1)^((n-1)(m-1)/4): -1 exactly when n = m = 3 (mod 4)."""
    n, m = int(n), int(m)
    if n % 2 == 0 or m % 2 == 0 or n < 1 or m < 1:
        raise InvalidArgument(f"reciprocity_sign needs odd positive arguments, got ({n}, {m})")
    return -1 if (n & 3) == 3 and (m & 3) == 3 else 1


def is_prime(n: int) -> bool:
    """Trial division; intended for desk-scale n."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def first_prime_above(z) -> int:
    """Smallest prime strictly greater than z, by incremental trial division."""
    k = math.floor(z) + 1
    while not is_prime(k):
        k += 1
    return k


def primes_upto(n: int) -> np.ndarray:
    """Plain Eratosthenes, used for sieving bases and test oracles."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)
