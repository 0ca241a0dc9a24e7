"""Elementary arithmetic and exponential-sum primitives."""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

from .errors import DomainError

_WHEEL_PRIMES = (2, 3, 5)
_WHEEL_STEPS = (4, 2, 4, 2, 4, 6, 2, 6)  # gaps between residues coprime to 30


def _check_modulus(c: int) -> int:
    if int(c) != c or c < 1:
        raise DomainError(f"modulus must be an integer >= 1, got {c}")
    return int(c)


def mod_inverse(n: int, c: int) -> int:
    """n* in [0, c) with n * n* = 1 (mod c); returns 0 for c = 1."""
    c = _check_modulus(c)
    if c == 1:
        return 0
    if math.gcd(n, c) != 1:
        raise DomainError(f"{n} is not invertible modulo {c}")
    return pow(n, -1, c)


def additive_twist(n_star: int, l: int, c: int) -> complex:
    """e(n* l / c) with the numerator reduced mod c in integer arithmetic."""
    c = _check_modulus(c)
    r = (n_star * l) % c
    if r == 0:
        return 1.0 + 0.0j
    return cmath.exp(2j * math.pi * r / c)


def kloosterman(m: int, n: int, c: int) -> float:
    """Classical Kloosterman sum S(m, n; c) by direct enumeration."""
    c = _check_modulus(c)
    if c == 1:
        return 1.0
    re, im = [], []
    for x in range(1, c):
        if math.gcd(x, c) != 1:
            continue
        r = (m * x + n * pow(x, -1, c)) % c
        angle = 2.0 * math.pi * r / c
        re.append(math.cos(angle))
        im.append(math.sin(angle))
    imag = math.fsum(im)
    if abs(imag) > 1e-10 * max(1.0, c):
        raise ArithmeticError(f"S({m},{n};{c}) has imaginary part {imag:g}")
    return math.fsum(re)


@lru_cache(maxsize=4096)
def factorize(m: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation by trial division over a mod-30 wheel."""
    if int(m) != m or m < 1:
        raise DomainError(f"factorize needs an integer >= 1, got {m}")
    m = int(m)
    out = []
    for p in _WHEEL_PRIMES:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    p, i = 7, 0
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += _WHEEL_STEPS[i]
        i = (i + 1) % 8
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def mobius(m: int) -> int:
    fac = factorize(m)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def divisor_sigma(m: int, power: int = 1) -> int:
    """sigma_power(m) = sum of d^power over divisors d of m."""
    total = 1
    for p, e in factorize(m):
        if power == 0:
            total *= e + 1
        else:
            total *= (p ** (power * (e + 1)) - 1) // (p**power - 1)
    return total


def sigma(m: int) -> int:
    return divisor_sigma(m, 1)


def num_divisors(m: int) -> int:
    return divisor_sigma(m, 0)


def mod_inverse_array(n, c):
    """Vectorised mod_inverse over int64 arrays; every pair must be coprime.

    Entries with c = 1 map to 0.
    """
    import numpy as np

    n = np.asarray(n, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    n, c = np.broadcast_arrays(n, c)
    old_r, r = n % c, c.copy()
    old_s, s = np.ones_like(n), np.zeros_like(n)
    active = r != 0
    while active.any():
        q = np.where(active, old_r // np.where(active, r, 1), 0)
        old_r, r = np.where(active, r, old_r), np.where(active, old_r - q * r, r)
        old_s, s = np.where(active, s, old_s), np.where(active, old_s - q * s, s)
        active = r != 0
    if np.any((old_r != 1) & (c != 1)):
        raise DomainError("mod_inverse_array: some pair is not coprime")
    return np.where(c == 1, 0, old_s % c)
