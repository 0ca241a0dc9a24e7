"""Residual table for the special-function and integral-transform identities.

Each row compares two independent evaluation routes and reports the worst
residual over a fixed grid against its threshold.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .exact_formula import (
    CENTRAL,
    WeightParam,
    i_central,
    i_central_legendre,
    i_general,
)
from .specfun import (
    bessel_j0_asymptotic,
    bessel_j_int,
    bessel_j_series,
    gamma_ln,
    hyp1f1,
    legendre_p,
)


@dataclass(frozen=True)
class IdentityRow:
    name: str
    residual: float
    threshold: float
    points: int

    @property
    def passed(self) -> bool:
        return self.residual <= self.threshold


def duplication_residual() -> IdentityRow:
    """Gamma(2z) against pi^(-1/2) 2^(2z-1) Gamma(z) Gamma(z + 1/2)."""
    grid = [complex(re, im) for re in np.linspace(0.5, 10, 5) for im in (-5, -1.5, 0, 2, 5)]
    worst = 0.0
    for z in grid:
        lhs = gamma_ln(2 * z)
        rhs = -0.5 * math.log(math.pi) + (2 * z - 1) * math.log(2) + gamma_ln(z) + gamma_ln(z + 0.5)
        worst = max(worst, abs(cmath.exp(rhs - lhs) - 1))
    return IdentityRow("gamma duplication", worst, 1e-12, len(grid))


def kummer_bessel_residual() -> IdentityRow:
    """1F1(k, 2k; 2z) against Gamma(k+1/2) e^z (z/2)^(1/2-k) e(eps(1/2-k)/4) J_{k-1/2}(z e(eps/4))."""
    worst, count = 0.0, 0
    for k in range(2, 21):
        for z in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
            lhs = hyp1f1(k, 2 * k, 2 * z)
            for eps in (1, -1):
                rot = cmath.exp(0.5j * math.pi * eps)
                phase = cmath.exp(2j * math.pi * eps * (0.5 - k) / 4)
                log_mag = gamma_ln(k + 0.5).real + z + (0.5 - k) * math.log(z / 2)
                rhs = math.exp(log_mag) * phase * bessel_j_series(k - 0.5, z * rot)
                worst = max(worst, abs(rhs - lhs) / abs(lhs))
                count += 1
    return IdentityRow("1F1(k,2k;2z) as Bessel J", worst, 1e-10, count)


def bessel_transform_residual() -> IdentityRow:
    """Central I through 1F1 against its closed Bessel form."""
    worst, count = 0.0, 0
    for k in (6, 7, 8, 10, 13, 16, 20):
        w = WeightParam(k)
        for x in (0.05, 0.1, 0.3, 0.8, 2.0, 10.0):
            for eps in (1, -1):
                a = i_general(eps, CENTRAL, w, x)
                b = i_central(eps, w, x)
                worst = max(worst, abs(a - b) / abs(b))
                count += 1
    return IdentityRow("I(0,0,k;x) 1F1 vs Bessel", worst, 1e-9, count)


def legendre_route_residual() -> IdentityRow:
    """Central I from the Legendre quadrature against the Bessel form.

    Measured in absolute terms: the integrand is O(1) while the result can be
    far below rounding level when k is large against z.
    """
    worst, count = 0.0, 0
    for k in (6, 8, 10, 14, 20):
        for z in (0.5, 1.0, 2.0, 5.0, 10.0, 20.0):
            for eps in (1, -1):
                a = i_central_legendre(eps, k, z)
                b = i_central(eps, WeightParam(k), 1 / (2 * z))
                worst = max(worst, abs(a - b))
                count += 1
    return IdentityRow("I(0,0,k;1/2z) Legendre quadrature (abs)", worst, 1e-8, count)


def parity_residual() -> IdentityRow:
    """P_n(-x) = (-1)^n P_n(x)."""
    x = np.linspace(0.0, 1.0, 41)
    worst = 0.0
    for n in range(0, 61):
        worst = max(worst, float(np.max(np.abs(legendre_p(n, -x) - (-1) ** n * legendre_p(n, x)))))
    return IdentityRow("Legendre parity", worst, 1e-14, 61 * x.size)


def j0_remainder_ratio() -> IdentityRow:
    """Worst |asymptotic - J_0| / reported bound on z in [10, 1000]; must stay <= 1."""
    worst, count = 0.0, 0
    for z in np.geomspace(10, 1000, 60):
        exact = bessel_j_int(0, float(z))
        for d in (1, 2, 3):
            value, bound = bessel_j0_asymptotic(float(z), d)
            worst = max(worst, abs(value - exact) / bound)
            count += 1
    return IdentityRow("J0 asymptotic error / bound", worst, 1.0, count)


def identity_table() -> list[IdentityRow]:
    return [
        duplication_residual(),
        kummer_bessel_residual(),
        bessel_transform_residual(),
        legendre_route_residual(),
        parity_residual(),
        j0_remainder_ratio(),
    ]
