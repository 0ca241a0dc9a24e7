"""Uniform Bessel-type asymptotics of P_n(cos theta) at orders m = 0 and m = 1.

    P_n(cos t) ~ sqrt(t / sin t) * ( J0(N t) [1 + A1(t)/N^2] + t J1(N t) B0(t)/N )

with N = n + 1/2.  With A0 = 1 the recursion gives

    t B0(t) = 1/2 int_0^t f
    A1(t)   = 1/2 t B0'(t) - 1/2 int_0^t s f(s) B0(s) ds + lambda1
    t B0'(t) = f(t)/2 - B0(t)           (differentiate t B0)

and since f(t)/2 - B0(t) -> 0 as t -> 0, lambda1 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy import special as sc

from .errors import DomainError
from .quad import adaptive_quad
from .specfun import legendre_p

DELTA = 0.1
C_SMALL = 1.0
F_SWITCH = 0.1

# Taylor coefficients of f in powers of t^2
_F_TAYLOR = [float(Fraction(p, q)) for p, q in (
    (-1, 12), (-1, 60), (-1, 378), (-1, 2700), (-1, 20790), (-691, 116093250),
    (-1, 1403325), (-3617, 43418875500), (-43867, 4585799468250),
    (-174611, 161192575293750), (-77683, 640374140030625))]

LAMBDA1 = 0.0


def f_bg(t):
    """f(t) = 1/(4t^2) - 1/(16 sin^2(t/2)) - 1/(16 cos^2(t/2)) on [0, pi)."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta >= math.pi) or np.any(ta < 0):
        raise DomainError("f_bg is defined for 0 <= t < pi")
    out = np.empty_like(ta)
    small = ta < F_SWITCH
    if small.any():
        out[small] = np.polynomial.polynomial.polyval(ta[small] ** 2, _F_TAYLOR)
    big = ~small
    if big.any():
        tb = ta[big]
        out[big] = 1 / (4 * tb**2) - 1 / (16 * np.sin(tb / 2) ** 2) - 1 / (16 * np.cos(tb / 2) ** 2)
    return float(out) if out.ndim == 0 else out


def _check_theta(theta) -> np.ndarray:
    th = np.asarray(theta, dtype=float)
    if np.any(th <= 0) or np.any(th >= math.pi - DELTA):
        raise DomainError(f"theta must lie in (0, pi - {DELTA})")
    return th


def bg_B0(theta: float, tol: float = 1e-14) -> float:
    """B0(theta) = (1/(2 theta)) int_0^theta f, by adaptive quadrature."""
    th = float(_check_theta(theta))
    integral = adaptive_quad(f_bg, 0.0, th, tol=tol * th)
    return integral / (2 * th)


def bg_A1(theta: float, tol: float = 1e-14) -> float:
    """A1(theta) by quadrature, with theta B0' = f/2 - B0 analytically."""
    th = float(_check_theta(theta))
    b0 = bg_B0(th, tol)

    def g(s):
        return s * f_bg(s) * np.array([bg_B0(x, tol) for x in np.atleast_1d(s)])

    integral = adaptive_quad(g, 0.0, th, tol=tol * th)
    return 0.5 * (0.5 * f_bg(th) - b0) - 0.5 * integral + LAMBDA1


@dataclass(frozen=True)
class BGCoefficients:
    """Chebyshev interpolants of B0 and A1 on [0, pi - DELTA]."""

    theta_grid: np.ndarray
    B0_values: np.ndarray
    A1_values: np.ndarray
    lambda1: float
    b0_cheb: np.ndarray
    a1_cheb: np.ndarray

    def B0(self, theta):
        return cheb.chebval(_to_unit(theta), self.b0_cheb)

    def A1(self, theta):
        return cheb.chebval(_to_unit(theta), self.a1_cheb)


_SPAN = math.pi - DELTA


def _to_unit(theta):
    return 2 * np.asarray(theta, dtype=float) / _SPAN - 1


@lru_cache(maxsize=1)
def bg_coefficients(degree: int = 160) -> BGCoefficients:
    """Build B0 and A1 once on a Chebyshev grid (read-only afterwards)."""
    nodes = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
    theta = np.sort((nodes + 1) * _SPAN / 2)
    # cumulative integrals through Chebyshev antiderivatives: exact for the interpolant
    f_c = cheb.chebinterpolate(lambda u: f_bg((u + 1) * _SPAN / 2), degree)
    F_c = cheb.chebint(f_c, lbnd=-1) * (_SPAN / 2)
    F_vals = cheb.chebval(_to_unit(theta), F_c)
    b0 = F_vals / (2 * theta)
    b0_c = cheb.chebfit(_to_unit(theta), b0, degree)
    g_c = cheb.chebinterpolate(
        lambda u: ((u + 1) * _SPAN / 2) * f_bg((u + 1) * _SPAN / 2)
        * cheb.chebval(u, b0_c), degree)
    G_c = cheb.chebint(g_c, lbnd=-1) * (_SPAN / 2)
    a1 = 0.5 * (0.5 * f_bg(theta) - b0) - 0.5 * cheb.chebval(_to_unit(theta), G_c) + LAMBDA1
    a1_c = cheb.chebfit(_to_unit(theta), a1, degree)
    return BGCoefficients(theta_grid=theta, B0_values=b0, A1_values=a1, lambda1=LAMBDA1,
                          b0_cheb=b0_c, a1_cheb=a1_c)


def legendre_bg_approx(n: int, theta, m: int = 1):
    """Order-m uniform approximation of P_n(cos theta), m in {0, 1}."""
    if m not in (0, 1):
        raise DomainError("only m = 0 and m = 1 are implemented")
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    th = _check_theta(theta)
    big_n = n + 0.5
    x = big_n * th
    amp = np.sqrt(th / np.sin(th))
    if m == 0:
        out = amp * sc.j0(x)
    else:
        co = bg_coefficients()
        out = amp * (sc.j0(x) * (1 + co.A1(th) / big_n**2) + th * sc.j1(x) * co.B0(th) / big_n)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ErrorScan:
    rows: list[tuple[int, float, float]]     # (n, theta, |E_m|)
    fits: dict[float, tuple[float, float]]   # theta -> (slope, intercept) of log|E| vs log N


def bg_error_scan(n_list, theta_grid, m: int = 1) -> ErrorScan:
    """Measured |P_n(cos t) - approximation| and per-theta log-log fits in N."""
    rows = []
    thetas = np.asarray(theta_grid, dtype=float)
    _check_theta(thetas)
    for n in n_list:
        exact = legendre_p(int(n), np.cos(thetas))
        approx = legendre_bg_approx(int(n), thetas, m)
        for th, err in zip(thetas.tolist(), np.abs(exact - approx).tolist()):
            rows.append((int(n), th, err))
    fits = {}
    if len(n_list) >= 2:
        for th in thetas.tolist():
            pts = [(math.log(n + 0.5), math.log(e)) for n, t, e in rows if t == th and e > 0]
            if len(pts) >= 2:
                xs, ys = np.array(pts).T
                slope, intercept = np.polyfit(xs, ys, 1)
                fits[th] = (float(slope), float(intercept))
    return ErrorScan(rows=rows, fits=fits)
