"""Special functions: Gamma, 1F1, Bessel J, Legendre polynomials.

Everything runs in binary64.  Long alternating series are summed with
``math.fsum`` on real and imaginary parts separately, which makes the
result independent of summation order.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special as sc

from .errors import ConvergenceError, DomainError, PoleError
from .quad import adaptive_quad

__all__ = [
    "SeriesTolerance",
    "gamma_ln",
    "hyp1f1",
    "bessel_j_series",
    "bessel_j_half",
    "bessel_j_int",
    "bessel_j0_asymptotic",
    "bessel_asym_coeff",
    "legendre_p",
    "legendre_rodrigues_coeffs",
    "legendre_rodrigues",
    "bessel_half_via_legendre",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SeriesTolerance:
    rel_tol: float = 1e-14
    max_terms: int = 20000

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_TOL = SeriesTolerance()


def _csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values),
                   math.fsum(v.imag for v in values))


def _is_nonpositive_integer(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


# --------------------------------------------------------------------- Gamma

def gamma_ln(z) -> complex:
    """Principal branch of log Gamma(z).

    Raises PoleError at z = 0, -1, -2, ...
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    return complex(sc.loggamma(z))


# ----------------------------------------------------------------------- 1F1

def _hyp1f1_series(a: complex, b: complex, x: complex,
                   tol: SeriesTolerance) -> tuple[complex, float]:
    """Return the Kummer series and its cancellation factor sum|t|/|sum|."""
    term = 1.0 + 0.0j
    terms = [term]
    partial = term
    for j in range(tol.max_terms):
        term = term * (a + j) / (b + j) * x / (j + 1)
        if term == 0:
            break
        terms.append(term)
        partial += term
        ratio = abs((a + j + 1) * x / ((b + j + 1) * (j + 2)))
        if ratio < 1.0 and abs(term) * ratio / (1.0 - ratio) <= tol.rel_tol * abs(partial):
            break
    else:
        raise ConvergenceError(
            f"1F1({a}, {b}; {x}) did not converge in {tol.max_terms} terms")
    value = _csum(terms)
    mass = math.fsum(abs(t) for t in terms)
    return value, mass / abs(value) if value != 0 else math.inf


def _hyp1f1_contour(a: complex, b: complex, x: complex,
                    qtol: float) -> tuple[complex, float]:
    # Euler integral over [0, 1] deformed onto two parallel rays on which
    # exp(x t) decays monotonically; no oscillation, no cancellation.
    r = abs(x)
    delta = -x.conjugate() / r
    c = b - a
    span = 60.0 + 4.0 * (abs(a) + abs(b))
    panels = 8 + int(abs(a) + abs(b)) // 4

    def ray0(u):
        s = u / r
        return np.exp(-u) * np.power(s * delta, a - 1) * np.power(1 - s * delta, c - 1)

    def ray1(u):
        s = u / r
        return np.exp(-u) * np.power(1 + s * delta, a - 1) * np.power(-s * delta, c - 1)

    i0 = adaptive_quad(ray0, 0.0, span, tol=0.0, rtol=qtol, panels=panels)
    i1 = adaptive_quad(ray1, 0.0, span, tol=0.0, rtol=qtol, panels=panels)
    # the two rays carry the two Hankel-type pieces; they cancel where the
    # function is evanescent, so report that cancellation like the series
    i1 = cmath.exp(x) * i1
    diff = i0 - i1
    cancel = (abs(i0) + abs(i1)) / abs(diff) if diff != 0 else math.inf
    log_pref = gamma_ln(b) - gamma_ln(a) - gamma_ln(c)
    return cmath.exp(log_pref) * delta / r * diff, cancel


def hyp1f1(a, b, x, tol: SeriesTolerance = DEFAULT_TOL, method: str = "auto") -> complex:
    """Confluent hypergeometric function 1F1(a, b; x).

    ``method="series"`` sums the Kummer series.  ``"contour"`` uses the Euler
    integral rotated onto decaying rays; it needs Re b > Re a > 0 and
    non-real x, and raises ConvergenceError when its two pieces cancel by more
than six digits.  ``"auto"`` takes the series unless it loses more than four
    digits to cancellation, in which case it also tries the contour (when
    applicable) and keeps whichever route cancelled less.
    """
    a, b, x = complex(a), complex(b), complex(x)
    if _is_nonpositive_integer(b):
        raise PoleError(f"1F1 undefined: b = {b.real:g} is a pole of Gamma(b)")
    if method not in ("auto", "series", "contour"):
        raise ValueError(f"unknown method {method!r}")
    contour_ok = a.real > 0 and (b - a).real > 0 and x.imag != 0.0
    if method == "contour":
        if not contour_ok:
            raise DomainError("contour route needs Re b > Re a > 0 and non-real x")
        value, cancel = _hyp1f1_contour(a, b, x, tol.rel_tol)
        if cancel > 1e6:
            raise ConvergenceError(
                f"contour route for 1F1({a}, {b}; {x}) cancels by a factor {cancel:.3g}")
        return value
    if x == 0:
        return 1.0 + 0.0j
    value, cancel = _hyp1f1_series(a, b, x, tol)
    if method == "auto" and cancel > 1e4 and contour_ok:
        alt, alt_cancel = _hyp1f1_contour(a, b, x, tol.rel_tol)
        if alt_cancel < cancel:
            return alt
    return value


# -------------------------------------------------------------------- Bessel

def bessel_j_series(nu: float, z, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """J_nu(z) from its defining power series, principal branch of (z/2)^nu.

    Accepts complex z.  No cancellation control: accurate where |z| is
    moderate or z is close to the imaginary axis.
    """
    z = complex(z)
    if nu < 0:
        raise DomainError("bessel_j_series supports nu >= 0 only")
    if z == 0:
        return 1.0 + 0.0j if nu == 0 else 0.0j
    half = z / 2
    lead = cmath.exp(nu * cmath.log(half) - sc.gammaln(nu + 1.0))
    q = -half * half
    term = lead
    terms = [term]
    peak = abs(term)
    for m in range(1, tol.max_terms):
        term = term * q / (m * (m + nu))
        terms.append(term)
        peak = max(peak, abs(term))
        if abs(q) < m * (m + nu) and abs(term) <= 1e-18 * peak:
            break
    else:
        raise ConvergenceError(f"J_{nu}({z}) series did not converge")
    return _csum(terms)


_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)


def _spherical_small(order: int, z: np.ndarray) -> np.ndarray:
    # J_{order+1/2}(z) for z <= 1: positive-dominated series, 30 terms.
    nu = order + 0.5
    lead = np.exp(nu * np.log(z / 2) - sc.gammaln(nu + 1.0))
    q = -(z / 2) ** 2
    term = np.ones_like(z)
    total = np.ones_like(z)
    for m in range(1, 30):
        term = term * q / (m * (m + nu))
        total = total + term
    return lead * total


def _spherical_upward(order: int, z: np.ndarray) -> np.ndarray:
    s, c = np.sin(z), np.cos(z)
    j_prev = s / z
    if order == 0:
        return j_prev
    j_cur = s / z**2 - c / z
    for m in range(1, order):
        j_prev, j_cur = j_cur, (2 * m + 1) / z * j_cur - j_prev
    return j_cur


def _spherical_miller(order: int, z: np.ndarray) -> np.ndarray:
    start = order + int(math.sqrt(40.0 * (order + 1))) + 16
    f_next = np.zeros_like(z)
    f_cur = np.full_like(z, 1e-30)
    f_order = np.zeros_like(z)
    shifts_after = np.zeros_like(z)
    recorded = start == order
    if recorded:
        f_order = f_cur.copy()
    for m in range(start, 0, -1):
        f_prev = (2 * m + 1) / z * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        if m - 1 == order:
            f_order = f_cur.copy()
            recorded = True
        big = np.abs(f_cur) > _RESCALE
        if big.any():
            f_cur = np.where(big, f_cur / _RESCALE, f_cur)
            f_next = np.where(big, f_next / _RESCALE, f_next)
            if recorded:
                shifts_after = shifts_after + big
    # f_cur ~ j_0, f_next ~ j_1 up to a common factor; project onto exact values
    j0 = np.sin(z) / z
    j1 = np.sin(z) / z**2 - np.cos(z) / z
    scale = (j0 * f_cur + j1 * f_next) / (f_cur**2 + f_next**2)
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(f_order * scale)) - shifts_after * _LOG_RESCALE
    return np.sign(f_order * scale) * np.exp(log_mag)


def bessel_j_half(k: int, z):
    """J_{k-1/2}(z) for integer k >= 1 and real z > 0.

    Three regimes: power series for z <= 1, downward (Miller) recurrence for
    1 < z <= k - 1, upward recurrence from sin/cos for z > k - 1.  Accepts
    scalars or arrays.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"k must be an integer >= 1, got {k}")
    k = int(k)
    arr = np.asarray(z, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(arr > 0):
        raise DomainError("bessel_j_half requires z > 0")
    order = k - 1
    out = np.empty_like(arr)
    small = arr <= 1.0
    up = (~small) & (arr > order)
    mid = ~(small | up)
    if small.any():
        out[small] = _spherical_small(order, arr[small])
    if up.any():
        zz = arr[up]
        out[up] = np.sqrt(2 * zz / np.pi) * _spherical_upward(order, zz)
    if mid.any():
        zz = arr[mid]
        out[mid] = np.sqrt(2 * zz / np.pi) * _spherical_miller(order, zz)
    return float(out[0]) if scalar else out


def _bessel_int_miller(n: int, z: float) -> float:
    top = max(n, z)
    start = 2 * ((int(top) + int(math.sqrt(40.0 * top)) + 20) // 2)
    f_next, f_cur = 0.0, 1e-30
    norm = 0.0
    f_n = 0.0
    for j in range(start, 0, -1):
        f_prev = 2.0 * j / z * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        if j - 1 == n:
            f_n = f_cur
        if (j - 1) % 2 == 0 and j - 1 > 0:
            norm += 2.0 * f_cur
        if abs(f_cur) > _RESCALE:
            f_cur /= _RESCALE
            f_next /= _RESCALE
            norm /= _RESCALE
            f_n /= _RESCALE
    norm += f_cur
    return f_n / norm


def bessel_j_int(n: int, z: float, tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """J_n(z) for integer n >= 0 and real z >= 0.

    Power series for z <= 2; beyond that the series cancels, so Miller's
    downward recurrence normalised by J_0 + 2*sum J_2j = 1 takes over.
    """
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n}")
    if z < 0:
        raise DomainError("bessel_j_int requires z >= 0")
    n = int(n)
    if z == 0:
        return 1.0 if n == 0 else 0.0
    if z <= 2.0:
        value = bessel_j_series(float(n), z, tol)
        return value.real
    return _bessel_int_miller(n, float(z))


def bessel_asym_coeff(j: int) -> float:
    """a_j = Gamma(j+1/2) / (2^j j! Gamma(1/2-j))."""
    # Gamma(j+1/2)/Gamma(1/2-j) = (-1)^j Gamma(j+1/2)^2 / pi
    mag = math.exp(2 * math.lgamma(j + 0.5) - math.log(math.pi)
                   - j * math.log(2.0) - math.lgamma(j + 1.0))
    return mag if j % 2 == 0 else -mag


# worst |R| * (2z)^{2d} / (1 + 1/(2z)) over z in [10, 1e3], doubled
J0_REMAINDER_CONSTANTS = {1: 0.6, 2: 4.0, 3: 80.0, 4: 3200.0, 5: 240000.0}
# binary64 evaluation floor relative to the sqrt(2/(pi z)) envelope
J0_ROUNDING_FLOOR = 3e-14


def bessel_j0_asymptotic(z: float, d: int) -> tuple[float, float]:
    """Hankel expansion of J_0 with d cosine and d sine terms.

    Returns (value, remainder_bound).  The bound is the calibrated constant
    times (2z)^(-2d) plus a rounding floor, scaled by sqrt(2/(pi z)).
    """
    if z < 1:
        raise DomainError("bessel_j0_asymptotic requires z >= 1")
    if d not in J0_REMAINDER_CONSTANTS:
        raise DomainError(f"no calibrated remainder constant for d={d}")
    cos_part = math.fsum((-1) ** j * bessel_asym_coeff(2 * j) / z ** (2 * j)
                         for j in range(d))
    sin_part = math.fsum((-1) ** j * bessel_asym_coeff(2 * j + 1) / z ** (2 * j + 1)
                         for j in range(d))
    # cos/sin of z - pi/4 without rounding the shifted argument
    cz, sz = math.cos(z), math.sin(z)
    cw, sw = (cz + sz) / math.sqrt(2.0), (sz - cz) / math.sqrt(2.0)
    env = math.sqrt(2.0 / (math.pi * z))
    value = env * (cw * cos_part - sw * sin_part)
    c = J0_REMAINDER_CONSTANTS[d]
    bound = env * (c * ((2 * z) ** (-2 * d) + (2 * z) ** (-2 * d - 1)) + J0_ROUNDING_FLOOR)
    return value, bound


# ------------------------------------------------------------------ Legendre

def legendre_p(n: int, x):
    """P_n(x) by the three-term recurrence; scalar or array x in [-1, 1]."""
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n}")
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > 1.0):
        raise DomainError("legendre_p requires |x| <= 1")
    scalar = arr.ndim == 0
    p_prev = np.ones_like(arr)
    p_cur = arr.copy()
    if n == 0:
        p_cur = p_prev
    for j in range(1, int(n)):
        p_prev, p_cur = p_cur, ((2 * j + 1) * arr * p_cur - j * p_prev) / (j + 1)
    return float(p_cur) if scalar else p_cur


@lru_cache(maxsize=64)
def legendre_rodrigues_coeffs(n: int) -> tuple[Fraction, ...]:
    """Exact monomial coefficients of P_n from Rodrigues' formula."""
    # (x^2 - 1)^n = sum_j C(n, j) (-1)^(n-j) x^(2j)
    poly = {2 * j: Fraction(math.comb(n, j) * (-1) ** (n - j)) for j in range(n + 1)}
    for _ in range(n):
        poly = {p - 1: c * p for p, c in poly.items() if p > 0}
    scale = Fraction(1, 2**n * math.factorial(n))
    coeffs = [Fraction(0)] * (n + 1)
    for p, c in poly.items():
        coeffs[p] = c * scale
    return tuple(coeffs)


def legendre_rodrigues(n: int, x: float) -> float:
    """Small-n oracle: evaluate the Rodrigues polynomial in exact arithmetic."""
    xf = Fraction(x)
    acc = Fraction(0)
    for c in reversed(legendre_rodrigues_coeffs(n)):
        acc = acc * xf + c
    return float(acc)


def bessel_half_via_legendre(n: int, z: float, quad_tol: float = 1e-12) -> float:
    """J_{n+1/2}(z) through its Legendre-polynomial integral over [0, pi]."""
    if z <= 0:
        raise DomainError("bessel_half_via_legendre requires z > 0")
    if n < 0 or n > 200:
        raise DomainError("bessel_half_via_legendre supports 0 <= n <= 200")

    def integrand(theta):
        c = np.cos(theta)
        return np.exp(1j * z * c) * legendre_p(n, c) * np.sin(theta)

    panels = n + int(math.ceil(z / math.pi)) + 1
    integral = adaptive_quad(integrand, 0.0, math.pi, tol=quad_tol * 1e-2, panels=panels)
    value = (-1j) ** n * math.sqrt(z / (2 * math.pi)) * integral
    if abs(value.imag) > 1e-8 + 1e-6 * abs(value):
        raise ConvergenceError(f"imaginary residue {value.imag:g} in Legendre route")
    return value.real
