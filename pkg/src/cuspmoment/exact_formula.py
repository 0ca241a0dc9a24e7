"""Exact formula for the harmonic twisted first moment at level 1.

For weight 2k the harmonic average of lambda_f(l) L_f(1/2 + u + v) equals
two explicit main terms plus 2*pi*i^(2k) V_1, where V_1 is a double series
over moduli c and frequencies n coprime to c.  The series is truncated at
c*n <= C_max, with C_max chosen so that a rigorous bound on everything
discarded stays below ``tail_target``.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import special as sc

from .arith import mod_inverse_array
from .errors import DomainError, TruncationError
from .quad import adaptive_quad
from .specfun import DEFAULT_TOL, SeriesTolerance, bessel_j_half, gamma_ln, hyp1f1, legendre_p

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class WeightParam:
    """Weight 2k; the root number i^(2k) is +1 exactly when k is even."""

    k: int

    def __post_init__(self):
        if int(self.k) != self.k:
            raise DomainError(f"k must be an integer, got {self.k}")
        if 2 * self.k < 12:
            raise DomainError(f"weight 2k = {2 * self.k} is below 12")

    @property
    def weight(self) -> int:
        return 2 * self.k

    @property
    def root_number(self) -> int:
        return -1 if self.k % 2 else 1

    @classmethod
    def from_weight(cls, weight: int) -> "WeightParam":
        if weight % 2:
            raise DomainError(f"weight must be even, got {weight}")
        return cls(weight // 2)


@dataclass(frozen=True)
class ShiftParams:
    u: complex = 0j
    v: complex = 0j

    @property
    def s(self) -> complex:
        return complex(self.u) + complex(self.v)

    @property
    def is_central(self) -> bool:
        return self.s == 0

    def check(self, w: WeightParam) -> None:
        if abs(complex(self.v).real) > 0:
            raise DomainError(f"Re v must vanish, got v = {self.v}")
        if not abs(complex(self.u).real) < w.k - 1:
            raise DomainError(f"|Re u| must be < k - 1 = {w.k - 1}, got u = {self.u}")


CENTRAL = ShiftParams()


@dataclass(frozen=True)
class TruncationParams:
    tail_target: float = 1e-12
    cn_hard_cap: int = 4_000_000
    series_tol: SeriesTolerance = field(default_factory=SeriesTolerance)
    quad_tol: float = 1e-12
    asym_order_d: int = 3
    chunk_size: int = 1 << 16

    def __post_init__(self):
        if not self.tail_target > 0:
            raise DomainError("tail_target must be positive")
        if self.cn_hard_cap < 1:
            raise DomainError("cn_hard_cap must be >= 1")
        if self.chunk_size < 1:
            raise DomainError("chunk_size must be >= 1")


DEFAULT_TRUNCATION = TruncationParams()


class V1Value(NamedTuple):
    value: complex
    certified_tail: float


@dataclass(frozen=True)
class MomentResult:
    """value == main_term_1 + main_term_2 + 2*pi*i^(2k)*v1_value as assembled.

    ``certified_tail`` bounds the effect of the discarded (c, n) pairs on
    ``value``, i.e. 2*pi times the tail bound on V_1.
    """

    l: int
    k: int
    value: complex | float
    main_term_1: complex
    main_term_2: complex
    v1_value: complex
    certified_tail: float
    cn_max: int


# ------------------------------------------------------------------- phases

def _e(frac: float) -> complex:
    return cmath.exp(2j * math.pi * frac)


def _eighth_phase(eighths: int) -> complex:
    """e(eighths / 8) from the exact eighth root of unity."""
    r = eighths % 8
    if r % 2 == 0:
        return (1, 1j, -1, -1j)[r // 2] + 0j
    h = math.sqrt(0.5)
    return complex(*((h, h), (-h, h), (-h, -h), (h, -h))[r // 2])


def _check_eps(eps1: int) -> int:
    if eps1 not in (1, -1):
        raise DomainError(f"eps1 must be +1 or -1, got {eps1}")
    return eps1


# ---------------------------------------------------------------- I routes

def i_general(eps1: int, shift: ShiftParams, w: WeightParam, x: float,
              tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """I_eps1(u, v, k; x) through Gamma and 1F1, prefactors in log space."""
    eps1 = _check_eps(eps1)
    shift.check(w)
    if not x > 0:
        raise DomainError("x must be positive")
    k = w.k
    a = k - shift.s
    log_pref = (0.5 - k) * math.log(x) + gamma_ln(a) - gamma_ln(2 * k)
    # e(eps/8 - eps*k/4) = e(eps*(1 - 2k)/8)
    phase = _eighth_phase(eps1 * (1 - 2 * k))
    # -e(-eps/4)/x = i*eps/x
    f = hyp1f1(a, 2 * k, 1j * eps1 / x, tol)
    return phase * cmath.exp(log_pref) * f


def i_central(eps1: int, w: WeightParam, x):
    """I_eps1(0, 0, k; x) in closed form through J_{k-1/2}(1/(2x)).

    Accepts scalar or array ``x``.
    """
    eps1 = _check_eps(eps1)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("x must be positive")
    k = w.k
    jv = bessel_j_half(k, 1.0 / (2.0 * xa))
    phase = _eighth_phase(eps1 * (1 - 2 * k)) * np.exp(2j * np.pi * eps1 / (4 * np.pi * xa))
    out = SQRT_PI * phase * jv
    return complex(out) if np.ndim(out) == 0 else out


def i_central_legendre(eps1: int, k_even: int, z: float, quad_tol: float = 1e-12) -> complex:
    """I_eps1(0, 0, k; 1/(2z)) from the Legendre integral over [0, pi/2]."""
    eps1 = _check_eps(eps1)
    if int(k_even) != k_even or k_even % 2 or k_even < 6:
        raise DomainError(f"k must be an even integer >= 6, got {k_even}")
    if not z > 0:
        raise DomainError("z must be positive")
    k = int(k_even)

    def integrand(theta):
        c = np.cos(theta)
        return np.sin(z * c) * legendre_p(k - 1, c) * np.sin(theta)

    panels = k + int(math.ceil(z / math.pi)) + 1
    integral = adaptive_quad(integrand, 0.0, math.pi / 2, tol=quad_tol * 1e-2, panels=panels)
    return -_eighth_phase(eps1) * _e(eps1 * z / (2 * math.pi)) * math.sqrt(2 * z) * integral


def i_central_bound(k: int, x):
    """sqrt(pi) (4x)^(1/2-k) / Gamma(k+1/2): dominates |I_eps1(0, 0, k; x)|."""
    xa = np.asarray(x, dtype=float)
    return SQRT_PI * np.exp((0.5 - k) * np.log(4 * xa) - sc.gammaln(k + 0.5))


# ---------------------------------------------------------- tail certificate

def pair_power_tail(cutoff: int, s: float) -> float:
    """Upper bound for the sum of (cn)^(-s) over all c, n >= 1 with cn > cutoff."""
    if s <= 1:
        raise DomainError("pair_power_tail needs s > 1")
    d = int(cutoff)
    if d < 1:
        raise DomainError("cutoff must be >= 1")
    c = np.arange(1, d + 1, dtype=float)
    m = np.floor(d / c)
    # sum_{n > m} n^-s <= m^(1-s) / (s-1)
    inner = np.exp(-s * np.log(c) + (1 - s) * np.log(m)) / (s - 1)
    outer = float(sc.zeta(s)) * d ** (1 - s) / (s - 1)
    return math.fsum(inner) + outer


def _tail_prefactor(l: int, w: WeightParam, shift: ShiftParams, cutoff: int) -> tuple[float, float]:
    """(prefactor, exponent) with tail <= prefactor * pair_power_tail(cutoff, exponent)."""
    k = w.k
    if shift.is_central:
        pref = math.sqrt(2.0) * math.exp((k - 0.5) * math.log(math.pi * l / 2) - math.lgamma(k + 0.5))
        return pref, float(k)
    s = shift.s
    sigma = abs(s.real)
    a = k - s
    # |1F1(a, 2k; w)| <= 1F1(|a|, 2k; |w|) with |w| = 2 pi l / (cn) < 2 pi l / cutoff
    f_bound = hyp1f1(abs(a), 2 * k, 2 * math.pi * l / cutoff).real
    log_pref = ((s.real - 0.5) * math.log(2 * math.pi) + math.pi * abs(s.imag) / 2
                + gamma_ln(a).real - math.lgamma(2 * k)
                + (k - 0.5) * math.log(2 * math.pi * l))
    return 2.0 * math.exp(log_pref) * f_bound, k - sigma


def v1_tail_bound(l: int, w: WeightParam, shift: ShiftParams, cutoff: int) -> float:
    pref, expo = _tail_prefactor(l, w, shift, cutoff)
    return pref * pair_power_tail(cutoff, expo)


def v1_cutoff(l: int, w: WeightParam, shift: ShiftParams = CENTRAL,
              trunc: TruncationParams = DEFAULT_TRUNCATION) -> tuple[int, float]:
    """Smallest C_max whose certified tail is <= tail_target."""
    def tail(d):
        return v1_tail_bound(l, w, shift, d)

    hi = 1
    while tail(hi) > trunc.tail_target:
        if hi >= trunc.cn_hard_cap:
            raise TruncationError(
                f"cn_hard_cap={trunc.cn_hard_cap} reached with tail {tail(hi):.3g} "
                f"> target {trunc.tail_target:.3g} (l={l}, k={w.k})")
        hi = min(2 * hi, trunc.cn_hard_cap)
    lo = hi // 2
    if lo >= 1 and tail(lo) <= trunc.tail_target:
        return lo, tail(lo)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid) <= trunc.tail_target:
            hi = mid
        else:
            lo = mid
    return hi, tail(hi)


# ------------------------------------------------------------------ V1 sum

def coprime_pairs(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """All (c, n) with gcd(n, c) = 1 and c*n <= cutoff, ordered by c*n then c."""
    c_vals = np.arange(1, cutoff + 1, dtype=np.int64)
    counts = cutoff // c_vals
    c = np.repeat(c_vals, counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    n = np.arange(c.size, dtype=np.int64) - starts + 1
    keep = np.gcd(n, c) == 1
    c, n = c[keep], n[keep]
    order = np.lexsort((c, c * n))
    return c[order], n[order]


@dataclass(frozen=True)
class V1Terms:
    """Per-pair contributions to V_1 (one entry per coprime (c, n))."""

    c: np.ndarray
    n: np.ndarray
    z: np.ndarray
    terms: np.ndarray
    cn_max: int
    certified_tail: float


def _central_chunk(l: int, k: int, c: np.ndarray, n: np.ndarray) -> np.ndarray:
    d = c * n
    z = math.pi * l / d
    jv = bessel_j_half(k, z)
    bound = i_central_bound(k, d / (2 * math.pi * l))
    if np.any(SQRT_PI * np.abs(jv) > bound * (1 + 1e-9) + 1e-300):
        raise ArithmeticError("an I value exceeds its Bessel-bound majorant")
    n_star = mod_inverse_array(n, c)
    r = (n_star * (l % c)) % c
    # n* l / c - l / (2cn) + k/4 over the common denominator 8cn
    den = 8 * d
    num = (8 * n * r - 4 * l + 2 * k * d) % den
    return math.sqrt(2.0) * jv / np.sqrt(d) * np.cos(2 * np.pi * num / den)


def _general_chunk(l: int, w: WeightParam, shift: ShiftParams, c: np.ndarray,
                   n: np.ndarray, tol: SeriesTolerance) -> np.ndarray:
    s = shift.s
    out = np.empty(c.size, dtype=complex)
    n_star = mod_inverse_array(n, c)
    pref_2pi = (2 * math.pi) ** (s - 0.5)
    rot = cmath.exp(-1j * math.pi * s / 2)  # e(-s/4)
    for i, (ci, ni, nsi) in enumerate(zip(c.tolist(), n.tolist(), n_star.tolist())):
        x = ci * ni / (2 * math.pi * l)
        twist = _e(((nsi * l) % ci) / ci)
        base = ci ** (-0.5 - s) * ni ** (-0.5 + s) * pref_2pi
        plus = twist * _eighth_phase(1) * rot * i_general(-1, shift, w, x, tol)
        minus = twist.conjugate() * _eighth_phase(-1) / rot * i_general(1, shift, w, x, tol)
        out[i] = base * (plus + minus)
    return out


def v1_terms(l: int, w: WeightParam, shift: ShiftParams = CENTRAL,
             trunc: TruncationParams = DEFAULT_TRUNCATION, *,
             cn_max: int | None = None, threads: int = 1) -> V1Terms:
    """Evaluate every retained term of V_1.

    The retained set is fixed by ``cn_max`` if given, else by the tail target.
    Chunks of ``trunc.chunk_size`` pairs may run on a thread pool.
    """
    if int(l) != l or l < 1:
        raise DomainError(f"l must be a positive integer, got {l}")
    shift.check(w)
    if cn_max is None:
        cn_max, tail = v1_cutoff(l, w, shift, trunc)
    else:
        tail = v1_tail_bound(l, w, shift, cn_max)
    c, n = coprime_pairs(cn_max)
    bounds = range(0, c.size, trunc.chunk_size)

    def work(start):
        cs, ns = c[start:start + trunc.chunk_size], n[start:start + trunc.chunk_size]
        if shift.is_central:
            return _central_chunk(l, w.k, cs, ns)
        return _general_chunk(l, w, shift, cs, ns, trunc.series_tol)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    terms = np.concatenate(parts) if parts else np.zeros(0)
    z = math.pi * l / (c * n).astype(float)
    return V1Terms(c=c, n=n, z=z, terms=terms, cn_max=cn_max, certified_tail=tail)


def chunked_sum(values: np.ndarray, chunk_size: int) -> complex:
    """Compensated sum per chunk, then an ordered compensated combine."""
    re_parts, im_parts = [], []
    for start in range(0, values.size, chunk_size):
        block = values[start:start + chunk_size]
        re_parts.append(math.fsum(block.real.tolist()))
        im_parts.append(math.fsum(np.imag(block).tolist()))
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def v1_error_series(l: int, w: WeightParam, shift: ShiftParams = CENTRAL,
                    trunc: TruncationParams = DEFAULT_TRUNCATION, *,
                    cn_max: int | None = None, threads: int = 1) -> V1Value:
    """V_1(l; u, v, k) with its certified truncation tail."""
    t = v1_terms(l, w, shift, trunc, cn_max=cn_max, threads=threads)
    return V1Value(chunked_sum(t.terms, trunc.chunk_size), t.certified_tail)


def main_terms(l: int, w: WeightParam, shift: ShiftParams = CENTRAL) -> tuple[complex, complex]:
    s = shift.s
    k = w.k
    if shift.is_central:
        first = complex(1.0 / math.sqrt(l))
        second = w.root_number * first
    else:
        first = cmath.exp(-(0.5 + s) * math.log(l))
        log_second = (2 * s * math.log(2 * math.pi) + gamma_ln(k - s) - gamma_ln(k + s)
                      - (0.5 - s) * math.log(l))
        second = w.root_number * cmath.exp(log_second)
    return first, second


def twisted_moment_exact(l: int, w: WeightParam, shift: ShiftParams = CENTRAL,
                         trunc: TruncationParams = DEFAULT_TRUNCATION, *,
                         cn_max: int | None = None, threads: int = 1) -> MomentResult:
    """Harmonic average of lambda_f(l) L_f(1/2 + u + v) over weight 2k."""
    shift.check(w)
    first, second = main_terms(l, w, shift)
    v1 = v1_error_series(l, w, shift, trunc, cn_max=cn_max, threads=threads)
    err_factor = 2 * math.pi * w.root_number
    value = first + second + err_factor * v1.value
    if shift.is_central:
        if abs(value.imag) > 1e-10:
            raise ArithmeticError(f"central value has imaginary part {value.imag:g}")
        value = value.real
    d = cn_max if cn_max is not None else v1_cutoff(l, w, shift, trunc)[0]
    return MomentResult(l=l, k=w.k, value=value, main_term_1=first, main_term_2=second,
                        v1_value=v1.value, certified_tail=2 * math.pi * v1.certified_tail,
                        cn_max=d)
