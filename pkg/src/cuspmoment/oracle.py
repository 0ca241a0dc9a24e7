"""Brute-force twisted moments for weights with a one-dimensional cusp space.

For weight 12, 16, 18, 20, 22, 26 the space of level-1 cusp forms is
spanned by a single Hecke eigenform E4^a E6^b Delta, so the harmonic sum
over forms has one term: omega * lambda(l) * L(1/2).

* q-expansions are built in exact integer arithmetic.
* omega comes from the Petersson formula at m = n = 1, i.e.
  omega = 1 + 2 pi i^(-2k) sum_c S(1,1;c)/c J_(2k-1)(4 pi / c).
* L(1/2) uses the approximate functional equation with an
  incomplete-Gamma kernel:  with kappa = weight/2,

      L(1/2) = sum_n lambda(n) n^(-1/2) [Q(kappa, 2 pi n / X) + Q(kappa, 2 pi n X)]

  where Q is the regularised upper incomplete Gamma function.  It comes
  from shifting the contour of int Lambda(1/2+s) X^(+-s) ds/s and holds
  for every X > 0; agreement across X is the kernel-independence check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import special as sc

from .arith import divisor_sigma, kloosterman, num_divisors
from .errors import ConvergenceError, DomainError
from .specfun import bessel_j_int

SUPPORTED_WEIGHTS = (12, 16, 18, 20, 22, 26)
# weight -> (power of E4, power of E6) multiplying Delta
_EISENSTEIN_POWERS = {12: (0, 0), 16: (1, 0), 18: (0, 1), 20: (2, 0), 22: (1, 1), 26: (2, 1)}
DEFAULT_LENGTH = 200


@dataclass(frozen=True)
class QExpansion:
    """Normalised Hecke eigenvalues lambda(n), stored at index n (index 0 unused)."""

    weight: int
    coeffs: tuple[int, ...]
    length: int

    @property
    def lam(self) -> np.ndarray:
        n = np.arange(len(self.coeffs), dtype=float)
        out = np.zeros(len(self.coeffs))
        scale = (self.weight - 1) / 2.0
        # float(int) first: coefficients exceed the int64 range
        out[1:] = np.array([float(a) for a in self.coeffs[1:]]) / n[1:] ** scale
        return out

    def __getitem__(self, n: int) -> float:
        return float(self.coeffs[n]) / n ** ((self.weight - 1) / 2.0)


@dataclass(frozen=True)
class HarmonicWeight:
    weight: int
    omega: float
    tail_bound: float


def _mul(a: list[int], b: list[int], length: int) -> list[int]:
    prod = np.convolve(np.array(a, dtype=object), np.array(b, dtype=object))
    return [int(x) for x in prod[: length + 1]]


def _euler_product(length: int) -> list[int]:
    """prod (1 - q^n) up to q^length via the pentagonal number theorem."""
    out = [0] * (length + 1)
    j = 0
    while True:
        hit = False
        for g in ((j * (3 * j - 1)) // 2, (j * (3 * j + 1)) // 2):
            if g <= length:
                out[g] = (-1) ** j
                hit = True
        if not hit:
            break
        j += 1
    return out


def _delta_coeffs(length: int) -> list[int]:
    p = _euler_product(length)
    p2 = _mul(p, p, length)
    p4 = _mul(p2, p2, length)
    p8 = _mul(p4, p4, length)
    p16 = _mul(p8, p8, length)
    p24 = _mul(p16, p8, length)
    return [0] + p24[:length]  # multiply by q


def _eisenstein(k: int, length: int) -> list[int]:
    const = {4: 240, 6: -504}[k]
    return [1] + [const * divisor_sigma(n, k - 1) for n in range(1, length + 1)]


def delta_q_expansion(length: int = DEFAULT_LENGTH) -> QExpansion:
    """Ramanujan Delta; coeffs[n] = tau(n)."""
    if length < 1:
        raise DomainError("length must be >= 1")
    return QExpansion(weight=12, coeffs=tuple(_delta_coeffs(length)), length=length)


def eigenform_q_expansion(weight: int, length: int = DEFAULT_LENGTH) -> QExpansion:
    """Un-normalised integer coefficients of E4^a E6^b Delta (coeffs[1] = 1)."""
    if weight not in _EISENSTEIN_POWERS:
        raise DomainError(f"weight {weight} unsupported; use one of {SUPPORTED_WEIGHTS}")
    if length < 1:
        raise DomainError("length must be >= 1")
    a, b = _EISENSTEIN_POWERS[weight]
    series = _delta_coeffs(length)
    for _ in range(a):
        series = _mul(series, _eisenstein(4, length), length)
    for _ in range(b):
        series = _mul(series, _eisenstein(6, length), length)
    return QExpansion(weight=weight, coeffs=tuple(series), length=length)


def save_q_expansion(f: QExpansion, path: str | Path) -> None:
    lines = [f"# weight={f.weight} length={f.length}"]
    lines += [str(a) for a in f.coeffs[1:]]
    Path(path).write_text("\n".join(lines) + "\n")


def load_q_expansion(path: str | Path) -> QExpansion:
    text = Path(path).read_text().splitlines()
    header = dict(tok.split("=") for tok in text[0].lstrip("# ").split())
    coeffs = [0] + [int(line) for line in text[1:] if line.strip()]
    f = QExpansion(weight=int(header["weight"]), coeffs=tuple(coeffs), length=int(header["length"]))
    if len(coeffs) != f.length + 1:
        raise ValueError(f"{path}: expected {f.length} coefficients, found {len(coeffs) - 1}")
    return f


def harmonic_weight(weight: int, c_max: int = 40) -> HarmonicWeight:
    """Petersson diagonal sum; equals the harmonic weight of the unique form.

    The tail beyond c_max uses |S(1,1;c)| <= c and
    |J_nu(x)| <= (x/2)^nu / Gamma(nu+1).
    """
    if weight not in SUPPORTED_WEIGHTS:
        raise DomainError(f"weight {weight} unsupported")
    nu = weight - 1
    sign = (-1) ** (weight // 2)  # i^(-weight)
    terms = [kloosterman(1, 1, c) / c * bessel_j_int(nu, 4 * math.pi / c)
             for c in range(1, c_max + 1)]
    omega = 1.0 + 2 * math.pi * sign * math.fsum(terms)
    # sum_{c > c_max} (2 pi / c)^nu / nu!  <=  (2 pi)^nu c_max^(1-nu) / ((nu-1) nu!)
    tail = 2 * math.pi * math.exp(nu * math.log(2 * math.pi) + (1 - nu) * math.log(c_max)
                                  - math.lgamma(nu + 1)) / (nu - 1)
    if omega <= 0:
        raise ArithmeticError(f"non-positive harmonic weight {omega} at weight {weight}")
    return HarmonicWeight(weight=weight, omega=omega, tail_bound=tail)


def _afe_tail(kappa: int, n0: int, scale: float) -> float:
    # sum_{n >= n0} d(n) n^-1/2 [Q(kappa, 2 pi n/X) + Q(kappa, 2 pi n X)] with
    # d(n) <= 2 sqrt(n) and both Q's <= Q(kappa, 2 pi n / scale), scale = max(X, 1/X);
    # the sum of the decreasing Q is at most its first term plus the integral
    y0 = 2 * math.pi * n0 / scale
    first = sc.gammaincc(kappa, y0)
    integral = kappa * sc.gammaincc(kappa + 1, y0) - y0 * first
    return 4.0 * (first + scale / (2 * math.pi) * integral)


def l_central_value(f: QExpansion, tail_target: float = 1e-12,
                    smoothing: float = 1.0) -> tuple[float, float]:
    """L_f(1/2) with a certified bound on the dropped tail of the AFE."""
    kappa = f.weight // 2
    if kappa % 2:
        return 0.0, 0.0
    if not smoothing > 0:
        raise DomainError("smoothing parameter must be positive")
    scale = max(smoothing, 1.0 / smoothing)
    n_stop = None
    for n0 in range(1, f.length + 1):
        if _afe_tail(kappa, n0, scale) <= tail_target:
            n_stop = n0
            break
    if n_stop is None:
        raise ConvergenceError(
            f"q-expansion length {f.length} too short for tail target {tail_target:g}")
    n = np.arange(1, n_stop, dtype=float)
    lam = f.lam[1:n_stop]
    kern = (sc.gammaincc(kappa, 2 * math.pi * n / smoothing)
            + sc.gammaincc(kappa, 2 * math.pi * n * smoothing))
    value = math.fsum((lam / np.sqrt(n) * kern).tolist())
    return value, _afe_tail(kappa, n_stop, scale)


@dataclass(frozen=True)
class OracleMoment:
    value: float
    omega: float
    lam_l: float
    l_value: float
    tail_bound: float


def brute_force_twisted_moment(l: int, weight: int, length: int = DEFAULT_LENGTH,
                               tail_target: float = 1e-12, c_max: int = 40) -> OracleMoment:
    """omega * lambda_f(l) * L_f(1/2) for the unique eigenform of this weight."""
    if l < 1 or l > length:
        raise DomainError(f"need 1 <= l <= length={length}, got l={l}")
    f = eigenform_q_expansion(weight, length)
    hw = harmonic_weight(weight, c_max)
    lval, ltail = l_central_value(f, tail_target)
    lam = f[l]
    value = hw.omega * lam * lval
    tail = abs(lam) * (hw.omega * ltail + hw.tail_bound * (abs(lval) + ltail))
    return OracleMoment(value=value, omega=hw.omega, lam_l=lam, l_value=lval, tail_bound=tail)


def deligne_ok(f: QExpansion) -> bool:
    """|lambda(p)| <= 2 for every prime p up to the expansion length."""
    lam = f.lam
    for p in range(2, f.length + 1):
        if num_divisors(p) == 2 and abs(lam[p]) > 2.0:
            return False
    return True
