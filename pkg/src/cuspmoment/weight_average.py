"""Weight-aspect averages of the twisted first moment.

M_1(l) = sum_k h(4k/K) * (harmonic twisted moment at weight 4k), evaluated
through the exact formula (its parameter is 2k, half the weight).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .arith import mobius, sigma
from .errors import DomainError
from .exact_formula import (
    CENTRAL,
    DEFAULT_TRUNCATION,
    TruncationParams,
    WeightParam,
    twisted_moment_exact,
    v1_terms,
)

ZETA2 = math.pi**2 / 6


@dataclass(frozen=True)
class TestFunction:
    """scale * exp(-1/((y - theta1)(theta2 - y))) on (theta1, theta2), else 0."""

    __test__ = False  # not a pytest class

    theta1: float
    theta2: float
    H: float
    scale: float = 1.0

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        inside = (y > self.theta1) & (y < self.theta2)
        yi = y[inside]
        out[inside] = self.scale * np.exp(-1.0 / ((yi - self.theta1) * (self.theta2 - yi)))
        return float(out) if out.ndim == 0 else out

    def scaled(self, factor: float) -> "TestFunction":
        return replace(self, scale=self.scale * factor, H=self.H * factor)


def make_bump(theta1: float = 1.0, theta2: float = 2.0) -> TestFunction:
    if not 0 < theta1 < theta2:
        raise DomainError(f"need 0 < theta1 < theta2, got [{theta1}, {theta2}]")
    proto = TestFunction(theta1, theta2, H=float("nan"))
    H, _ = integrate.quad(lambda y: float(proto(y)), theta1, theta2,
                          epsabs=1e-17, epsrel=1e-13, limit=500)
    return replace(proto, H=H)


def derivative_norms(h: TestFunction, n_max: int = 4, points: int = 4001) -> list[float]:
    """L1 norms of h, h', ..., h^(n_max) by repeated finite differences.

    The grid is kept coarse on purpose: each differencing pass amplifies
    rounding by 1/spacing.
    """
    y = np.linspace(h.theta1, h.theta2, points)
    vals = h(y)
    out = []
    for _ in range(n_max + 1):
        out.append(float(np.trapezoid(np.abs(vals), y)))
        vals = np.gradient(vals, y)
    return out


class PoissonCheck(NamedTuple):
    lhs: float
    defect: float
    scaled_defect: float   # defect * K^a


def weight_indices(h: TestFunction, K: float) -> range:
    """k with 4k inside (K theta1, K theta2)."""
    lo = math.floor(K * h.theta1 / 4) + 1
    hi = math.ceil(K * h.theta2 / 4) - 1
    return range(lo, hi + 1)


def poisson_check(h: TestFunction, K: float, a: int = 2) -> PoissonCheck:
    """sum_k h(4k/K) against H K / 4."""
    ks = np.array(weight_indices(h, K), dtype=float)
    lhs = math.fsum(np.atleast_1d(h(4 * ks / K)).tolist()) if ks.size else 0.0
    defect = abs(lhs - h.H * K / 4)
    return PoissonCheck(lhs, defect, defect * K**a)


@dataclass(frozen=True)
class AverageResult:
    K: float
    l: int
    value: float
    main_term: float
    abs_error: float
    certified_tail_total: float
    rounding_floor: float


def averaged_moment(l: int, K: float, h: TestFunction,
                    trunc: TruncationParams = DEFAULT_TRUNCATION,
                    threads: int = 1) -> AverageResult:
    """Smoothed weight average of the twisted first moment at weights 4k."""
    ks = weight_indices(h, K)
    if ks and 4 * ks[0] < 12:
        raise DomainError(f"K = {K} puts weight {4 * ks[0]} < 12 inside the support")
    contribs, tails, mags = [], [], []
    for k in ks:
        hk = float(h(4 * k / K))
        if hk == 0.0:
            continue
        res = twisted_moment_exact(l, WeightParam(2 * k), CENTRAL, trunc, threads=threads)
        contribs.append(hk * res.value)
        tails.append(hk * res.certified_tail)
        mags.append(abs(hk * res.value))
    value = math.fsum(contribs)
    main = 2 / math.sqrt(l) * h.H * K / 4
    floor = 64 * np.finfo(float).eps * (math.fsum(mags) + abs(main))
    return AverageResult(K=K, l=l, value=value, main_term=main, abs_error=abs(value - main),
                         certified_tail_total=math.fsum(tails), rounding_floor=floor)


@dataclass(frozen=True)
class SplitDiagnostics:
    W1: complex
    W2: complex
    threshold: float
    total: complex
    certified_tail: float


def split_diagnostics(l: int, w: WeightParam, trunc: TruncationParams = DEFAULT_TRUNCATION,
                      cn_max: int | None = None) -> SplitDiagnostics:
    """Split the truncated V_1 at z = pi l / (cn) against weight/20.

    For weight 4k this is the threshold k/5 of the W1/W2 decomposition.
    """
    t = v1_terms(l, w, CENTRAL, trunc, cn_max=cn_max)
    threshold = w.weight / 20
    low = t.z < threshold
    w1 = math.fsum(t.terms[low].real.tolist())
    w2 = math.fsum(t.terms[~low].real.tolist())
    total = math.fsum(t.terms.real.tolist())
    return SplitDiagnostics(W1=complex(w1), W2=complex(w2), threshold=threshold,
                            total=complex(total), certified_tail=t.certified_tail)


def w1_decay_shape(l: int, w: WeightParam, eps: float = 0.1) -> float:
    """l^(1/2+eps) k^-1 (e/20)^(2k) with weight = 4k."""
    k = w.weight / 4
    return math.exp((0.5 + eps) * math.log(l) - math.log(k) + 2 * k * math.log(math.e / 20))


@dataclass(frozen=True)
class ExponentFit:
    slope: float | None
    intercept: float | None
    status: str          # "ok" or "below-floor"
    used_K: tuple[float, ...]


def error_exponent_fit(l: int, K_list, h: TestFunction,
                       trunc: TruncationParams = DEFAULT_TRUNCATION) -> ExponentFit:
    """Least-squares slope of log abs_error against log K.

    Points whose error is under 10x the floor (certificate plus rounding)
    are dropped; with fewer than two left the status is "below-floor".
    """
    K_list = [float(K) for K in K_list]
    if len(K_list) < 3 or any(b <= a for a, b in zip(K_list, K_list[1:])):
        raise DomainError("K_list needs >= 3 strictly increasing entries")
    pts = []
    for K in K_list:
        r = averaged_moment(l, K, h, trunc)
        if r.abs_error >= 10 * (r.certified_tail_total + r.rounding_floor):
            pts.append((K, r.abs_error))
    if len(pts) < 2:
        return ExponentFit(None, None, "below-floor", tuple(K for K, _ in pts))
    xs = np.log([K for K, _ in pts])
    ys = np.log([e for _, e in pts])
    slope, intercept = np.polyfit(xs, ys, 1)
    return ExponentFit(float(slope), float(intercept), "ok", tuple(K for K, _ in pts))


def mollifier_coeffs(M: int, reading: str = "log_ratio") -> np.ndarray:
    """x_m for 1 <= m <= M, stored at index m (index 0 is 0).

    ``reading="log_ratio"`` uses (log(M/m))^2; ``"ratio_of_logs"`` uses
    (log M / log m)^2, which diverges at m = 1 (returned as inf).
    """
    if M < 2:
        raise DomainError("M must be >= 2")
    if reading not in ("log_ratio", "ratio_of_logs"):
        raise ValueError(f"unknown reading {reading!r}")
    log_m_cap = math.log(M)
    x = np.zeros(M + 1)
    for m in range(1, M + 1):
        mu = mobius(m)
        if mu == 0:
            continue
        if reading == "log_ratio":
            shape = math.log(M / m) ** 2
        else:
            shape = math.inf if m == 1 else (log_m_cap / math.log(m)) ** 2
        x[m] = mu * m * shape / (sigma(m) * 2 * ZETA2 * log_m_cap)
    return x


def mollified_first_moment(M: int, K: float, h: TestFunction,
                           trunc: TruncationParams = DEFAULT_TRUNCATION,
                           reading: str = "log_ratio") -> float:
    """sum_{m <= M} x_m / sqrt(m) * M_1(m)."""
    x = mollifier_coeffs(M, reading)
    parts = []
    for m in range(1, M + 1):
        if x[m] == 0.0:
            continue
        parts.append(x[m] / math.sqrt(m) * averaged_moment(m, K, h, trunc).value)
    return math.fsum(parts)


def nonvanishing_proportion(delta: float) -> float:
    if not delta > 0:
        raise DomainError("delta must be positive")
    return delta / (delta + 1)
