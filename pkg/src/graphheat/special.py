"""Complementary error function, the heat-content kernel ``H`` and tail bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

SQRT_PI = math.sqrt(math.pi)
INV_SQRT_PI = 1.0 / SQRT_PI

# below this argument the direct formula loses at most one digit
_H_SWITCH = 2.0
_CF_TERMS = 80


@dataclass(frozen=True)
class TailBudget:
    """Absolute error target for a truncated series."""

    target: float

    def __post_init__(self):
        if not (self.target > 0 and math.isfinite(self.target)):
            raise ValueError(f"tail budget must be positive and finite, got {self.target!r}")


def _check_finite(x) -> None:
    if np.any(np.isnan(x)):
        raise ValueError("erfc/H: NaN argument")


def erfc(x):
    """Complementary error function for floats or arrays."""
    _check_finite(x)
    if np.ndim(x) == 0:
        return math.erfc(float(x))
    return _sp.erfc(np.asarray(x, dtype=float))


def _cf_ratio(x):
    # r(x) with sqrt(pi)*erfcx(x) = 1/(x + r(x)), Laplace continued fraction
    r = np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0
    for k in range(_CF_TERMS, 0, -1):
        r = (0.5 * k) / (x + r)
    return r


def _h_scalar(x: float) -> float:
    if x < _H_SWITCH:
        return math.exp(-x * x) * INV_SQRT_PI - x * math.erfc(x)
    if x > 27.5:
        return 0.0
    r = _cf_ratio(x)
    return math.exp(-x * x) * INV_SQRT_PI * r / (x + r)


def H(x):
    """H(x) = exp(-x^2)/sqrt(pi) - x*erfc(x).

    Positive, decreasing and convex with H' = -erfc and H(0) = 1/sqrt(pi).
    For large x the difference is formed from a continued fraction for
    erfcx so that no cancellation occurs.
    """
    _check_finite(x)
    if np.ndim(x) == 0:
        return _h_scalar(float(x))
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < _H_SWITCH
    xs = x[small]
    out[small] = np.exp(-xs * xs) * INV_SQRT_PI - xs * _sp.erfc(xs)
    big = ~small
    if np.any(big):
        xb = np.minimum(x[big], 27.5)
        r = _cf_ratio(xb)
        vals = np.exp(-xb * xb) * INV_SQRT_PI * r / (xb + r)
        out[big] = np.where(x[big] > 27.5, 0.0, vals)
    return out


def _logsumexp(vals: list[float]) -> float:
    if not vals:
        return -math.inf
    m = max(vals)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(v - m) for v in vals))


def counted_tail(
    coeff: float,
    d_max: int,
    l_min: float,
    t: float,
    L: float,
    shift: int = -1,
    power: int = 0,
    n_start: int = 1,
) -> float:
    """Bound on  sum_{n >= n_start} coeff * d^(n+shift) * n^power * exp(-max(L, n*l_min)^2 / 4t).

    Terms with n below n0 = ceil(L/l_min) are bounded by exp(-L^2/4t) and
    summed explicitly; from n0 on the ratio test gives a geometric majorant.
    Returns inf when that ratio is not below one.
    """
    if coeff <= 0:
        return 0.0
    if L < 0 or l_min <= 0 or t <= 0:
        raise ValueError("counted_tail: invalid parameters")
    d = max(int(d_max), 1)
    log_d = math.log(d)
    n0 = max(n_start, math.ceil(L / l_min - 1e-12), 1)
    logs = []
    for n in range(n_start, n0):
        w = power * math.log(n) if n > 0 else (0.0 if power == 0 else -math.inf)
        logs.append(math.log(coeff) + (n + shift) * log_d + w - L * L / (4 * t))
    e0 = max(L, n0 * l_min)
    log_first = math.log(coeff) + (n0 + shift) * log_d + power * math.log(n0) - e0 * e0 / (4 * t)
    # ratio of consecutive terms at n0, which dominates all later ratios
    log_ratio = log_d - (2 * n0 + 1) * l_min * l_min / (4 * t) + power * math.log((n0 + 1) / n0)
    if log_ratio >= 0:
        return math.inf
    logs.append(log_first - math.log1p(-math.exp(log_ratio)))
    return math.exp(_logsumexp(logs))


def path_tail_bound(d_max: int, l_min: float, t: float, L: float, n_dirichlet: int = 2) -> float:
    """Certified bound on 4*sqrt(t) * sum over Dirichlet-to-Dirichlet directed
    paths longer than L of |alpha(p)| * H(l(p)/2sqrt(t)).

    Uses |alpha| <= 1, H(x) <= exp(-x^2)/sqrt(pi) and at most
    ``n_dirichlet * d_max**(n-1)`` directed paths with n bonds.
    """
    if L < l_min:
        raise ValueError("path_tail_bound requires L >= l_min")
    s = counted_tail(n_dirichlet, d_max, l_min, t, L)
    return 4.0 * math.sqrt(t) * INV_SQRT_PI * s


def small_time_majorant(d_max: int, l_min: float, t: float) -> float:
    """(8 sqrt t / sqrt pi) e^{-l^2/4t} / (1 - d e^{-l^2/2t}); inf outside its window."""
    denom = 1.0 - d_max * math.exp(-l_min * l_min / (2 * t))
    if denom <= 0:
        return math.inf
    return 8.0 * math.sqrt(t) * INV_SQRT_PI * math.exp(-l_min * l_min / (4 * t)) / denom
