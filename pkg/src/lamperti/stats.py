"""Small statistical toolbox: confidence intervals, one-sample KS test,
weighted least squares.  Self-contained on purpose; the test suite
cross-checks these against independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InsufficientDataError(ValueError):
    """Not enough samples to run the requested statistic."""


@dataclass(frozen=True)
class EstimateCI:
    """Point estimate with standard error and symmetric 95% interval."""

    point: float
    stderr: float
    ci95_lo: float
    ci95_hi: float
    n: int

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "stderr": self.stderr,
            "ci95_lo": self.ci95_lo,
            "ci95_hi": self.ci95_hi,
            "n": self.n,
        }


def estimate_ci(point: float, stderr: float, n: int) -> EstimateCI:
    return EstimateCI(
        point=float(point),
        stderr=float(stderr),
        ci95_lo=float(point - 1.96 * stderr),
        ci95_hi=float(point + 1.96 * stderr),
        n=int(n),
    )


def mean_ci(samples: np.ndarray) -> EstimateCI:
    """Ensemble mean with its standard error."""
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.shape[0]
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {n}")
    se = samples.std(ddof=1) / math.sqrt(n)
    return estimate_ci(samples.mean(), se, n)


def normal_cdf(x: float, mu: float = 0.0, sigma: float = 1.0) -> float:
    """Gaussian CDF via erf (absolute error well below 1e-7)."""
    return 0.5 * (1.0 + math.erf((x - mu) / (sigma * math.sqrt(2.0))))


def kolmogorov_sf(lam: float) -> float:
    """Survival function of the Kolmogorov distribution.

    Alternating series 2 * sum_k (-1)**(k-1) exp(-2 k^2 lam^2), truncated
    once terms drop below 1e-10 and clamped to [0, 1].  For tiny lam the
    series is cut short and the limit value 1 is returned directly.
    """
    if lam <= 1e-3:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 100000):
        term = math.exp(-2.0 * k * k * lam * lam)
        if term < 1e-10:
            break
        total += sign * term
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_test(samples: np.ndarray, cdf) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test.

    cdf maps a value to its model probability; the statistic is the max
    discrepancy between it and the empirical CDF, the p-value comes from
    the asymptotic Kolmogorov distribution of sqrt(n) * D_n.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.shape[0]
    if n < 50:
        raise InsufficientDataError(f"ks_test needs at least 50 samples, got {n}")
    xs = np.sort(samples)
    f = np.array([cdf(v) for v in xs], dtype=np.float64)
    i = np.arange(n, dtype=np.float64)
    d_plus = np.max((i + 1.0) / n - f)
    d_minus = np.max(f - i / n)
    d = max(d_plus, d_minus)
    return float(d), kolmogorov_sf(math.sqrt(n) * d)


def wls_line(x: np.ndarray, y: np.ndarray, w: np.ndarray | None = None):
    """Weighted least squares line y ~ intercept + slope * x.

    Returns (slope, intercept, se_slope, se_intercept); standard errors
    use the weighted residual variance with n - 2 degrees of freedom.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        raise InsufficientDataError(f"need at least 2 points to fit a line, got {n}")
    w = np.ones(n) if w is None else np.asarray(w, dtype=np.float64)
    sw = w.sum()
    xbar = (w * x).sum() / sw
    ybar = (w * y).sum() / sw
    dx = x - xbar
    sxx = (w * dx * dx).sum()
    if sxx <= 0.0:
        raise InsufficientDataError("x values are degenerate (zero weighted spread)")
    slope = (w * dx * (y - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    resid = y - intercept - slope * x
    dof = max(n - 2, 1)
    s2 = (w * resid * resid).sum() / dof
    se_slope = math.sqrt(s2 / sxx)
    se_intercept = math.sqrt(s2 * (1.0 / sw + xbar * xbar / sxx))
    return float(slope), float(intercept), float(se_slope), float(se_intercept)


def trajectory_slopes(log_t: np.ndarray, log_x: np.ndarray) -> np.ndarray:
    """Per-row OLS slope of log_x[i, :] against the shared log_t grid."""
    lt = log_t - log_t.mean()
    denom = float((lt * lt).sum())
    centered = log_x - log_x.mean(axis=1, keepdims=True)
    return (centered * lt).sum(axis=1) / denom
