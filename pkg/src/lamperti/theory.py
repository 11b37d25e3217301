"""Closed-form limit constants and applicability flags for the drift regime.

Pure functions of the model parameters, no randomness.  Everything here
is the predicted side of a verification run; the estimators compare
ensemble statistics against these values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _check_beta(beta: float, *, allow_zero: bool = True) -> None:
    lo_ok = beta >= 0.0 if allow_zero else beta > 0.0
    if not (lo_ok and beta < 1.0):
        rng = "[0, 1)" if allow_zero else "(0, 1)"
        raise ValueError(f"beta must lie in {rng}, got {beta!r}")


@dataclass(frozen=True)
class DriftParams:
    """Drift envelope: mean drift at x behaves like (coefficient) * x**-beta.

    rho is the leading coefficient when the limit exists; a and A are the
    liminf/limsup coefficients and default to rho for homogeneous models.
    """

    beta: float
    rho: float
    a: float | None = None
    A: float | None = None

    def __post_init__(self):
        if self.a is None:
            object.__setattr__(self, "a", self.rho)
        if self.A is None:
            object.__setattr__(self, "A", self.a)
        _check_beta(self.beta)
        if not self.rho > 0.0:
            raise ValueError(f"rho must be positive, got {self.rho!r}")
        if not 0.0 < self.a <= self.A:
            raise ValueError(f"need 0 < a <= A, got a={self.a!r}, A={self.A!r}")


@dataclass(frozen=True)
class MomentParams:
    """Increment moment data: order gamma with uniform bound B, variance limit."""

    gamma: float
    B: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if not self.B > 0.0:
            raise ValueError(f"B must be positive, got {self.B!r}")
        if not self.sigma2 > 0.0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")


@dataclass(frozen=True)
class TheoremApplicability:
    """Which limit laws the declared moments support, by strict inequality."""

    transience_ok: bool
    sharp_bounds_ok: bool
    clt_ok: bool


def lambda_const(a: float, beta: float) -> float:
    """Escape-speed constant (a * (1 + beta)) ** (1 / (1 + beta)).

    This is the almost-sure limit of X_t / t**(1/(1+beta)) when the drift
    coefficient converges to a.  Computed with pow rather than exp/log so
    that lambda_const(a, 0) == a holds exactly.
    """
    if not a > 0.0:
        raise ValueError(f"a must be positive, got {a!r}")
    _check_beta(beta)
    return (a * (1.0 + beta)) ** (1.0 / (1.0 + beta))


def clt_std(sigma: float, beta: float) -> float:
    """Limiting std of (X_t - lambda * t**(1/(1+beta))) / sqrt(t).

    Equals sigma * sqrt((1+beta)/(1+3*beta)).  beta = 0 is rejected: the
    fluctuation law in that regime is of a different nature and is out of
    scope here.
    """
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    _check_beta(beta, allow_zero=False)
    return sigma * math.sqrt((1.0 + beta) / (1.0 + 3.0 * beta))


def bd_clt_std(b: float, beta: float) -> float:
    """Fluctuation std for the nearest-neighbor chain with lazy probability b.

    The chain's limiting increment variance is 1 - b, so this must agree
    with clt_std(sqrt(1 - b), beta); the test suite asserts the identity.
    """
    if not 0.0 <= b < 1.0:
        raise ValueError(f"b must lie in [0, 1), got {b!r}")
    _check_beta(beta, allow_zero=False)
    return math.sqrt((1.0 - b) * (1.0 + beta) / (1.0 + 3.0 * beta))


def growth_exponent(beta: float) -> float:
    """Escape exponent 1 / (1 + beta): X_t grows like t to this power."""
    _check_beta(beta)
    return 1.0 / (1.0 + beta)


def applicability(m: MomentParams, d: DriftParams) -> TheoremApplicability:
    """Map declared moment order gamma to the laws it licenses.

    Strict float comparisons, no tolerance: these are hypothesis checks,
    not estimates.  gamma = 4 always suffices for every flag when beta > 0.
    """
    transience_ok = m.gamma > 1.0 + d.beta
    sharp_bounds_ok = m.gamma > 2.0 + 2.0 * d.beta
    clt_ok = sharp_bounds_ok and d.beta > 0.0
    return TheoremApplicability(
        transience_ok=transience_ok,
        sharp_bounds_ok=sharp_bounds_ok,
        clt_ok=clt_ok,
    )
