"""Process families sharing one single-step interface.

Each family is a construction satisfying the drift regime under study:
mean one-step drift at position x of order rho * x**(-beta) with
beta in [0, 1), increments with enough moments, reflection near 0.

* BDChainParams     nearest-neighbor integer chain (up/stay/down), the
                    workhorse: its conditional drift is known in closed
                    form, enabling exact per-step diagnostics.
* OscDriftParams    same mechanism but the drift coefficient alternates
                    between a and A on dyadic blocks, so the scaled drift
                    has liminf a and limsup A instead of a limit.
* HalfLineWalkParams continuous state, x -> |x + drift + noise| with a
                    pluggable symmetric noise law.
* HiddenStateParams  continuous walk whose noise variance depends on a
                    hidden two-state environment; the observable position
                    alone is not Markov, but its drift envelope is the
                    same for both environments.
* RdWalkParams      d-dimensional walk with outward radial drift
                    rho * max(|x|, 1)**(-beta) and isotropic Gaussian noise.

Stepping functions are pure given an explicit random source, and the
scalar cores are numba-compiled so the Python-level API and the ensemble
kernels run literally the same code, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .rng import Stream, _next_gaussian, _next_uniform
from .theory import _check_beta

# Fraction of the available probability mass the drift bias may use at
# small x; keeps the down-probability strictly positive everywhere while
# leaving the drift condition exact for all x above a finite threshold.
DRIFT_CLAMP = 0.999

_NOISE_KINDS = ("uniform_pm1", "truncated_gaussian", "two_sided_pareto")
KIND_UNIFORM_PM1 = 0
KIND_TRUNC_GAUSS = 1
KIND_PARETO = 2


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class NoiseSpec:
    """Symmetric mean-zero increment noise for continuous-state walks.

    kinds:
      uniform_pm1                +1 or -1 with equal probability
      truncated_gaussian         sigma * Z clipped to [-cap, cap]
      two_sided_pareto           random sign times scale * ((1-U)**(-1/tail_index) - 1);
                                 finite moments exactly of order < tail_index
    """

    kind: str
    sigma: float = 1.0
    cap: float = 4.0
    tail_index: float = 4.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}, expected one of {_NOISE_KINDS}")
        if self.kind == "truncated_gaussian":
            if not self.sigma > 0.0:
                raise ValueError(f"sigma must be positive, got {self.sigma!r}")
            if not self.cap > 0.0:
                raise ValueError(f"cap must be positive, got {self.cap!r}")
        if self.kind == "two_sided_pareto":
            if not self.tail_index > 1.0:
                raise ValueError(
                    f"tail_index must exceed 1 (finite mean), got {self.tail_index!r}"
                )
            if not self.scale > 0.0:
                raise ValueError(f"scale must be positive, got {self.scale!r}")

    @property
    def kind_id(self) -> int:
        return _NOISE_KINDS.index(self.kind)

    @property
    def gamma_noise(self) -> float:
        """Supremum of finite moment orders (inf for bounded kinds)."""
        if self.kind == "two_sided_pareto":
            return self.tail_index
        return math.inf

    def variance(self) -> float:
        """Exact second moment of one noise draw."""
        if self.kind == "uniform_pm1":
            return 1.0
        if self.kind == "truncated_gaussian":
            # E[(sigma Z clipped at alpha=cap/sigma)^2] in closed form
            alpha = self.cap / self.sigma
            phi = math.exp(-0.5 * alpha * alpha) / math.sqrt(2.0 * math.pi)
            big_phi = 0.5 * (1.0 + math.erf(alpha / math.sqrt(2.0)))
            unit = 2.0 * big_phi - 1.0 - 2.0 * alpha * phi + 2.0 * alpha * alpha * (1.0 - big_phi)
            return self.sigma * self.sigma * unit
        if self.tail_index <= 2.0:
            return math.inf
        a, s = self.tail_index, self.scale
        return 2.0 * s * s / ((a - 1.0) * (a - 2.0))


@dataclass(frozen=True)
class BDChainParams:
    """Nearest-neighbor chain on the nonnegative integers.

    From x >= 1 the chain moves +1 / 0 / -1 with probabilities
    (a_x, b, c_x) where a_x - c_x = min(rho * x**-beta, DRIFT_CLAMP*(1-b));
    from 0 it jumps to 1 with probability 1.  rho = 0 is allowed and gives
    the recurrent symmetric chain used as a negative control.
    """

    rho: float
    beta: float
    b: float = 0.0

    def __post_init__(self):
        _check_beta(self.beta)
        if not self.rho >= 0.0:
            raise ValueError(f"rho must be nonnegative, got {self.rho!r}")
        if not 0.0 <= self.b < 1.0:
            raise ValueError(f"b must lie in [0, 1), got {self.b!r}")

    def sigma2(self) -> float:
        """Limiting increment variance (the step is +-1 unless lazy)."""
        return 1.0 - self.b


@dataclass(frozen=True)
class OscDriftParams:
    """Nearest-neighbor chain whose drift coefficient oscillates.

    rho(x) = a when floor(log2(1 + x)) is even, A otherwise, so the scaled
    drift x**beta * mu1(x) visits both a and A along dyadic blocks and has
    no limit when a < A.
    """

    beta: float
    a: float
    A: float

    def __post_init__(self):
        _check_beta(self.beta)
        if not 0.0 < self.a <= self.A:
            raise ValueError(f"need 0 < a <= A, got a={self.a!r}, A={self.A!r}")


@dataclass(frozen=True)
class HalfLineWalkParams:
    """Continuous-state walk x -> |x + rho * max(x,1)**-beta + noise|."""

    rho: float
    beta: float
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec("uniform_pm1"))

    def __post_init__(self):
        _check_beta(self.beta)
        if not self.rho >= 0.0:
            raise ValueError(f"rho must be nonnegative, got {self.rho!r}")


@dataclass(frozen=True)
class HiddenStateParams:
    """Walk modulated by a hidden two-state environment.

    The environment flips with probability p_flip each step and selects
    the Gaussian noise variance (sigma0_sq or sigma1_sq).  The drift is
    the same in both environments, so the observable position satisfies
    the drift envelope conditions even though it is not Markov by itself.
    """

    rho: float
    beta: float
    sigma0_sq: float
    sigma1_sq: float
    p_flip: float

    def __post_init__(self):
        _check_beta(self.beta)
        if not self.rho >= 0.0:
            raise ValueError(f"rho must be nonnegative, got {self.rho!r}")
        if not self.sigma0_sq > 0.0:
            raise ValueError(f"sigma0_sq must be positive, got {self.sigma0_sq!r}")
        if not self.sigma1_sq > 0.0:
            raise ValueError(f"sigma1_sq must be positive, got {self.sigma1_sq!r}")
        if not 0.0 < self.p_flip < 1.0:
            raise ValueError(f"p_flip must lie in (0, 1), got {self.p_flip!r}")


@dataclass(frozen=True)
class RdWalkParams:
    """d-dimensional walk with outward radial drift and Gaussian noise."""

    d: int
    rho: float
    beta: float
    noise_sigma: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.d, int) and self.d >= 2):
            raise ValueError(f"d must be an integer >= 2, got {self.d!r}")
        _check_beta(self.beta, allow_zero=False)
        if not self.rho >= 0.0:
            raise ValueError(f"rho must be nonnegative, got {self.rho!r}")
        if not self.noise_sigma > 0.0:
            raise ValueError(f"noise_sigma must be positive, got {self.noise_sigma!r}")


@dataclass(frozen=True)
class StepResult:
    """One step's outcome plus how many raw uniforms it consumed."""

    next_state: object
    uniforms_consumed: int


# ---------------------------------------------------------------------------
# compiled scalar cores (shared verbatim by the ensemble kernels)


@numba.njit(cache=True)
def _bd_up_prob(rho, beta, b, x):
    # a_x for x >= 1; the clamp keeps c_x > 0 at small x.
    d = rho * float(x) ** (-beta)
    cap = DRIFT_CLAMP * (1.0 - b)
    if d > cap:
        d = cap
    return 0.5 * (1.0 - b + d)


@numba.njit(cache=True)
def _bd_step_core(rho, beta, b, x, u):
    if x == 0:
        return 1
    a = _bd_up_prob(rho, beta, b, x)
    if u < a:
        return x + 1
    if u < a + b:
        return x
    return x - 1


@numba.njit(cache=True)
def _dyadic_level(x):
    # floor(log2(1 + x)) by bit counting; exact for any int64 x >= 0.
    n = x + 1
    lvl = -1
    while n > 0:
        n >>= 1
        lvl += 1
    return lvl


@numba.njit(cache=True)
def _osc_coef(a_coef, A_coef, x):
    if (_dyadic_level(x) & 1) == 0:
        return a_coef
    return A_coef


@numba.njit(cache=True)
def _osc_up_prob(a_coef, A_coef, beta, x):
    return _bd_up_prob(_osc_coef(a_coef, A_coef, x), beta, 0.0, x)


@numba.njit(cache=True)
def _power_drift_core(rho, beta, b, x):
    # Conditional drift of X**(1+beta) at x, known exactly for the chain.
    if x == 0:
        return 1.0
    a = _bd_up_prob(rho, beta, b, x)
    c = 1.0 - b - a
    xf = float(x)
    e = 1.0 + beta
    return a * ((xf + 1.0) ** e - xf**e) + c * ((xf - 1.0) ** e - xf**e)


@numba.njit(cache=True)
def _lyapunov_drift_core(rho, beta, b, x, nu):
    # Conditional drift of (1 + X)**-nu at x >= 1.
    a = _bd_up_prob(rho, beta, b, x)
    c = 1.0 - b - a
    xf = float(x)
    mid = (1.0 + xf) ** (-nu)
    return a * ((2.0 + xf) ** (-nu) - mid) + c * (xf ** (-nu) - mid)


@numba.njit(cache=True)
def _sample_noise(kind, sigma, cap, tail, scale, state, cache, have):
    # Returns (value, state, cache, have, consumed); consumption per kind
    # is fixed so parallel streams stay aligned.
    if kind == KIND_UNIFORM_PM1:
        state, u = _next_uniform(state)
        val = -1.0 if u < 0.5 else 1.0
        return val, state, cache, have, 1
    if kind == KIND_TRUNC_GAUSS:
        consumed = 0 if have else 2
        state, z, cache, have = _next_gaussian(state, cache, have)
        val = sigma * z
        if val > cap:
            val = cap
        elif val < -cap:
            val = -cap
        return val, state, cache, have, consumed
    # two-sided Pareto: magnitude from inverse CDF, sign from a second draw
    state, u1 = _next_uniform(state)
    state, u2 = _next_uniform(state)
    mag = scale * ((1.0 - u1) ** (-1.0 / tail) - 1.0)
    val = -mag if u2 < 0.5 else mag
    return val, state, cache, have, 2


@numba.njit(cache=True)
def _halfline_step_core(rho, beta, kind, sigma, cap, tail, scale, x, state, cache, have):
    drift = rho * max(x, 1.0) ** (-beta)
    val, state, cache, have, consumed = _sample_noise(
        kind, sigma, cap, tail, scale, state, cache, have
    )
    return abs(x + drift + val), state, cache, have, consumed


@numba.njit(cache=True)
def _hidden_step_core(rho, beta, sd0, sd1, p_flip, x, h, state, cache, have):
    # Environment flips first (one uniform), then the walk moves.
    state, u = _next_uniform(state)
    if u < p_flip:
        h = 1 - h
    consumed = 1
    if not have:
        consumed += 2
    state, z, cache, have = _next_gaussian(state, cache, have)
    sd = sd0 if h == 0 else sd1
    drift = rho * max(x, 1.0) ** (-beta)
    return abs(x + drift + sd * z), h, state, cache, have, consumed


# ---------------------------------------------------------------------------
# Python-level stepping API


def bd_probs(p: BDChainParams, x: int) -> tuple[float, float, float]:
    """Transition triple (up, stay, down) at position x."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if x == 0:
        return (1.0, 0.0, 0.0)
    a = float(_bd_up_prob(p.rho, p.beta, p.b, np.int64(x)))
    return (a, p.b, 1.0 - p.b - a)


def bd_step(p: BDChainParams, x: int, u: float) -> int:
    """Advance the chain one step using a single uniform u in [0, 1)."""
    return int(_bd_step_core(p.rho, p.beta, p.b, np.int64(x), u))


def osc_probs(p: OscDriftParams, x: int) -> tuple[float, float, float]:
    """Transition triple of the oscillating-coefficient chain at x."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if x == 0:
        return (1.0, 0.0, 0.0)
    a = float(_osc_up_prob(p.a, p.A, p.beta, np.int64(x)))
    return (a, 0.0, 1.0 - a)


def osc_step(p: OscDriftParams, x: int, u: float) -> int:
    """One step of the oscillating chain; consumes exactly one uniform."""
    if x == 0:
        return 1
    coef = float(_osc_coef(p.a, p.A, np.int64(x)))
    return int(_bd_step_core(coef, p.beta, 0.0, np.int64(x), u))


def osc_coefficient(p: OscDriftParams, x: int) -> float:
    """Drift coefficient in force at x (a on even dyadic blocks, A on odd)."""
    return float(_osc_coef(p.a, p.A, np.int64(x)))


def exact_drift_power(p: BDChainParams, x: int) -> float:
    """Exact conditional drift of X**(1+beta) at x for the chain.

    Tends to rho * (1 + beta) as x grows; this is the per-step increment
    of the predictable part in the decomposition checks.
    """
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x!r}")
    return float(_power_drift_core(p.rho, p.beta, p.b, np.int64(x)))


def exact_drift_lyapunov(p: BDChainParams, x: int, nu: float) -> float:
    """Exact conditional drift of (1 + X)**-nu at x >= 1.

    Nonpositive beyond a finite threshold when the chain drifts outward;
    that sign is the supermartingale certificate of transience.
    """
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x!r}")
    if not nu > 0.0:
        raise ValueError(f"nu must be positive, got {nu!r}")
    return float(_lyapunov_drift_core(p.rho, p.beta, p.b, np.int64(x), nu))


def halfline_step(p: HalfLineWalkParams, x: float, stream: Stream) -> float:
    """One reflected step |x + drift + noise| of the continuous walk."""
    n = p.noise
    x2, st, cache, have, consumed = _halfline_step_core(
        p.rho, p.beta, n.kind_id, n.sigma, n.cap, n.tail_index, n.scale,
        float(x), np.uint64(stream.state), stream.gauss_cache, stream.has_cache,
    )
    stream.state, stream.gauss_cache, stream.has_cache = np.uint64(st), cache, have
    stream.consumed += int(consumed)
    return float(x2)


def hidden_step(p: HiddenStateParams, x: float, h: int, stream: Stream) -> tuple[float, int]:
    """One step of the hidden-environment walk; returns (position, env)."""
    x2, h2, st, cache, have, consumed = _hidden_step_core(
        p.rho, p.beta, math.sqrt(p.sigma0_sq), math.sqrt(p.sigma1_sq), p.p_flip,
        float(x), int(h), np.uint64(stream.state), stream.gauss_cache, stream.has_cache,
    )
    stream.state, stream.gauss_cache, stream.has_cache = np.uint64(st), cache, have
    stream.consumed += int(consumed)
    return float(x2), int(h2)


def rd_norm(xi: np.ndarray) -> float:
    """Euclidean norm summed in coordinate order, bit-matching the engine."""
    acc = 0.0
    for v in np.asarray(xi, dtype=np.float64):
        acc += float(v) * float(v)
    return math.sqrt(acc)


def rd_step(p: RdWalkParams, xi: np.ndarray, stream: Stream) -> np.ndarray:
    """One step of the d-dimensional walk: radial push plus isotropic noise.

    The push points along xi/|xi| (or the first axis from the origin).
    All arithmetic (norm accumulation, per-coordinate updates, Gaussian
    draw order) mirrors the compiled kernel so trajectories match bit
    for bit.
    """
    xi = np.asarray(xi, dtype=np.float64)
    if xi.shape != (p.d,):
        raise ValueError(f"state must have shape ({p.d},), got {xi.shape}")
    norm = rd_norm(xi)
    drift = p.rho * max(norm, 1.0) ** (-p.beta)
    out = xi.copy()
    if norm > 0.0:
        s = drift / norm
        for i in range(p.d):
            out[i] += s * float(xi[i])
    else:
        out[0] += drift
    for i in range(p.d):
        out[i] += p.noise_sigma * stream.gaussian()
    return out


def step_once(params, state, stream: Stream) -> StepResult:
    """Single-step dispatch across families, reporting uniform consumption."""
    before = stream.consumed
    if isinstance(params, BDChainParams):
        nxt = bd_step(params, state, stream.uniform())
    elif isinstance(params, OscDriftParams):
        nxt = osc_step(params, state, stream.uniform())
    elif isinstance(params, HalfLineWalkParams):
        nxt = halfline_step(params, state, stream)
    elif isinstance(params, HiddenStateParams):
        nxt = hidden_step(params, state[0], state[1], stream)
    elif isinstance(params, RdWalkParams):
        nxt = rd_step(params, state, stream)
    else:
        raise TypeError(f"unsupported model parameters: {type(params).__name__}")
    return StepResult(next_state=nxt, uniforms_consumed=stream.consumed - before)
