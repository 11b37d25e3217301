"""Deterministic per-trajectory random streams.

Every trajectory owns an independent generator: SplitMix64 mixes
(base_seed XOR traj_id) into a well spread nonzero 64-bit state, which
then drives an xorshift64* stream.  Both algorithms are tiny, fast
inside numba kernels, and have published reference outputs that the
test suite pins, so any reimplementation can be checked bit for bit.

Uniforms are the top 53 bits of the xorshift64* output scaled by 2**-53,
giving values in [0, 1).  Gaussians come from Box-Muller consuming
exactly two uniforms per pair, with the second deviate cached, so the
number of raw draws per step is a fixed function of the model alone.
This fixed-consumption discipline is what makes ensembles reproducible
across thread counts: streams never depend on scheduling.
"""

from __future__ import annotations

import numba
import numpy as np

U64 = np.uint64

_MASK64 = 0xFFFFFFFFFFFFFFFF
_SM_GAMMA = U64(0x9E3779B97F4A7C15)
_SM_MUL1 = U64(0xBF58476D1CE4E5B9)
_SM_MUL2 = U64(0x94D049BB133111EB)
_XS_MUL = U64(0x2545F4914F6CDD1D)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


@numba.njit(cache=True)
def _splitmix64(state):
    # One SplitMix64 update; returns (new_state, output).
    state = state + _SM_GAMMA
    z = state
    z = (z ^ (z >> U64(30))) * _SM_MUL1
    z = (z ^ (z >> U64(27))) * _SM_MUL2
    return state, z ^ (z >> U64(31))


@numba.njit(cache=True)
def _seed_stream(base_seed, traj_id):
    _, out = _splitmix64(base_seed ^ traj_id)
    if out == U64(0):
        out = _SM_GAMMA  # xorshift state must never be zero
    return out


@numba.njit(cache=True)
def _xs_next(state):
    # xorshift64* core: state update is plain xorshift, output is scrambled.
    state ^= state >> U64(12)
    state ^= state << U64(25)
    state ^= state >> U64(27)
    return state, state * _XS_MUL


@numba.njit(cache=True)
def _next_uniform(state):
    state, out = _xs_next(state)
    return state, float(out >> U64(11)) * _INV_2_53


@numba.njit(cache=True)
def _next_gaussian(state, cache, have_cache):
    # Box-Muller pair; consumes 2 uniforms when the cache is empty, 0 otherwise.
    if have_cache:
        return state, cache, 0.0, False
    state, u1 = _next_uniform(state)
    state, u2 = _next_uniform(state)
    r = np.sqrt(-2.0 * np.log(1.0 - u1))
    theta = 2.0 * np.pi * u2
    return state, r * np.cos(theta), r * np.sin(theta), True


@numba.njit(cache=True)
def _fill_uniforms(base_seed, traj_id, out):
    st = _seed_stream(base_seed, traj_id)
    for i in range(out.shape[0]):
        st, u = _next_uniform(st)
        out[i] = u


def _as_u64(value: int) -> np.uint64:
    return np.uint64(int(value) & _MASK64)


def splitmix64(state: int) -> tuple[int, int]:
    """Single SplitMix64 update on a 64-bit state; returns (state, output)."""
    s, out = _splitmix64(_as_u64(state))
    return int(s), int(out)


def seed_stream(base_seed: int, traj_id: int) -> int:
    """Initial xorshift64* state for one trajectory.

    Deterministic in (base_seed, traj_id); distinct trajectory ids give
    distinct, decorrelated streams even for adjacent seeds.
    """
    return int(_seed_stream(_as_u64(base_seed), _as_u64(traj_id)))


def uniform_block(base_seed: int, traj_id: int, n: int) -> np.ndarray:
    """First n uniforms of a trajectory stream, as produced by the kernels."""
    out = np.empty(n, dtype=np.float64)
    _fill_uniforms(_as_u64(base_seed), _as_u64(traj_id), out)
    return out


class Stream:
    """Python-side view of one trajectory stream.

    Thin stateful wrapper over the same compiled routines the simulation
    kernels use, so stepping a model from Python reproduces kernel
    trajectories exactly.  Tracks how many raw uniforms were consumed.
    """

    __slots__ = ("state", "gauss_cache", "has_cache", "consumed")

    def __init__(self, base_seed: int, traj_id: int = 0):
        self.state = np.uint64(seed_stream(base_seed, traj_id))
        self.gauss_cache = 0.0
        self.has_cache = False
        self.consumed = 0

    def uniform(self) -> float:
        # numba boxes uint64 returns as Python int; coerce back on write
        st, u = _next_uniform(U64(self.state))
        self.state = U64(st)
        self.consumed += 1
        return u

    def gaussian(self) -> float:
        consumed = 0 if self.has_cache else 2
        st, z, self.gauss_cache, self.has_cache = _next_gaussian(
            U64(self.state), self.gauss_cache, self.has_cache
        )
        self.state = U64(st)
        self.consumed += consumed
        return z
