"""Deterministic parallel ensemble simulation.

Trajectories are embarrassingly parallel: each owns its RNG stream
(seeded from base_seed XOR traj_id), writes only to its own output
slots, and no reduction happens inside the compiled kernels.  Output is
therefore a pure function of (model, config), independent of thread
count and scheduling; the LAMPERTI_THREADS environment variable only
changes how fast you get it.

State is recorded on a geometric time grid t_k = floor(T**(k/m)) so a
log-log plot of any trajectory is evenly sampled.  Running maxima and
the last visit to zero are maintained at every step, not just at grid
points.  For the nearest-neighbor chains the kernel can also accumulate
the exact conditional drift of X**(1+beta) along the path, which is the
predictable part of the decomposition diagnostics, and transition
recording captures each trajectory's first (x, dx) pairs for drift
re-estimation.

Per-position transition probabilities are precomputed into lookup
tables for speed; the tables are filled by the same compiled scalar
functions used beyond the table range, so the fast path and the
fallback are bit-identical.
"""

from __future__ import annotations

import math
import os
import sys
import time
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import prange

from .models import (
    BDChainParams,
    HalfLineWalkParams,
    HiddenStateParams,
    OscDriftParams,
    RdWalkParams,
    _bd_up_prob,
    _halfline_step_core,
    _hidden_step_core,
    _next_gaussian,
    _next_uniform,
    _osc_coef,
    _power_drift_core,
)
from .rng import U64, _seed_stream

CHUNK = 256  # trajectories per kernel dispatch; keeps interruption responsive
TABLE_SIZE = 1_000_000


class ResourceBudgetError(RuntimeError):
    """Requested recording arrays exceed the configured memory budget."""


@dataclass(frozen=True)
class EnsembleConfig:
    """How many trajectories, how long, and what to record.

    record_transitions keeps the first max_transitions // n_traj
    (x, dx) pairs of every trajectory.  Conditional increment moments
    given x do not depend on the step index, and early steps occupy the
    small-x region where a power-law drift is actually resolvable, so
    the prefix is both unbiased and statistically efficient.
    record_paths dumps the first record_paths trajectories at every step
    (capped at 16; meant for debugging and replay tests, not production).
    """

    n_traj: int
    horizon: int
    base_seed: int = 0
    grid_points: int = 48
    record_doob: bool = False
    record_paths: int = 0
    record_transitions: bool = False
    max_transitions: int = 2_000_000
    start: float = 0.0
    memory_budget_mb: int = 512

    def __post_init__(self):
        if not (isinstance(self.n_traj, int) and self.n_traj >= 1):
            raise ValueError(f"n_traj must be a positive integer, got {self.n_traj!r}")
        if not (isinstance(self.horizon, int) and self.horizon >= 1):
            raise ValueError(f"horizon must be a positive integer, got {self.horizon!r}")
        if not isinstance(self.base_seed, int):
            raise ValueError(f"base_seed must be an integer, got {self.base_seed!r}")
        if not (isinstance(self.grid_points, int) and self.grid_points >= 1):
            raise ValueError(f"grid_points must be a positive integer, got {self.grid_points!r}")
        if not (isinstance(self.record_paths, int) and 0 <= self.record_paths <= 16):
            raise ValueError(f"record_paths must be an integer in [0, 16], got {self.record_paths!r}")
        if not (isinstance(self.max_transitions, int) and self.max_transitions >= 1):
            raise ValueError(f"max_transitions must be a positive integer, got {self.max_transitions!r}")
        if not (isinstance(self.start, (int, float)) and self.start >= 0 and math.isfinite(self.start)):
            raise ValueError(f"start must be a finite nonnegative number, got {self.start!r}")
        if not (isinstance(self.memory_budget_mb, int) and self.memory_budget_mb >= 1):
            raise ValueError(f"memory_budget_mb must be a positive integer, got {self.memory_budget_mb!r}")


@dataclass(frozen=True)
class TrajectoryRecord:
    """Grid samples and diagnostics for a single trajectory."""

    traj_id: int
    samples: list  # (t, x) pairs on the geometric grid
    running_max: list  # sup of x over all steps <= t, aligned with samples
    last_hit_zero: int  # largest t with X_t = 0, or -1 if never
    doob_gap: list | None = None  # (t, |x**(1+beta) - A_t| / t) pairs


@dataclass
class EnsembleResult:
    """Dense per-ensemble arrays; .records gives the per-trajectory view."""

    model: object
    config: EnsembleConfig
    grid: np.ndarray  # (G,) int64 recording times
    x: np.ndarray  # (N, G) state (norm of the state for the R^d walk)
    running_max: np.ndarray  # (N, G)
    last_hit_zero: np.ndarray  # (N,) int64
    doob_gap: np.ndarray | None = None  # (N, G)
    doob_final: np.ndarray | None = None  # (N,) accumulated drift of X**(1+beta) at T
    trans_x: np.ndarray | None = None  # flattened transition positions
    trans_dx: np.ndarray | None = None  # matching increments
    positions: np.ndarray | None = None  # (N, G, d) for the R^d walk
    paths: np.ndarray | None = None  # (record_paths, T+1) full paths
    threads_used: int = 1
    elapsed_s: float = 0.0

    @property
    def n_traj(self) -> int:
        return self.x.shape[0]

    @property
    def horizon(self) -> int:
        return int(self.grid[-1])

    @property
    def records(self) -> list[TrajectoryRecord]:
        out = []
        ts = [int(t) for t in self.grid]
        for i in range(self.n_traj):
            gap = None
            if self.doob_gap is not None:
                gap = list(zip(ts, self.doob_gap[i].tolist()))
            out.append(
                TrajectoryRecord(
                    traj_id=i,
                    samples=list(zip(ts, self.x[i].tolist())),
                    running_max=self.running_max[i].tolist(),
                    last_hit_zero=int(self.last_hit_zero[i]),
                    doob_gap=gap,
                )
            )
        return out

    def subset(self, n: int) -> "EnsembleResult":
        """First n trajectories as a new result (views, not copies)."""
        if not 1 <= n <= self.n_traj:
            raise ValueError(f"subset size must be in [1, {self.n_traj}], got {n!r}")
        return EnsembleResult(
            model=self.model,
            config=self.config,
            grid=self.grid,
            x=self.x[:n],
            running_max=self.running_max[:n],
            last_hit_zero=self.last_hit_zero[:n],
            doob_gap=None if self.doob_gap is None else self.doob_gap[:n],
            doob_final=None if self.doob_final is None else self.doob_final[:n],
            trans_x=self.trans_x,
            trans_dx=self.trans_dx,
            positions=None if self.positions is None else self.positions[:n],
            paths=self.paths,
            threads_used=self.threads_used,
            elapsed_s=self.elapsed_s,
        )


def make_grid(horizon: int, grid_points: int) -> np.ndarray:
    """Recording times floor(T**(k/m)), k=1..m, deduplicated, T included."""
    ts = set()
    for k in range(1, grid_points + 1):
        t = math.floor(horizon ** (k / grid_points))
        ts.add(min(horizon, max(1, t)))
    ts.add(horizon)
    return np.array(sorted(ts), dtype=np.int64)


def configure_threads() -> int:
    """Apply LAMPERTI_THREADS (clamped to the numba launch maximum)."""
    limit = numba.config.NUMBA_NUM_THREADS
    raw = os.environ.get("LAMPERTI_THREADS")
    if raw is None:
        n = limit
    else:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"LAMPERTI_THREADS must be an integer, got {raw!r}") from None
        n = min(max(1, n), limit)
    numba.set_num_threads(n)
    return n


# ---------------------------------------------------------------------------
# compiled kernels


@numba.njit(cache=True)
def _fill_nn_tables(is_osc, rho, a_coef, big_a, beta, b, up_table, drift_table, want_drift):
    # Filled with the same scalar functions the kernels fall back to above
    # the table range, so table and fallback agree bit for bit.
    up_table[0] = 1.0
    if want_drift:
        drift_table[0] = 1.0
    for x in range(1, up_table.shape[0]):
        if is_osc:
            coef = _osc_coef(a_coef, big_a, x)
            bb = 0.0
        else:
            coef = rho
            bb = b
        up_table[x] = _bd_up_prob(coef, beta, bb, x)
        if want_drift:
            drift_table[x] = _power_drift_core(coef, beta, bb, x)


@numba.njit(parallel=True, cache=True)
def _kern_nn(is_osc, rho, a_coef, big_a, beta, b, start, id0, base_seed, horizon,
             grid, up_table, drift_table, record_doob, n_trans, n_paths,
             out_x, out_max, out_lastz, out_doob, out_afinal, out_tx, out_tdx, out_paths):
    n = out_x.shape[0]
    n_grid = grid.shape[0]
    table_len = up_table.shape[0]
    exponent = 1.0 + beta
    for i in prange(n):
        gid = id0 + i
        st = _seed_stream(base_seed, U64(gid))
        x = start
        run_max = float(x)
        last_z = np.int64(0) if x == 0 else np.int64(-1)
        acc = 0.0  # accumulated exact drift of X**(1+beta)
        g = 0
        slot = 0
        if gid < n_paths:
            out_paths[gid, 0] = float(x)
        for t in range(1, horizon + 1):
            # exactly one uniform per step, consumed even by the forced
            # jump from 0, so streams are position-independent
            st, u = _next_uniform(st)
            x_before = x
            if record_doob:
                if x == 0:
                    acc += 1.0
                elif x < table_len:
                    acc += drift_table[x]
                elif is_osc:
                    acc += _power_drift_core(_osc_coef(a_coef, big_a, x), beta, 0.0, x)
                else:
                    acc += _power_drift_core(rho, beta, b, x)
            if x == 0:
                x = np.int64(1)
            else:
                if x < table_len:
                    a = up_table[x]
                elif is_osc:
                    a = _bd_up_prob(_osc_coef(a_coef, big_a, x), beta, 0.0, x)
                else:
                    a = _bd_up_prob(rho, beta, b, x)
                if u < a:
                    x = x + 1
                elif u < a + b:
                    pass
                else:
                    x = x - 1
            if slot < n_trans:
                out_tx[i, slot] = float(x_before)
                out_tdx[i, slot] = float(x - x_before)
                slot += 1
            if gid < n_paths:
                out_paths[gid, t] = float(x)
            xf = float(x)
            if xf > run_max:
                run_max = xf
            if x == 0:
                last_z = np.int64(t)
            if g < n_grid and t == grid[g]:
                out_x[i, g] = xf
                out_max[i, g] = run_max
                if record_doob:
                    out_doob[i, g] = abs(xf**exponent - acc) / t
                g += 1
        out_lastz[i] = last_z
        if record_doob:
            out_afinal[i] = acc


@numba.njit(parallel=True, cache=True)
def _kern_halfline(rho, beta, kind, nsig, ncap, ntail, nscale, start, id0, base_seed,
                   horizon, grid, n_trans, n_paths,
                   out_x, out_max, out_lastz, out_tx, out_tdx, out_paths):
    n = out_x.shape[0]
    n_grid = grid.shape[0]
    for i in prange(n):
        gid = id0 + i
        st = _seed_stream(base_seed, U64(gid))
        cache = 0.0
        have = False
        x = start
        run_max = x
        last_z = np.int64(0) if x == 0.0 else np.int64(-1)
        g = 0
        slot = 0
        if gid < n_paths:
            out_paths[gid, 0] = x
        for t in range(1, horizon + 1):
            x_before = x
            x, st, cache, have, _ = _halfline_step_core(
                rho, beta, kind, nsig, ncap, ntail, nscale, x, st, cache, have
            )
            if slot < n_trans:
                out_tx[i, slot] = x_before
                out_tdx[i, slot] = x - x_before
                slot += 1
            if gid < n_paths:
                out_paths[gid, t] = x
            if x > run_max:
                run_max = x
            if x == 0.0:
                last_z = np.int64(t)
            if g < n_grid and t == grid[g]:
                out_x[i, g] = x
                out_max[i, g] = run_max
                g += 1
        out_lastz[i] = last_z


@numba.njit(parallel=True, cache=True)
def _kern_hidden(rho, beta, sd0, sd1, p_flip, start, id0, base_seed,
                 horizon, grid, n_trans, n_paths,
                 out_x, out_max, out_lastz, out_tx, out_tdx, out_paths):
    n = out_x.shape[0]
    n_grid = grid.shape[0]
    for i in prange(n):
        gid = id0 + i
        st = _seed_stream(base_seed, U64(gid))
        cache = 0.0
        have = False
        x = start
        h = 0  # every trajectory starts in environment 0
        run_max = x
        last_z = np.int64(0) if x == 0.0 else np.int64(-1)
        g = 0
        slot = 0
        if gid < n_paths:
            out_paths[gid, 0] = x
        for t in range(1, horizon + 1):
            x_before = x
            x, h, st, cache, have, _ = _hidden_step_core(
                rho, beta, sd0, sd1, p_flip, x, h, st, cache, have
            )
            if slot < n_trans:
                out_tx[i, slot] = x_before
                out_tdx[i, slot] = x - x_before
                slot += 1
            if gid < n_paths:
                out_paths[gid, t] = x
            if x > run_max:
                run_max = x
            if x == 0.0:
                last_z = np.int64(t)
            if g < n_grid and t == grid[g]:
                out_x[i, g] = x
                out_max[i, g] = run_max
                g += 1
        out_lastz[i] = last_z


@numba.njit(parallel=True, cache=True)
def _kern_rd(d, rho, beta, nsig, start, id0, base_seed, horizon, grid,
             n_trans, n_paths,
             out_x, out_max, out_lastz, out_tx, out_tdx, out_pos, out_paths):
    n = out_x.shape[0]
    n_grid = grid.shape[0]
    for i in prange(n):
        gid = id0 + i
        st = _seed_stream(base_seed, U64(gid))
        cache = 0.0
        have = False
        xi = np.zeros(d)
        xi[0] = start
        # sqrt of the coordinate-order sum of squares, exactly as below
        norm = np.sqrt(start * start)
        run_max = norm
        last_z = np.int64(0) if norm == 0.0 else np.int64(-1)
        g = 0
        slot = 0
        if gid < n_paths:
            out_paths[gid, 0] = norm
        for t in range(1, horizon + 1):
            norm_before = norm
            # radial push along xi/|xi|, first axis from the origin
            dr = rho * max(norm, 1.0) ** (-beta)
            if norm > 0.0:
                s = dr / norm
                for k in range(d):
                    xi[k] += s * xi[k]
            else:
                xi[0] += dr
            # isotropic Gaussian noise, coordinates in fixed order
            for k in range(d):
                st, z, cache, have = _next_gaussian(st, cache, have)
                xi[k] += nsig * z
            acc2 = 0.0
            for k in range(d):
                acc2 += xi[k] * xi[k]
            norm = np.sqrt(acc2)
            if slot < n_trans:
                out_tx[i, slot] = norm_before
                out_tdx[i, slot] = norm - norm_before
                slot += 1
            if gid < n_paths:
                out_paths[gid, t] = norm
            if norm > run_max:
                run_max = norm
            if norm == 0.0:
                last_z = np.int64(t)
            if g < n_grid and t == grid[g]:
                out_x[i, g] = norm
                out_max[i, g] = run_max
                for k in range(d):
                    out_pos[i, g, k] = xi[k]
                g += 1
        out_lastz[i] = last_z


# ---------------------------------------------------------------------------
# orchestration


_DUMMY2 = np.zeros((0, 0), dtype=np.float64)
_DUMMY1 = np.zeros(0, dtype=np.float64)


def _estimate_bytes(cfg: EnsembleConfig, n_grid: int, n_trans: int, d: int) -> int:
    n = cfg.n_traj
    per_grid = 2 + (1 if cfg.record_doob else 0)
    total = n * n_grid * 8 * per_grid
    total += n * 16  # last_hit_zero + doob_final
    if cfg.record_transitions:
        total += n * n_trans * 16
    if cfg.record_paths:
        total += cfg.record_paths * (cfg.horizon + 1) * 8
    if d > 1:
        total += n * n_grid * d * 8
    return total


def run_ensemble(model, cfg: EnsembleConfig) -> EnsembleResult:
    """Simulate cfg.n_traj independent trajectories of the given model.

    Output depends only on (model, cfg): trajectories are seeded by id,
    written to disjoint slots, and reduced in id order afterwards.
    Raises ResourceBudgetError before allocating if the recording arrays
    would exceed cfg.memory_budget_mb.
    """
    threads = configure_threads()
    if cfg.record_doob and not isinstance(model, BDChainParams):
        raise ValueError(
            "record_doob requires a model with exactly computable conditional "
            f"drift (the bd chain); got {type(model).__name__}"
        )
    is_chain = isinstance(model, (BDChainParams, OscDriftParams))
    if is_chain and cfg.start != int(cfg.start):
        raise ValueError(f"chain models need an integer start, got {cfg.start!r}")

    n = cfg.n_traj
    horizon = cfg.horizon
    grid = make_grid(horizon, cfg.grid_points)
    n_grid = grid.shape[0]
    d = model.d if isinstance(model, RdWalkParams) else 1

    n_trans = 0
    if cfg.record_transitions:
        # per-trajectory prefix: the conditional increment moments given x
        # are time-invariant, and early steps visit the small-x region where
        # the power law carries its signal
        n_trans = min(horizon, cfg.max_transitions // n)
        if n_trans == 0:
            raise ValueError(
                f"max_transitions={cfg.max_transitions} gives no room for "
                f"{n} trajectories; raise it to at least n_traj"
            )

    need = _estimate_bytes(cfg, n_grid, n_trans, d)
    budget = cfg.memory_budget_mb * (1 << 20)
    if need > budget:
        raise ResourceBudgetError(
            f"recording arrays need about {need / (1 << 20):.0f} MiB, "
            f"budget is {cfg.memory_budget_mb} MiB; lower n_traj, grid_points, "
            "or the recording options, or raise memory_budget_mb"
        )

    out_x = np.zeros((n, n_grid))
    out_max = np.zeros((n, n_grid))
    out_lastz = np.zeros(n, dtype=np.int64)
    out_doob = np.zeros((n, n_grid)) if cfg.record_doob else _DUMMY2
    out_afinal = np.zeros(n) if cfg.record_doob else _DUMMY1
    out_tx = np.zeros((n, n_trans)) if n_trans else _DUMMY2
    out_tdx = np.zeros((n, n_trans)) if n_trans else _DUMMY2
    n_paths = min(cfg.record_paths, n)
    out_paths = np.zeros((n_paths, horizon + 1)) if n_paths else _DUMMY2
    out_pos = np.zeros((n, n_grid, d)) if d > 1 else np.zeros((0, 0, 0))

    seed = np.uint64(cfg.base_seed & 0xFFFFFFFFFFFFFFFF)
    t0 = time.perf_counter()
    done = 0
    try:
        for lo in range(0, n, CHUNK):
            hi = min(n, lo + CHUNK)
            sl = slice(lo, hi)
            if isinstance(model, BDChainParams):
                up, dr = _nn_tables(model, cfg.record_doob)
                _kern_nn(False, model.rho, 0.0, 0.0, model.beta, model.b,
                         np.int64(cfg.start), lo, seed, horizon, grid, up, dr,
                         cfg.record_doob, n_trans, n_paths,
                         out_x[sl], out_max[sl], out_lastz[sl], out_doob[sl],
                         out_afinal[sl], out_tx[sl], out_tdx[sl], out_paths)
            elif isinstance(model, OscDriftParams):
                up, dr = _nn_tables(model, False)
                _kern_nn(True, 0.0, model.a, model.A, model.beta, 0.0,
                         np.int64(cfg.start), lo, seed, horizon, grid, up, dr,
                         False, n_trans, n_paths,
                         out_x[sl], out_max[sl], out_lastz[sl], out_doob[sl],
                         out_afinal[sl], out_tx[sl], out_tdx[sl], out_paths)
            elif isinstance(model, HalfLineWalkParams):
                ns = model.noise
                _kern_halfline(model.rho, model.beta, ns.kind_id, ns.sigma, ns.cap,
                               ns.tail_index, ns.scale, float(cfg.start), lo, seed,
                               horizon, grid, n_trans, n_paths,
                               out_x[sl], out_max[sl], out_lastz[sl],
                               out_tx[sl], out_tdx[sl], out_paths)
            elif isinstance(model, HiddenStateParams):
                _kern_hidden(model.rho, model.beta, math.sqrt(model.sigma0_sq),
                             math.sqrt(model.sigma1_sq), model.p_flip,
                             float(cfg.start), lo, seed, horizon, grid,
                             n_trans, n_paths,
                             out_x[sl], out_max[sl], out_lastz[sl],
                             out_tx[sl], out_tdx[sl], out_paths)
            elif isinstance(model, RdWalkParams):
                _kern_rd(model.d, model.rho, model.beta, model.noise_sigma,
                         float(cfg.start), lo, seed, horizon, grid,
                         n_trans, n_paths,
                         out_x[sl], out_max[sl], out_lastz[sl],
                         out_tx[sl], out_tdx[sl], out_pos[sl], out_paths)
            else:
                raise TypeError(f"unsupported model parameters: {type(model).__name__}")
            done = hi
    except KeyboardInterrupt:
        print(f"interrupted: {done}/{n} trajectories completed", file=sys.stderr)
        raise
    elapsed = time.perf_counter() - t0

    return EnsembleResult(
        model=model,
        config=cfg,
        grid=grid,
        x=out_x,
        running_max=out_max,
        last_hit_zero=out_lastz,
        doob_gap=out_doob if cfg.record_doob else None,
        doob_final=out_afinal if cfg.record_doob else None,
        trans_x=out_tx.reshape(-1) if n_trans else None,
        trans_dx=out_tdx.reshape(-1) if n_trans else None,
        positions=out_pos if d > 1 else None,
        paths=out_paths if n_paths else None,
        threads_used=threads,
        elapsed_s=elapsed,
    )


_table_cache: dict = {}


def _nn_tables(model, want_drift: bool):
    """Transition (and optionally drift) lookup tables for chain models."""
    key = (model, want_drift)
    hit = _table_cache.get(key)
    if hit is not None:
        return hit
    up = np.empty(TABLE_SIZE)
    dr = np.empty(TABLE_SIZE) if want_drift else _DUMMY1
    if isinstance(model, BDChainParams):
        _fill_nn_tables(False, model.rho, 0.0, 0.0, model.beta, model.b, up, dr, want_drift)
    else:
        _fill_nn_tables(True, 0.0, model.a, model.A, model.beta, 0.0, up, dr, want_drift)
    _table_cache.clear()  # keep at most one model's tables around
    _table_cache[key] = (up, dr)
    return up, dr


# ---------------------------------------------------------------------------
# CSV output


def _fmt(v: float) -> str:
    return format(v, ".17g")


def write_records_csv(result: EnsembleResult, path: str) -> None:
    """Grid samples as CSV, one row per (trajectory, grid time).

    Columns: traj_id,t,x,running_max plus doob_gap when recorded.  LF
    line endings, 17 significant digits so values round-trip exactly.
    For the R^d walk the x column carries the norm of the state.
    """
    with_doob = result.doob_gap is not None
    grid = result.grid
    with open(path, "w", newline="") as f:
        header = "traj_id,t,x,running_max"
        if with_doob:
            header += ",doob_gap"
        f.write(header + "\n")
        for i in range(result.n_traj):
            xi = result.x[i]
            mi = result.running_max[i]
            di = result.doob_gap[i] if with_doob else None
            for g in range(grid.shape[0]):
                row = f"{i},{grid[g]},{_fmt(xi[g])},{_fmt(mi[g])}"
                if with_doob:
                    row += f",{_fmt(di[g])}"
                f.write(row + "\n")


def write_transitions_csv(result: EnsembleResult, path: str) -> None:
    """Recorded transition pairs as CSV with columns x,dx."""
    if result.trans_x is None:
        raise ValueError("no transitions recorded; enable record_transitions")
    with open(path, "w", newline="") as f:
        f.write("x,dx\n")
        for a, b in zip(result.trans_x, result.trans_dx):
            f.write(f"{_fmt(a)},{_fmt(b)}\n")
