"""Engine checks: the compiled ensemble kernels against a pure-Python
re-simulation (bit-for-bit), grid construction, recording semantics,
determinism across thread settings, budgets, and CSV round trips."""

import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lamperti import (
    BDChainParams,
    EnsembleConfig,
    HalfLineWalkParams,
    HiddenStateParams,
    NoiseSpec,
    OscDriftParams,
    RdWalkParams,
    ResourceBudgetError,
    Stream,
    bd_step,
    exact_drift_power,
    halfline_step,
    hidden_step,
    make_grid,
    osc_step,
    rd_norm,
    rd_step,
    run_ensemble,
    write_records_csv,
    write_transitions_csv,
)

REF = BDChainParams(rho=0.5, beta=0.5, b=0.0)


# ---------------------------------------------------------------------------
# geometric grid


def test_make_grid_pinned_example():
    got = make_grid(100, 10).tolist()
    assert got == [1, 2, 3, 6, 10, 15, 25, 39, 63, 100]


def test_make_grid_tiny_horizons():
    assert make_grid(1, 10).tolist() == [1]
    assert make_grid(2, 4).tolist() == [1, 2]


@given(st.integers(min_value=1, max_value=10**9), st.integers(min_value=1, max_value=200))
def test_make_grid_properties(horizon, m):
    grid = make_grid(horizon, m)
    assert grid.dtype == np.int64
    assert grid[-1] == horizon
    assert grid[0] >= 1
    assert np.all(np.diff(grid) > 0)  # strictly increasing, deduplicated
    assert len(grid) <= m + 1
    want = {min(horizon, max(1, math.floor(horizon ** (k / m)))) for k in range(1, m + 1)}
    want.add(horizon)
    assert set(grid.tolist()) == want


# ---------------------------------------------------------------------------
# bit-exact replay of every kernel


def _replay(model, cfg):
    """Re-simulate an ensemble in pure Python with the documented semantics:
    one stream per trajectory id, one forced uniform per chain step, prefix
    transition recording, running max and zero bookkeeping after each step."""
    horizon = cfg.horizon
    grid = make_grid(horizon, cfg.grid_points)
    n_grid = len(grid)
    n = cfg.n_traj
    n_trans = min(horizon, cfg.max_transitions // n) if cfg.record_transitions else 0
    is_bd = isinstance(model, BDChainParams)
    is_chain = isinstance(model, (BDChainParams, OscDriftParams))
    d = model.d if isinstance(model, RdWalkParams) else 1

    x_out = np.zeros((n, n_grid))
    max_out = np.zeros((n, n_grid))
    lastz_out = np.zeros(n, dtype=np.int64)
    doob_out = np.zeros((n, n_grid)) if cfg.record_doob else None
    afinal_out = np.zeros(n) if cfg.record_doob else None
    tx_out = np.zeros((n, n_trans))
    tdx_out = np.zeros((n, n_trans))
    pos_out = np.zeros((n, n_grid, d)) if d > 1 else None

    for i in range(n):
        s = Stream(cfg.base_seed, i)
        if is_chain:
            x = int(cfg.start)
            value = float(x)
        elif isinstance(model, RdWalkParams):
            xi = np.zeros(d)
            xi[0] = cfg.start
            value = rd_norm(xi)
        else:
            x = float(cfg.start)
            h = 0
            value = x
        run_max = value
        last_z = 0 if value == 0.0 else -1
        acc = 0.0
        g = 0
        for t in range(1, horizon + 1):
            before = value
            if is_chain:
                u = s.uniform()
                if cfg.record_doob:
                    acc += exact_drift_power(model, x)
                x = bd_step(model, x, u) if is_bd else osc_step(model, x, u)
                value = float(x)
            elif isinstance(model, RdWalkParams):
                xi = rd_step(model, xi, s)
                value = rd_norm(xi)
            elif isinstance(model, HiddenStateParams):
                x, h = hidden_step(model, x, h, s)
                value = x
            else:
                x = halfline_step(model, x, s)
                value = x
            if t <= n_trans:
                tx_out[i, t - 1] = before
                tdx_out[i, t - 1] = value - before
            if value > run_max:
                run_max = value
            if value == 0.0:
                last_z = t
            if g < n_grid and t == grid[g]:
                x_out[i, g] = value
                max_out[i, g] = run_max
                if cfg.record_doob:
                    doob_out[i, g] = abs(value ** (1.0 + model.beta) - acc) / t
                if d > 1:
                    pos_out[i, g] = xi
                g += 1
        lastz_out[i] = last_z
        if cfg.record_doob:
            afinal_out[i] = acc
    return x_out, max_out, lastz_out, doob_out, afinal_out, tx_out, tdx_out, pos_out


_REPLAY_CASES = [
    ("bd", REF,
     EnsembleConfig(n_traj=6, horizon=400, base_seed=91, grid_points=12,
                    record_doob=True, record_transitions=True, max_transitions=1200)),
    ("bd_lazy_started", BDChainParams(rho=0.4, beta=0.25, b=0.3),
     EnsembleConfig(n_traj=6, horizon=400, base_seed=92, grid_points=12,
                    record_doob=True, start=3.0)),
    ("osc", OscDriftParams(beta=0.5, a=0.3, A=0.7),
     EnsembleConfig(n_traj=6, horizon=400, base_seed=93, grid_points=12,
                    record_transitions=True, max_transitions=600)),
    ("halfline_pm1", HalfLineWalkParams(rho=0.5, beta=0.5),
     EnsembleConfig(n_traj=6, horizon=400, base_seed=94, grid_points=12,
                    record_transitions=True, max_transitions=1200)),
    ("halfline_gauss", HalfLineWalkParams(
        rho=0.5, beta=0.5, noise=NoiseSpec("truncated_gaussian", sigma=1.2, cap=3.0)),
     EnsembleConfig(n_traj=6, horizon=400, base_seed=95, grid_points=12, start=2.5)),
    ("halfline_pareto", HalfLineWalkParams(
        rho=0.5, beta=0.5, noise=NoiseSpec("two_sided_pareto", tail_index=4.0, scale=0.8)),
     EnsembleConfig(n_traj=6, horizon=400, base_seed=96, grid_points=12)),
    ("hidden", HiddenStateParams(rho=0.5, beta=0.5, sigma0_sq=1.0, sigma1_sq=4.0, p_flip=0.3),
     EnsembleConfig(n_traj=6, horizon=400, base_seed=97, grid_points=12)),
    ("rd2", RdWalkParams(d=2, rho=0.5, beta=0.5),
     EnsembleConfig(n_traj=4, horizon=300, base_seed=98, grid_points=10,
                    record_transitions=True, max_transitions=800)),
    ("rd3_started", RdWalkParams(d=3, rho=0.5, beta=0.5),
     EnsembleConfig(n_traj=4, horizon=300, base_seed=99, grid_points=10, start=2.5)),
]


@pytest.mark.parametrize("label,model,cfg", _REPLAY_CASES, ids=[c[0] for c in _REPLAY_CASES])
def test_kernel_matches_python_replay(label, model, cfg):
    res = run_ensemble(model, cfg)
    x, mx, lz, doob, afinal, tx, tdx, pos = _replay(model, cfg)
    assert np.array_equal(res.x, x)  # exact, no tolerance
    assert np.array_equal(res.running_max, mx)
    assert np.array_equal(res.last_hit_zero, lz)
    if cfg.record_doob:
        assert np.array_equal(res.doob_gap, doob)
        assert np.array_equal(res.doob_final, afinal)
    if cfg.record_transitions:
        assert np.array_equal(res.trans_x, tx.reshape(-1))
        assert np.array_equal(res.trans_dx, tdx.reshape(-1))
    if pos is not None:
        assert np.array_equal(res.positions, pos)


@given(st.integers(min_value=0, max_value=2**62), st.integers(min_value=1, max_value=5),
       st.integers(min_value=1, max_value=150))
@settings(max_examples=20, deadline=None)
def test_bd_replay_under_random_seeds(seed, n, horizon):
    cfg = EnsembleConfig(n_traj=n, horizon=horizon, base_seed=seed, grid_points=6)
    res = run_ensemble(REF, cfg)
    x, mx, lz, *_ = _replay(REF, cfg)
    assert np.array_equal(res.x, x)
    assert np.array_equal(res.running_max, mx)
    assert np.array_equal(res.last_hit_zero, lz)


def test_doob_gap_hand_computed():
    # start 0: step 1 is the sure jump to 1 (drift 1), step 2 moves to 2 or 0
    cfg = EnsembleConfig(n_traj=8, horizon=2, base_seed=321, grid_points=2,
                         record_doob=True)
    res = run_ensemble(REF, cfg)
    drift_at_1 = 0.75 * (2.0**1.5 - 1.0) - 0.25
    acc = 1.0 + drift_at_1
    for i in range(8):
        x2 = res.x[i, -1]
        assert x2 in (2.0, 0.0)
        assert res.doob_gap[i, -1] == abs(x2**1.5 - acc) / 2
        assert res.doob_final[i] == acc


# ---------------------------------------------------------------------------
# determinism


def test_repeat_run_identical():
    cfg = EnsembleConfig(n_traj=16, horizon=3000, base_seed=5150, grid_points=16,
                         record_doob=True, record_transitions=True, max_transitions=8000)
    a = run_ensemble(REF, cfg)
    b = run_ensemble(REF, cfg)
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.running_max, b.running_max)
    assert np.array_equal(a.doob_gap, b.doob_gap)
    assert np.array_equal(a.trans_x, b.trans_x)
    assert a.x.dtype == np.float64 and a.grid.dtype == np.int64


def test_thread_env_does_not_change_output(monkeypatch):
    cfg = EnsembleConfig(n_traj=8, horizon=2000, base_seed=61, grid_points=10)
    monkeypatch.delenv("LAMPERTI_THREADS", raising=False)
    base = run_ensemble(REF, cfg)
    monkeypatch.setenv("LAMPERTI_THREADS", "1")
    one = run_ensemble(REF, cfg)
    assert one.threads_used == 1
    monkeypatch.setenv("LAMPERTI_THREADS", "8")
    eight = run_ensemble(REF, cfg)
    assert np.array_equal(base.x, one.x)
    assert np.array_equal(base.x, eight.x)
    assert np.array_equal(base.last_hit_zero, eight.last_hit_zero)


def test_thread_env_validation(monkeypatch):
    monkeypatch.setenv("LAMPERTI_THREADS", "plenty")
    cfg = EnsembleConfig(n_traj=2, horizon=10, base_seed=0)
    with pytest.raises(ValueError):
        run_ensemble(REF, cfg)


def test_chunk_boundary_consistency():
    # 300 crosses the 256-trajectory dispatch chunk; ids must not care
    small = run_ensemble(REF, EnsembleConfig(n_traj=300, horizon=1500, base_seed=77))
    large = run_ensemble(REF, EnsembleConfig(n_traj=512, horizon=1500, base_seed=77))
    assert np.array_equal(small.x, large.x[:300])
    assert np.array_equal(small.last_hit_zero, large.last_hit_zero[:300])


# ---------------------------------------------------------------------------
# recording semantics against full paths


def test_grid_samples_match_paths(small_run):
    res = small_run
    for i in range(res.paths.shape[0]):
        path = res.paths[i]
        for g, t in enumerate(res.grid):
            assert res.x[i, g] == path[t]
            assert res.running_max[i, g] == path[: t + 1].max()


def test_last_hit_zero_matches_paths(small_run):
    res = small_run
    for i in range(res.paths.shape[0]):
        zeros = np.flatnonzero(res.paths[i] == 0.0)
        want = int(zeros[-1]) if zeros.size else -1
        assert res.last_hit_zero[i] == want


def test_transitions_are_per_trajectory_prefix(small_run):
    res = small_run
    cfg = res.config
    n_trans = min(cfg.horizon, cfg.max_transitions // cfg.n_traj)
    assert res.trans_x.shape == (cfg.n_traj * n_trans,)
    tx = res.trans_x.reshape(cfg.n_traj, n_trans)
    tdx = res.trans_dx.reshape(cfg.n_traj, n_trans)
    for i in range(res.paths.shape[0]):
        path = res.paths[i]
        assert np.array_equal(tx[i], path[:n_trans])
        assert np.array_equal(tdx[i], path[1 : n_trans + 1] - path[:n_trans])


def test_start_value_recorded(small_run):
    assert np.all(small_run.paths[:, 0] == 0.0)
    started = run_ensemble(REF, EnsembleConfig(
        n_traj=4, horizon=50, base_seed=11, record_paths=4, start=3.0))
    assert np.all(started.paths[:, 0] == 3.0)
    assert np.all(started.last_hit_zero[started.paths.min(axis=1) > 0] == -1)


def test_records_view(small_run):
    recs = small_run.records
    assert len(recs) == small_run.n_traj
    r0 = recs[0]
    assert r0.traj_id == 0
    assert r0.samples == list(zip(small_run.grid.tolist(), small_run.x[0].tolist()))
    assert r0.running_max == small_run.running_max[0].tolist()
    assert r0.doob_gap[-1][0] == small_run.horizon
    assert isinstance(r0.last_hit_zero, int)


def test_subset_views(small_run):
    sub = small_run.subset(10)
    assert sub.n_traj == 10
    assert np.array_equal(sub.x, small_run.x[:10])
    assert sub.x.base is not None  # view, not a copy
    with pytest.raises(ValueError):
        small_run.subset(0)
    with pytest.raises(ValueError):
        small_run.subset(small_run.n_traj + 1)


# ---------------------------------------------------------------------------
# validation and budgets


def test_chain_start_must_be_integer():
    with pytest.raises(ValueError):
        run_ensemble(REF, EnsembleConfig(n_traj=2, horizon=10, base_seed=0, start=2.5))
    run_ensemble(HalfLineWalkParams(rho=0.5, beta=0.5),
                 EnsembleConfig(n_traj=2, horizon=10, base_seed=0, start=2.5))


def test_record_doob_needs_exact_drift():
    cfg = EnsembleConfig(n_traj=2, horizon=10, base_seed=0, record_doob=True)
    with pytest.raises(ValueError, match="record_doob"):
        run_ensemble(OscDriftParams(beta=0.5, a=0.3, A=0.7), cfg)
    with pytest.raises(ValueError, match="record_doob"):
        run_ensemble(HalfLineWalkParams(rho=0.5, beta=0.5), cfg)


def test_memory_budget_enforced():
    cfg = EnsembleConfig(n_traj=2000, horizon=10**6, base_seed=0, grid_points=1000,
                         memory_budget_mb=1)
    with pytest.raises(ResourceBudgetError, match="MiB"):
        run_ensemble(REF, cfg)


def test_max_transitions_must_fit_trajectories():
    cfg = EnsembleConfig(n_traj=100, horizon=10, base_seed=0,
                         record_transitions=True, max_transitions=99)
    with pytest.raises(ValueError, match="max_transitions"):
        run_ensemble(REF, cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        EnsembleConfig(n_traj=0, horizon=10)
    with pytest.raises(ValueError):
        EnsembleConfig(n_traj=1, horizon=0)
    with pytest.raises(ValueError):
        EnsembleConfig(n_traj=1, horizon=10, record_paths=17)
    with pytest.raises(ValueError):
        EnsembleConfig(n_traj=1, horizon=10, start=-1.0)
    with pytest.raises(ValueError):
        EnsembleConfig(n_traj=1, horizon=10, start=math.inf)


# ---------------------------------------------------------------------------
# CSV output


def test_records_csv_round_trip(tmp_path, small_run):
    path = tmp_path / "records.csv"
    write_records_csv(small_run, str(path))
    raw = path.read_bytes()
    assert b"\r" not in raw  # LF line endings on every platform
    lines = raw.decode().splitlines()
    assert lines[0] == "traj_id,t,x,running_max,doob_gap"
    n_grid = len(small_run.grid)
    assert len(lines) == 1 + small_run.n_traj * n_grid
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    probe = rows[3 * n_grid + 7]  # trajectory 3, grid slot 7
    assert int(probe["traj_id"]) == 3
    assert int(probe["t"]) == small_run.grid[7]
    # 17 significant digits round-trip float64 exactly
    assert float(probe["x"]) == small_run.x[3, 7]
    assert float(probe["running_max"]) == small_run.running_max[3, 7]
    assert float(probe["doob_gap"]) == small_run.doob_gap[3, 7]


def test_records_csv_header_without_doob(tmp_path):
    res = run_ensemble(REF, EnsembleConfig(n_traj=2, horizon=20, base_seed=1))
    path = tmp_path / "records.csv"
    write_records_csv(res, str(path))
    assert path.read_text().splitlines()[0] == "traj_id,t,x,running_max"


def test_transitions_csv_round_trip(tmp_path, small_run):
    path = tmp_path / "transitions.csv"
    write_transitions_csv(small_run, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "x,dx"
    assert len(lines) == 1 + small_run.trans_x.shape[0]
    x0, dx0 = lines[1].split(",")
    assert float(x0) == small_run.trans_x[0]
    assert float(dx0) == small_run.trans_dx[0]


def test_transitions_csv_requires_recording(tmp_path):
    res = run_ensemble(REF, EnsembleConfig(n_traj=2, horizon=20, base_seed=1))
    with pytest.raises(ValueError):
        write_transitions_csv(res, str(tmp_path / "t.csv"))


# ---------------------------------------------------------------------------
# performance floor


def test_chain_throughput_floor():
    cfg = EnsembleConfig(n_traj=256, horizon=100_000, base_seed=8)
    res = run_ensemble(REF, cfg)
    steps_per_s = cfg.n_traj * cfg.horizon / res.elapsed_s
    # conservative hard floor; the kernel does ~1e8 steps/s per core
    assert steps_per_s > 5e6
