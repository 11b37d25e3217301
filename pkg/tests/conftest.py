"""Shared fixtures: the committed ensembles every suite module draws on.

All seeds are fixed constants.  The heavy ensembles are session scoped
and lazy, so running a single unit-test module never pays for them; the
acceptance module requests them all.
"""

import numpy as np
import pytest

from lamperti import (
    BDChainParams,
    EnsembleConfig,
    OscDriftParams,
    RdWalkParams,
    run_ensemble,
)

# Reference chain used by most statistical criteria.
REFERENCE_MODEL = BDChainParams(rho=0.5, beta=0.5, b=0.0)
REFERENCE_CONFIG = EnsembleConfig(
    n_traj=1000,
    horizon=1_000_000,
    base_seed=20260814,
    grid_points=48,
    record_doob=True,
    record_transitions=True,
    max_transitions=2_000_000,
)


@pytest.fixture(scope="session")
def reference_run():
    """BD chain rho=0.5 beta=0.5, N=1000, T=1e6, with decomposition and
    transition recording.  Feeds the LLN, escape, upper-bound, transience,
    drift-fit and decomposition criteria."""
    return run_ensemble(REFERENCE_MODEL, REFERENCE_CONFIG)


@pytest.fixture(scope="session")
def clt_run():
    """Same chain at N=4000 for the fluctuation criterion; a sparse grid
    keeps memory flat since only X_T matters here."""
    cfg = EnsembleConfig(n_traj=4000, horizon=1_000_000, base_seed=777001,
                         grid_points=8)
    return run_ensemble(REFERENCE_MODEL, cfg)


@pytest.fixture(scope="session")
def osc_run():
    """Oscillating-coefficient chain a=0.3 A=0.7.  The in-band fraction
    climbs with the horizon (the coherent dips recur every factor 2**(3/2)
    in t and their relative width shrinks); T=1e7 sits safely past the
    99% quorum while T=1e6 does not."""
    model = OscDriftParams(beta=0.5, a=0.3, A=0.7)
    cfg = EnsembleConfig(n_traj=500, horizon=10_000_000, base_seed=31415,
                         grid_points=48)
    return run_ensemble(model, cfg), model


@pytest.fixture(scope="session")
def rd_run():
    """Planar walk with unit Gaussian noise, transitions recorded on the
    norm process for the drift-fit reduction."""
    model = RdWalkParams(d=2, rho=0.5, beta=0.5, noise_sigma=1.0)
    cfg = EnsembleConfig(n_traj=500, horizon=1_000_000, base_seed=2718,
                         grid_points=48, record_transitions=True,
                         max_transitions=2_000_000)
    return run_ensemble(model, cfg), model


@pytest.fixture(scope="session")
def beta0_run():
    """Ballistic regime: drift tending to 0.6 with beta=0."""
    model = BDChainParams(rho=0.6, beta=0.0)
    cfg = EnsembleConfig(n_traj=500, horizon=100_000, base_seed=1111,
                         grid_points=48)
    return run_ensemble(model, cfg), model


@pytest.fixture(scope="session")
def rho0_run():
    """Negative control: the driftless symmetric chain, which is recurrent
    and must fail the transience check."""
    model = BDChainParams(rho=0.0, beta=0.5)
    cfg = EnsembleConfig(n_traj=200, horizon=100_000, base_seed=999,
                         grid_points=48)
    return run_ensemble(model, cfg), model


@pytest.fixture(scope="session")
def small_run():
    """Tiny reference-chain ensemble for structural engine tests."""
    cfg = EnsembleConfig(n_traj=32, horizon=5000, base_seed=4242,
                         grid_points=24, record_doob=True, record_paths=4,
                         record_transitions=True, max_transitions=50_000)
    return run_ensemble(REFERENCE_MODEL, cfg)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
