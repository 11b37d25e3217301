#!/usr/bin/env python3
"""Measure stepping throughput (steps/s) for each simulation kernel.

Runs every model family once at a small horizon to trigger compilation,
then times a full-size ensemble.  Use --n-traj / --horizon to scale the
measurement to the machine.
"""

import argparse
import sys

from lamperti.engine import EnsembleConfig, run_ensemble
from lamperti.models import (
    BDChainParams,
    HalfLineWalkParams,
    HiddenStateParams,
    NoiseSpec,
    OscDriftParams,
    RdWalkParams,
)

MODELS = {
    "bd": BDChainParams(rho=0.5, beta=0.5),
    "bd_lazy": BDChainParams(rho=0.5, beta=0.5, b=0.3),
    "osc": OscDriftParams(beta=0.5, a=0.3, A=0.7),
    "halfline_pm1": HalfLineWalkParams(rho=0.5, beta=0.5),
    "halfline_gauss": HalfLineWalkParams(
        rho=0.5, beta=0.5, noise=NoiseSpec("truncated_gaussian", sigma=1.0, cap=4.0)),
    "halfline_pareto": HalfLineWalkParams(
        rho=0.5, beta=0.5, noise=NoiseSpec("two_sided_pareto", tail_index=4.0, scale=0.8)),
    "hidden": HiddenStateParams(rho=0.5, beta=0.5, sigma0_sq=0.25,
                                sigma1_sq=2.25, p_flip=0.3),
    "rd2": RdWalkParams(d=2, rho=0.5, beta=0.5),
    "rd3": RdWalkParams(d=3, rho=0.5, beta=0.5),
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-traj", type=int, default=256)
    parser.add_argument("--horizon", type=int, default=400_000)
    args = parser.parse_args()

    warmup = EnsembleConfig(n_traj=4, horizon=256, base_seed=0, grid_points=4)
    cfg = EnsembleConfig(n_traj=args.n_traj, horizon=args.horizon,
                         base_seed=1, grid_points=8)
    steps = args.n_traj * args.horizon
    print(f"{args.n_traj} trajectories x {args.horizon} steps per model\n")
    print(f"{'model':<18} {'steps/s':>12} {'elapsed':>10} {'threads':>8}")
    for name, model in MODELS.items():
        run_ensemble(model, warmup)
        result = run_ensemble(model, cfg)
        rate = steps / max(result.elapsed_s, 1e-9)
        print(f"{name:<18} {rate:>12.3g} {result.elapsed_s:>9.2f}s "
              f"{result.threads_used:>8}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
