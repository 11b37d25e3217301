"""Command line interface.

Four subcommands:

    theory     closed-form constants and applicability flags from flags
    simulate   run an ensemble from a JSON config, write records + manifest
    verify     simulate, run the configured checks, emit a JSON report
    drift-fit  re-estimate the drift power law from transition pairs

Experiments are driven by JSON configs rather than flags so every run
leaves a manifest that reproduces it.  Exit codes are a stable contract:
0 all checks passed, 1 a check or fit failed, 2 usage or configuration
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, config_hash, load_config
from .engine import (
    ResourceBudgetError,
    run_ensemble,
    write_records_csv,
    write_transitions_csv,
)
from .estimators import (
    FitDegenerateError,
    fit_drift,
    model_drift_params,
    model_sigma2,
    run_checks,
)
from .theory import (
    DriftParams,
    MomentParams,
    applicability,
    bd_clt_std,
    clt_std,
    growth_exponent,
    lambda_const,
)


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


# ---------------------------------------------------------------------------
# theory


def cmd_theory(args) -> int:
    out = {"beta": args.beta, "growth_exponent": growth_exponent(args.beta)}
    if args.rho is not None:
        out["lambda"] = lambda_const(args.rho, args.beta)
    if args.beta > 0.0:
        out["clt_std"] = clt_std(args.sigma, args.beta)
    if args.b is not None:
        out["bd_clt_std"] = bd_clt_std(args.b, args.beta)
    if args.gamma is not None:
        flags = applicability(
            MomentParams(gamma=args.gamma),
            DriftParams(beta=args.beta, rho=args.rho if args.rho is not None else 1.0),
        )
        out["applicability"] = {
            "transience": flags.transience_ok,
            "sharp_bounds": flags.sharp_bounds_ok,
            "clt": flags.clt_ok,
        }
    if args.json:
        print(json.dumps(out, indent=2, sort_keys=True))
        return 0
    print(f"beta                       {args.beta:g}")
    print(f"growth exponent            {out['growth_exponent']:.6f}")
    if "lambda" in out:
        print(f"speed constant    lambda = {out['lambda']:.6f}")
    if "clt_std" in out:
        print(f"fluctuation std            {out['clt_std']:.6f}  (increment std {args.sigma:g})")
    if "bd_clt_std" in out:
        print(f"chain fluctuation std      {out['bd_clt_std']:.6f}  (lazy prob {args.b:g})")
    if "applicability" in out:
        for key, label in (("transience", "transience"),
                           ("sharp_bounds", "sharp growth bounds"),
                           ("clt", "fluctuation limit")):
            word = "applicable" if out["applicability"][key] else "not applicable"
            print(f"{label:<26} {word}")
    return 0


# ---------------------------------------------------------------------------
# shared run plumbing


def _theory_block(model) -> dict | None:
    drift = model_drift_params(model)
    if drift is None:
        return None
    block = {
        "growth_exponent": growth_exponent(drift.beta),
        "lambda": lambda_const(drift.rho, drift.beta) if drift.a == drift.A else None,
        "lambda_lower": lambda_const(drift.a, drift.beta),
        "lambda_upper": lambda_const(drift.A, drift.beta),
    }
    sigma2 = model_sigma2(model)
    if sigma2 is not None and drift.beta > 0.0:
        block["clt_std"] = clt_std(sigma2**0.5, drift.beta)
    else:
        block["clt_std"] = None
    return block


def _manifest(cfg: RunConfig) -> dict:
    normalized = cfg.normalized()
    return {
        "version": __version__,
        "config_hash": config_hash(normalized),
        "config": normalized,
        "seeds": {
            "base_seed": cfg.engine.base_seed,
            "scheme": "splitmix64(base_seed xor trajectory_id) seeding xorshift64*",
            "streams": cfg.engine.n_traj,
        },
    }


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def _write_data_files(result, cfg: RunConfig) -> list:
    paths = [os.path.join(cfg.output_dir, "records.csv")]
    write_records_csv(result, paths[0])
    if result.trans_x is not None:
        paths.append(os.path.join(cfg.output_dir, "transitions.csv"))
        write_transitions_csv(result, paths[1])
    return paths


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    os.makedirs(cfg.output_dir, exist_ok=True)
    result = run_ensemble(cfg.model, cfg.engine)
    written = _write_data_files(result, cfg)
    manifest_path = os.path.join(cfg.output_dir, "manifest.json")
    _write_json(manifest_path, _manifest(cfg))
    written.append(manifest_path)
    steps = cfg.engine.n_traj * cfg.engine.horizon
    print(f"simulated {cfg.engine.n_traj} trajectories to horizon {cfg.engine.horizon} "
          f"({steps / max(result.elapsed_s, 1e-9):.3g} steps/s)")
    for path in written:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    cfg = load_config(args.config)
    os.makedirs(cfg.output_dir, exist_ok=True)
    result = run_ensemble(cfg.model, cfg.engine)
    checks = run_checks(result, cfg.model, cfg.checks)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        suffix = f"  [{c.error}]" if c.error else ""
        print(f"check {c.name}: {status}{suffix}")
    all_passed = all(c.passed for c in checks)
    normalized = cfg.normalized()
    report = {
        "version": __version__,
        "config_hash": config_hash(normalized),
        "config": normalized,
        "theory": _theory_block(cfg.model),
        "checks": [c.to_dict() for c in checks],
        "all_passed": all_passed,
        "wall_time_s": time.perf_counter() - t0,
    }
    if "csv" in cfg.formats:
        _write_data_files(result, cfg)
    report_path = os.path.join(cfg.output_dir, "report.json")
    _write_json(report_path, report)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    print(f"wrote {report_path}")
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# drift-fit


def _looks_like_json(path: str) -> bool:
    with open(path, "r", encoding="utf-8") as f:
        head = f.read(64).lstrip()
    return head.startswith("{")


def _load_transitions_csv(path: str):
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln for ln in f.read().splitlines() if ln.strip()]
    if lines and not _is_number_pair(lines[0]):
        lines = lines[1:]
    if not lines:
        raise ConfigError("input", "no transitions in input file")
    try:
        data = np.loadtxt(lines, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ConfigError("input", f"cannot parse transitions CSV: {exc}") from None
    if data.shape[1] < 2:
        raise ConfigError("input", "expected two columns x,dx")
    return data[:, 0], data[:, 1]


def _is_number_pair(line: str) -> bool:
    parts = line.split(",")
    if len(parts) < 2:
        return False
    try:
        float(parts[0]), float(parts[1])
    except ValueError:
        return False
    return True


def cmd_drift_fit(args) -> int:
    out_dir = args.out
    if _looks_like_json(args.input):
        cfg = load_config(args.input)
        if not cfg.engine.record_transitions:
            raise ConfigError("engine.record_transitions",
                              "drift-fit from a config needs transition recording enabled")
        result = run_ensemble(cfg.model, cfg.engine)
        trans_x, trans_dx = result.trans_x, result.trans_dx
        if out_dir is None:
            out_dir = cfg.output_dir
    else:
        trans_x, trans_dx = _load_transitions_csv(args.input)
    fit = fit_drift(trans_x, trans_dx, n_bins=args.bins,
                    min_count=args.min_count, min_transitions=args.min_transitions,
                    x_min=args.x_min, radial_dim=args.radial_dim)
    payload = fit.to_dict()
    print(json.dumps(payload, indent=2))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_json(os.path.join(out_dir, "fit.json"), payload)
        bins_path = os.path.join(out_dir, "bins.csv")
        with open(bins_path, "w", encoding="utf-8", newline="") as f:
            f.write("x,n,mu1,mu2,usable\n")
            for b in fit.bins:
                f.write(f"{b['x_mid']:.17g},{b['n']},{b['mu1']:.17g},"
                        f"{b['mu2']:.17g},{int(b['usable'])}\n")
        print(f"wrote {os.path.join(out_dir, 'fit.json')}", file=sys.stderr)
        print(f"wrote {bins_path}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lamperti",
        description="Monte Carlo laboratory for processes with power-law vanishing drift",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    t = sub.add_parser("theory", help="closed-form constants and applicability flags")
    t.add_argument("--beta", type=float, required=True, help="drift decay exponent, in [0, 1)")
    t.add_argument("--rho", type=float, default=None, help="drift coefficient; enables the speed constant")
    t.add_argument("--b", type=float, default=None, help="lazy probability; enables the chain fluctuation std")
    t.add_argument("--gamma", type=float, default=None, help="moment order; enables applicability flags")
    t.add_argument("--sigma", type=float, default=1.0, help="increment std for the fluctuation std (default 1)")
    t.add_argument("--json", action="store_true", help="machine-readable output")
    t.set_defaults(func=cmd_theory)

    s = sub.add_parser("simulate", help="run an ensemble, write records and a manifest")
    s.add_argument("config", help="JSON run configuration")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="simulate, run checks, write a JSON report")
    v.add_argument("config", help="JSON run configuration")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("drift-fit", help="re-estimate the drift power law from transitions")
    d.add_argument("input", help="transitions CSV with columns x,dx, or a JSON run configuration")
    d.add_argument("--out", default=None, help="directory for fit.json and bins.csv")
    d.add_argument("--bins", type=int, default=24, help="number of geometric position bins")
    d.add_argument("--min-count", type=int, default=100, help="transitions needed for a usable bin")
    d.add_argument("--min-transitions", type=int, default=100_000,
                   help="total transitions required before fitting")
    d.add_argument("--x-min", type=float, default=1.0,
                   help="ignore transitions below this position")
    d.add_argument("--radial-dim", type=int, default=1,
                   help="dimension of the underlying walk when fitting norm "
                        "transitions; subtracts the (d-1)*sigma2/(2x) term")
    d.set_defaults(func=cmd_drift_fit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FitDegenerateError as exc:
        _err(str(exc))
        return 1
    except (ConfigError, ResourceBudgetError) as exc:
        _err(str(exc))
        return 2
    except ValueError as exc:
        _err(str(exc))
        return 2
    except OSError as exc:
        _err(str(exc))
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
