#!/usr/bin/env python3
"""Run a verification config and print a compact check summary.

By default this runs the reference chain study (rho=0.5, beta=0.5,
N=1000, T=1e6) from scripts/configs/reference.json; pass --config to run
any other study in that directory.  The exit code mirrors the CLI
contract: 0 when every check passes, 1 otherwise.

Note: at horizon 1e6 the reference run's decomposition-gap check fails
honestly (the gap decays too slowly to clear the shipped threshold at
this horizon); see README.md for the analysis.
"""

import argparse
import json
import os
import sys

from lamperti.cli import main as cli_main
from lamperti.config import load_config

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")


def summarize(report: dict) -> None:
    print()
    print(f"{'check':<18} {'verdict':<8} {'predicted':>12} {'estimate':>12} "
          f"{'stderr':>10}")
    for check in report["checks"]:
        est = check["estimated"] or {}
        point = est.get("point")
        stderr = est.get("stderr")
        print(f"{check['name']:<18} {'PASS' if check['pass'] else 'FAIL':<8} "
              f"{_fmt(check['predicted']):>12} {_fmt(point):>12} {_fmt(stderr):>10}")
        if check["error"]:
            print(f"{'':<18} error: {check['error']}")
    theory = report.get("theory")
    if theory and theory.get("lambda") is not None:
        print(f"\npredicted speed constant {theory['lambda']:.6f}, "
              f"growth exponent {theory['growth_exponent']:.6f}")
    print(f"wall time {report['wall_time_s']:.1f}s")


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.5g}"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=os.path.join(CONFIG_DIR, "reference.json"),
                        help="JSON run configuration (default: the reference study)")
    args = parser.parse_args()

    code = cli_main(["verify", args.config])
    if code >= 2:  # config or I/O problem; the CLI already printed it
        return code
    cfg = load_config(args.config)
    with open(os.path.join(cfg.output_dir, "report.json"), encoding="utf-8") as f:
        summarize(json.load(f))
    return code


if __name__ == "__main__":
    sys.exit(main())
