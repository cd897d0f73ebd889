#!/usr/bin/env python3
"""Run every bundled scenario and collect the reports under out/.

Usage: python scripts/run_all_scenarios.py [--out OUT] [--tol-scale S]

Each scenario writes report.csv, summary.txt and blobs_t*.csv into its own
subdirectory.  Exit status is nonzero if any hard check fails.
"""
import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cauchyflow.config import load_config
from cauchyflow.runner import run_scenario

SCENARIOS = (
    "cauchy_disk",
    "cauchy_ellipse",
    "cauchy_gaussian",
    "cauchy_two_patches",
    "euler_rankine",
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out")
    ap.add_argument("--tol-scale", type=float, default=1.0)
    args = ap.parse_args()

    pkg_scenarios = os.path.join(os.path.dirname(__file__), "..", "src",
                                 "cauchyflow", "scenarios")
    failures = []
    for name in SCENARIOS:
        cfg = load_config(os.path.join(pkg_scenarios, name + ".yaml"))
        out_dir = os.path.join(args.out, name)
        os.makedirs(out_dir, exist_ok=True)
        print("== %s ==" % name)
        report, _ = run_scenario(cfg, out_dir=out_dir,
                                 tol_scale=args.tol_scale)
        verdict = "PASS" if report.all_hard_pass() else "FAIL"
        print("   %s (%d checks) -> %s" % (verdict, len(report.entries),
                                           out_dir))
        if not report.all_hard_pass():
            failures.append(name)

    if failures:
        print("failed scenarios: %s" % ", ".join(failures))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
