"""Run every verification suite and write one JSON report per suite into a directory."""

import argparse
import sys
from pathlib import Path

from dyadic_ns.harness import SUITES, HarnessConfig, run_suites


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--parallel", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = run_suites(list(SUITES), HarnessConfig(seed=args.seed), parallel=args.parallel)
    for r in reports:
        (out / f"{r.suite}.json").write_text(r.to_json() + "\n")
        print(f"{r.suite:18s} {'pass' if r.passed else 'FAIL':4s} {r.wall_time:6.1f} s")
    return max(r.exit_code for r in reports)


if __name__ == "__main__":
    sys.exit(main())
