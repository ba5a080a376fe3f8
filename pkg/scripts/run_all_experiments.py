"""Run every registered experiment, then verify each stored report.

    python3 scripts/run_all_experiments.py --out-dir reports --seed 0
"""

import argparse
import sys
from pathlib import Path

from paving_lab.experiments import REGISTRY, ExperimentConfig, run_experiment, verify_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--only", nargs="*", help="experiment keys, default all")
    args = ap.parse_args()
    worst = 0
    for key in args.only or list(REGISTRY):
        cfg = ExperimentConfig(name=key, out_dir=str(Path(args.out_dir) / key), seed=args.seed, threads=args.threads)
        rep = run_experiment(cfg)
        failed = [a["id"] for a in rep.assertions if not a["passed"]]
        check = verify_report(rep.path)
        print(f"{key}: {len(rep.rows)} rows, {len(rep.assertions) - len(failed)}/{len(rep.assertions)} assertions, "
              f"verify={'ok' if check.ok else 'FAILED'}")
        for f in failed:
            print(f"  failed {f}")
        for note in rep.incomplete:
            print(f"  incomplete {note}")
        worst = max(worst, rep.exit_code, 0 if check.ok else 1)
    return worst


if __name__ == "__main__":
    sys.exit(main())
