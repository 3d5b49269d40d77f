#!/usr/bin/env python3
"""Run the PAC-contract experiment for the dovetail learner and save the report.

    python scripts/run_pac_contract.py --trials 400 --seed 1 --out results/pac.json
"""

import argparse
import time

from unipac.harness import PacConfig, dump_report, run_pac_contract


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--delta", type=float, default=PacConfig.delta)
    ap.add_argument("--epsilon", type=float, default=PacConfig.epsilon)
    ap.add_argument("--trials", type=int, default=PacConfig.trials)
    ap.add_argument("--seed", type=int, default=PacConfig.seed)
    ap.add_argument("--maxlen", type=int, default=PacConfig.maxlen)
    ap.add_argument("--out", default="pac_contract.json")
    args = ap.parse_args()

    config = PacConfig(args.delta, args.epsilon, args.trials, args.seed, args.maxlen)
    start = time.perf_counter()
    report = run_pac_contract(config)
    dump_report(report, args.out)

    print(f"target          failures  fraction  (threshold {next(iter(report['targets'].values()))['threshold']:.4f})")
    for name, r in report["targets"].items():
        print(f"{name:<15} {r['failures']:>8}  {r['failure_fraction']:.4f}")
    print(f"{'passed' if report['passed'] else 'FAILED'} in {time.perf_counter() - start:.1f}s -> {args.out}")


if __name__ == "__main__":
    main()
