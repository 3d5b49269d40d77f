#!/usr/bin/env python3
"""Monte Carlo check of the truncated union bound over h_1..h_{i_max}.

Sweeps i_max so the violation frequency can be read against the summed
per-hypothesis risk of the bad hypotheses.
"""

import argparse

from unipac.harness import UnionBoundConfig, dump_report, run_union_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--delta", type=float, default=0.15)
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--i-max", type=int, nargs="+", default=[10, 50, 300])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="JSON file for the list of reports")
    args = ap.parse_args()

    reports = []
    print("i_max\tbad\tunion_bound\tviolations\tfraction\tthreshold")
    for i_max in args.i_max:
        r = run_union_bound(UnionBoundConfig(args.delta, args.epsilon, i_max, args.trials, args.seed))
        reports.append(r)
        print(f"{i_max}\t{r['bad_hypotheses']}\t{r['union_bound']:.5f}\t{r['violations']}\t{r['violation_fraction']:.4f}\t{r['threshold']:.4f}")
    if args.out:
        dump_report({"experiment": "union-bound-sweep", "reports": reports}, args.out)


if __name__ == "__main__":
    main()
