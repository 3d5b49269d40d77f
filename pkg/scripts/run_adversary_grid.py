#!/usr/bin/env python3
"""PAC verdicts of several learners over a (d, m) grid, printed as TSV.

The empirical check is skipped here (see ``unipac adversary`` for a single
instance with validation); only the exact worst-case probability is used.
"""

import argparse

from unipac.adversary import find_worst_labeling
from unipac.baselines import eager_learner, erm_learner
from unipac.bounds import AccuracyParams, adversary_rho_bound
from unipac.learner import DovetailLearner


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--delta", type=float, default=0.01)
    ap.add_argument("--epsilon", type=float, default=0.01)
    ap.add_argument("--d", type=int, nargs="+", default=[4, 6, 8])
    args = ap.parse_args()
    acc = AccuracyParams(args.delta, args.epsilon)

    print("learner\td\tm\tbound\trho_star\tverdict")
    for d in args.d:
        learners = {"eager": eager_learner(), "erm": erm_learner(d, acc), "dovetail": DovetailLearner()}
        for m in range(d):
            bound = adversary_rho_bound(d, m, acc)
            for name, learner in learners.items():
                rho = find_worst_labeling(learner, acc, d, m).rho
                verdict = "vacuous" if bound <= 0 else ("NOT-PAC" if rho < bound else "CONSISTENT")
                print(f"{name}\t{d}\t{m}\t{bound:.6f}\t{rho}\t{verdict}")


if __name__ == "__main__":
    main()
