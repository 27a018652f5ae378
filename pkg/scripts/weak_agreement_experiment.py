#!/usr/bin/env python3
"""Stress the two weak-compactness routes against each other on random tasks.

Both decision procedures answer the same question from different
directions: one inspects boundary corners, the other searches cut pairs
at dyadic tolerances.  They should never disagree; this sweep measures
how often each side declines to answer and prints any split verdicts.

Run:  python3 scripts/weak_agreement_experiment.py --tasks 500 --seed 414 [--csv out.csv]
"""

import argparse
import csv
import sys
import time

import numpy as np

from nestalg.algebra import MultiplicationTask
from nestalg.decisions import mult_weak_decision, mult_weak_decision_2proj
from nestalg.nests import make_nest
from nestalg.scenarios import SWEEP_NESTS, random_member_pair


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tasks", type=int, default=500)
    ap.add_argument("--seed", type=int, default=414)
    ap.add_argument("--csv", help="write one row per task here")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = []
    tally = {"agree": 0, "disagree": 0, "one_sided": 0, "neither": 0}
    t0 = time.time()
    for i in range(args.tasks):
        nest = make_nest(SWEEP_NESTS[i % len(SWEEP_NESTS)])
        a, b = random_member_pair(nest, rng)
        task = MultiplicationTask.build(nest, a, b, require_membership=False)
        s1 = mult_weak_decision(task).status
        s2 = mult_weak_decision_2proj(task).status
        if s1 == "Unknown" and s2 == "Unknown":
            key = "neither"
        elif s1 == "Unknown" or s2 == "Unknown":
            key = "one_sided"
        elif s1 == s2:
            key = "agree"
        else:
            key = "disagree"
            print(f"  SPLIT at task {i}: boundary={s1} two-projection={s2}", file=sys.stderr)
        tally[key] += 1
        rows.append({"task": i, "nest": str(nest), "boundary": s1, "two_projection": s2, "outcome": key})
    dt = time.time() - t0

    print(f"{args.tasks} tasks in {dt:.2f}s (seed {args.seed})")
    for k in ("agree", "one_sided", "neither", "disagree"):
        print(f"  {k:10s} {tally[k]}")
    decided = tally["agree"] + tally["disagree"]
    if decided:
        print(f"  agreement on doubly decided tasks: {tally['agree'] / decided:.1%}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)
        print(f"rows written to {args.csv}")

    sys.exit(0 if tally["disagree"] == 0 else 1)


if __name__ == "__main__":
    main()
