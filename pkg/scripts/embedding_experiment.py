#!/usr/bin/env python3
"""Measure how the sup-norm embedding bracket behaves as blocks grow.

For the identity pair on the two-element nest, coefficient vectors with
sup norm one are pushed through witness blocks of increasing size.  The
certified lower bound should settle well above zero while the upper
bound stays pinned at one; the gap is the price of the interference
terms between blocks.

Run:  python3 scripts/embedding_experiment.py [--witnesses 128] [--draws 50] [--seed 808]
"""

import argparse

import numpy as np

from nestalg.algebra import MultiplicationTask
from nestalg.constructions import greedy_subsequence, linf_embedding
from nestalg.nests import make_nest
from nestalg.operators import identity


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--witnesses", type=int, default=128)
    ap.add_argument("--draws", type=int, default=50)
    ap.add_argument("--seed", type=int, default=808)
    args = ap.parse_args()

    nest = make_nest({"basis": "N", "cuts": []})
    task = MultiplicationTask.build(nest, identity(), identity())
    cert = greedy_subsequence(task, 1.0, args.witnesses)
    print(f"selected {cert.size} witnesses, certificate floor {min(cert.values):.6f}")

    rng = np.random.default_rng(args.seed)
    print(f"{'block':>6s} {'vecs':>5s} {'worst lower':>12s} {'best lower':>11s} {'worst upper':>12s}")
    for block in (8, 16, 32, 64):
        max_len = cert.size // block
        if max_len == 0:
            break
        lows, ups = [], []
        for _ in range(args.draws):
            m = int(rng.integers(1, max_len + 1))
            x = rng.uniform(-1, 1, size=m)
            x[int(rng.integers(m))] = float(rng.choice([-1.0, 1.0]))
            x = x / np.max(np.abs(x))
            out = linf_embedding(task, x, cert, block_size=block)
            lows.append(out["lower"])
            ups.append(out["upper"])
        print(f"{block:6d} {args.draws:5d} {min(lows):12.6f} {max(lows):11.6f} {max(ups):12.6f}")

    # single-block anatomy at the default size
    out = linf_embedding(task, np.ones(4), cert, block_size=32)
    print("anatomy for x = (1,1,1,1), block 32:")
    print(f"  lead block {out['lead_block']} value {out['lead_value']:.6f}")
    worst_interf = max(out["interference"])
    print(f"  worst block interference {worst_interf:.6f} tail allowance {out['tail_allowance']:.6f}")
    print(f"  bracket [{out['lower']:.6f}, {out['upper']:.6f}]")


if __name__ == "__main__":
    main()
