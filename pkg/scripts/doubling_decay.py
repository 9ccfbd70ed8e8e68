#!/usr/bin/env python3
"""Measure how fast sweep-doubling stabilizes the splitting flow.

For each flow time on a grid, samples random tuples and records the
product-metric distance between runs at k and 2k sweeps as k doubles.
Writes long-format CSV (backend, time, sample, k, distance): small times
decay fast, intermediate times show the slow 1/k regime, and times past
the collapse point drop to floating noise.
"""

import argparse
import csv
import pathlib
import random
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from subsetflow import (  # noqa: E402
    EuclideanSpace,
    HyperboloidSpace,
    product_distance,
    splitting_flow,
)
from subsetflow.verify import sample_tuple  # noqa: E402


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=4)
    parser.add_argument("--samples", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--base-k", type=int, default=8)
    parser.add_argument("--doublings", type=int, default=7)
    parser.add_argument("--times", type=float, nargs="+",
                        default=[0.01, 0.1, 0.5, 2.0, 8.0])
    parser.add_argument("--out", help="CSV path (default stdout)")
    args = parser.parse_args(argv)

    backends = (("euclidean-2", EuclideanSpace(2)),
                ("hyperboloid-2", HyperboloidSpace(2)))
    sink = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(sink)
    writer.writerow(["backend", "time", "sample", "k", "distance"])
    for name, space in backends:
        for t in args.times:
            for i in range(args.samples):
                rng = random.Random(f"{args.seed}:decay:{name}:{t}:{i}")
                x = sample_tuple(space, args.n, rng)
                k = args.base_k
                prev = splitting_flow(x, t, k)
                for _ in range(args.doublings):
                    k *= 2
                    cur = splitting_flow(x, t, k)
                    writer.writerow([name, t, i, k, repr(product_distance(prev, cur))])
                    prev = cur
    if args.out:
        sink.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
