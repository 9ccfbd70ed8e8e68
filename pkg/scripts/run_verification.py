#!/usr/bin/env python3
"""Run the full invariant suite on the three reference backends.

Prints one aligned table per backend and exits nonzero if any row fails.
Use --json/--csv to keep machine-readable copies next to the run.
"""

import argparse
import json
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from subsetflow import (  # noqa: E402
    EuclideanSpace,
    FlowConfig,
    HyperboloidSpace,
    ScanConfig,
    TreeEdge,
    TreeSpace,
    TreeTopology,
    bound_suite,
)


def reference_backends():
    star = TreeSpace(TreeTopology((
        TreeEdge(0, 0, 1, 1.0),
        TreeEdge(1, 0, 2, 1.0),
        TreeEdge(2, 0, 3, 1.5),
    )))
    return (
        ("euclidean-2", EuclideanSpace(2)),
        ("hyperboloid-2", HyperboloidSpace(2)),
        ("star-tree", star),
    )


def fmt_table(report):
    rows = [("check", "trials", "worst", "threshold", "ok")]
    for c in report.checks:
        worst = f"{c.worst:.3e}" if c.worst == c.worst and abs(c.worst) != float("inf") else "-"
        rows.append((c.name, str(c.trials), worst, f"{c.threshold:.3e}",
                     "pass" if c.passed else "FAIL"))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=4, help="tuple size under test")
    parser.add_argument("--samples", type=int, default=60, help="sample budget per check")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", help="directory for per-backend JSON reports")
    parser.add_argument("--csv", help="directory for per-backend CSV reports")
    args = parser.parse_args(argv)

    all_pass = True
    for name, space in reference_backends():
        cfg = ScanConfig(space=space, n=args.n, samples=args.samples,
                         seed=args.seed, flow=FlowConfig())
        t0 = time.monotonic()
        report = bound_suite(cfg)
        dt = time.monotonic() - t0
        print(f"== {name}  (n={args.n}, samples={args.samples}, seed={args.seed}, {dt:.1f}s)")
        print(fmt_table(report))
        print()
        all_pass &= report.overall_pass
        for flag, suffix, render in ((args.json, "json", lambda r: json.dumps(r.to_json(), sort_keys=True, indent=2) + "\n"),
                                     (args.csv, "csv", lambda r: r.to_csv())):
            if flag:
                out = pathlib.Path(flag)
                out.mkdir(parents=True, exist_ok=True)
                (out / f"{name}.{suffix}").write_text(render(report))
    print("overall:", "pass" if all_pass else "FAIL")
    return 0 if all_pass else 2


if __name__ == "__main__":
    sys.exit(main())
