"""Shot-noise sweep of the finite-difference sub-QFI estimator on the |+>, sigma_z probe.

Writes one CSV row per (delta, shots, seed) and prints, per (delta, shots), how often
the bias + 3 sigma interval contained the exact value.
"""

import argparse
import sys
from collections import defaultdict

from subqfi import sampling
from subqfi.fixtures import SIGMA_Z, plus_state


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--deltas", default="0.02,0.05,0.1")
    ap.add_argument("--shots", default="10000,100000,1000000")
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--output", default="shot_sweep.csv")
    args = ap.parse_args(argv)

    deltas = [float(x) for x in args.deltas.split(",")]
    shots = [int(float(x)) for x in args.shots.split(",")]
    rows = sampling.shot_sweep(plus_state(), SIGMA_Z, deltas, shots, range(args.seeds))
    with open(args.output, "w") as fh:
        fh.write(sampling.rows_to_csv(rows))

    hits = defaultdict(int)
    for r in rows:
        hits[r["delta"], r["shots"]] += abs(r["estimate"] - r["exact_value"]) <= r["bias_note"] + 3 * r["std_error"]
    print(f"{'delta':>7} {'shots':>9} {'covered':>8}")
    for (delta, nu), k in sorted(hits.items()):
        print(f"{delta:>7g} {nu:>9d} {k:>5d}/{args.seeds}")
    print(f"wrote {len(rows)} rows to {args.output}", file=sys.stderr)


if __name__ == "__main__":
    main()
