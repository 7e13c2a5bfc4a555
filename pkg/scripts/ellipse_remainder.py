"""Remainder sweep on the (2, 1) ellipse: midpoint + alpha^2 - E_eff.

    python scripts/ellipse_remainder.py --out out/ellipse --nt 64
"""

import argparse
import math

from robinlayer.harness import SweepPlan, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, nargs="+", default=[10.0, 15.0, 20.0, 30.0, 40.0])
    ap.add_argument("--ns", type=int, default=256)
    ap.add_argument("--nt", type=int, default=64)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default=None, help="directory for sweep.csv/json and SVG plots")
    args = ap.parse_args()
    plan = SweepPlan(
        {"kind": "ellipse", "a": 2.0, "b": 1.0}, tuple(args.alpha), n_s=args.ns, n_t=args.nt, workers=args.workers, output_dir=args.out
    )
    table = run_sweep(plan)
    print("alpha,halfwidth,remainder,remainder/log(alpha)")
    for r in table.rows:
        print(f"{r.alpha:g},{r.halfwidth:.3e},{r.remainder:.6f},{abs(r.remainder) / math.log(r.alpha):.4f}")


if __name__ == "__main__":
    main()
