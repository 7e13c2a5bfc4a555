"""Layer bracket of the disk ground level next to the radial shooting value.

    python scripts/disk_bracket.py --alpha 10 20 --ns 256 --nt 64
"""

import argparse

from robinlayer.geometry import CurveSpec, build_arc_curve
from robinlayer.layer import LayerConfig, bracket_eigenvalues
from robinlayer.oracles import ShootingProblem, disk_shooting


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, nargs="+", default=[10.0, 20.0])
    ap.add_argument("--R", type=float, default=1.0)
    ap.add_argument("--ns", type=int, default=256)
    ap.add_argument("--nt", type=int, default=64)
    ap.add_argument("--b", type=float, default=2.0)
    args = ap.parse_args()
    disk = build_arc_curve(CurveSpec.preset("circle", R=args.R), args.ns)
    print("alpha,delta,lower,upper,halfwidth,shooting,inside")
    for a in args.alpha:
        br = bracket_eigenvalues(LayerConfig(disk, a, b=args.b, n_t=args.nt), 1)
        exact = disk_shooting(ShootingProblem(args.R, a, 0))
        print(f"{a:g},{br.delta:.6g},{br.lower[0]:.10g},{br.upper[0]:.10g},{br.halfwidth[0]:.3e},{exact:.10g},{br.contains(exact)}")


if __name__ == "__main__":
    main()
