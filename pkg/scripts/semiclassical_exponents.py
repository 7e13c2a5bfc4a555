"""Log-log exponents of E_eff + alpha*kappa_max for a nondegenerate and a quartic curvature maximum.

    python scripts/semiclassical_exponents.py --n 8192
"""

import argparse

import numpy as np

from robinlayer.effective import DegenerateWellSpec, degenerate_well_levels, ground_shift, harmonic_prefactor
from robinlayer.geometry import CurveSpec, build_arc_curve, curvature_peak
from robinlayer.harness import fit_exponent, fit_intercept, fit_prefactor


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8192)
    ap.add_argument("--points", type=int, default=7)
    args = ap.parse_args()
    alphas = np.logspace(3, 6, args.points)
    ell = build_arc_curve(CurveSpec.preset("ellipse"), args.n)
    well = build_arc_curve(CurveSpec.preset("flat_well", p=2, Cp=1.0), args.n)
    cases = [
        ("ellipse", ell, 0.5, harmonic_prefactor(curvature_peak(ell).kappa2)),
        ("flat_well p=2", well, 1 / 3, float(degenerate_well_levels(DegenerateWellSpec(p=2, Cp=1.0), 1)[0])),
    ]
    for name, curve, expo, target in cases:
        pairs = [(a, ground_shift(curve, a, tol=1e-10 * a)) for a in alphas]
        slope, err = fit_exponent(pairs)
        print(
            f"{name}: slope {slope:.4f} +- {err:.1e} (expected {expo:.4f}); "
            f"prefactor {fit_prefactor(pairs, expo):.4f} vs {target:.4f}; free intercept {fit_intercept(pairs):.4f}"
        )


if __name__ == "__main__":
    main()
