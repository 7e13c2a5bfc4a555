"""Gap report for the cosine periodic cell, with band and gap-length plots.

    python scripts/floquet_gaps.py --alpha 0 100 200 400 --out out/gaps
"""

import argparse
from pathlib import Path

from robinlayer.harness import emit_band_plots, gap_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, nargs="+", default=[0.0, 100.0, 200.0, 400.0])
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--budget", type=float, default=None, help="remainder budget; gaps longer than twice it are certified")
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    report = gap_report({"kind": "cosine", "n": args.n}, args.alpha, budget=args.budget)
    print(report.csv_text(), end="")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "gaps.json").write_text(report.json_text())
        emit_band_plots(report, args.out)


if __name__ == "__main__":
    main()
