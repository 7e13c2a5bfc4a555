"""Command-line entry point.

Exit codes: 0 success, 2 invalid input or usage, 3 numerical failure.
Values in a ``--config`` file are defaults; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import load_mapping
from .effective import (
    DegenerateWellSpec,
    assemble_effective,
    bloch_bands,
    degenerate_well_levels,
    effective_eigs,
    harmonic_levels,
)
from .errors import NumericalError
from .geometry import cell_from_mapping, curvature_peak, curve_from_mapping, min_layer_width
from .harness import RemainderTable, SweepPlan, emit_band_plots, gap_report, remainder_budget, run_sweep
from .layer import LayerConfig, bracket_eigenvalues
from .model1d import solve_dirichlet_model, solve_robin_model
from .oracles import ShootingProblem, disk_shooting

SUBCOMMANDS = ("curve", "model1d", "effective", "bands", "bracket", "oracle", "sweep", "predict")

# curve flags shared by `curve` and `effective`; dest -> preset parameter
CURVE_FLAGS = {
    "R": ("--R", "radius (circle, perturbed_circle, stadium)"),
    "a": ("--a", "ellipse semi-axis along x"),
    "b": ("--b", "ellipse semi-axis along y"),
    "eps": ("--eps", "perturbed_circle amplitude"),
    "m": ("--m", "perturbed_circle mode number"),
    "p": ("--p", "flat_well order (maximum of order 2p)"),
    "Cp": ("--Cp", "flat_well coefficient of s^(2p) at the maximum"),
    "length": ("--length", "flat_well perimeter"),
    "ell": ("--ell", "stadium straight-segment length"),
}


@dataclass
class CliConfig:
    """Parsed invocation: subcommand, optional config file, explicit overrides and seed."""

    subcommand: str
    config: Path | None = None
    overrides: dict = field(default_factory=dict)
    seed: int = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def _set_pairs(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        try:
            out[key.strip()] = json.loads(val)
        except json.JSONDecodeError:
            out[key.strip()] = val
    return out


def _add_curve_source(p, named_flags: bool):
    g = p.add_argument_group("curve")
    g.add_argument("--config", type=Path, help="TOML/JSON curve config (a [curve] table or a bare curve table)")
    g.add_argument("--preset", help="preset name: circle, ellipse, perturbed_circle, flat_well, stadium")
    g.add_argument("--csv", type=Path, help="sampled curve, CSV with header x,y")
    g.add_argument("--open", action="store_true", help="treat --csv samples as an open arc")
    g.add_argument("--n", type=int, help="number of arc-length nodes (default 512)")
    g.add_argument("--set", action="append", metavar="KEY=VALUE", help="extra curve parameter, repeatable")
    if named_flags:
        for dest, (flag, text) in CURVE_FLAGS.items():
            g.add_argument(flag, dest=f"curve_{dest}", type=int if dest in ("m", "p") else float, help=text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed for start vectors (default 0)")
    common.add_argument("--out", type=Path, help="write the primary output here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = _Parser(prog="robinlayer", description="Robin eigenvalues of planar domains via boundary layers.")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("curve", parents=[common], help="arc-length curve summary or samples")
    _add_curve_source(p, named_flags=True)
    p.add_argument("action", choices=("info", "csv"), help="info: JSON summary; csv: s,x,y,kappa samples")

    p = sub.add_parser("model1d", parents=[common], help="1D Robin model ground state as a JSON line")
    p.add_argument("--alpha", type=float, required=True, help="Robin coupling at t=0")
    p.add_argument("--delta", type=float, required=True, help="interval length")
    p.add_argument("--beta", type=float, help="Robin coupling at t=delta (0 = Neumann); omit for Dirichlet")

    p = sub.add_parser("effective", parents=[common], help="lowest eigenvalues of the boundary operator")
    _add_curve_source(p, named_flags=True)
    p.add_argument("--alpha", type=float, help="Robin coupling")
    p.add_argument("-k", "--k", dest="k", type=int, help="number of eigenvalues (default 1)")

    p = sub.add_parser("bands", parents=[common], help="Bloch bands of a periodic cell")
    g = p.add_argument_group("cell")
    g.add_argument("--config", type=Path, help="TOML/JSON cell config (a [cell] table or a bare cell table)")
    g.add_argument("--cell", help="cell kind: free, constant, cosine")
    g.add_argument("--period", type=float, help="cell period (default 2*pi)")
    g.add_argument("--mean", type=float, help="cosine cell mean curvature")
    g.add_argument("--amplitude", type=float, help="cosine cell amplitude")
    g.add_argument("--value", type=float, help="constant cell curvature")
    g.add_argument("--n", type=int, help="nodes per cell (default 256)")
    p.add_argument("--alpha", type=float, help="Robin coupling")
    p.add_argument("--thetas", type=int, help="number of Bloch phases (default 33)")
    p.add_argument("--j-max", dest="j_max", type=int, help="number of bands (default 4)")
    p.add_argument("--gaps", type=Path, help="also write the gap list as JSON here")

    p = sub.add_parser("bracket", parents=[common], help="two-sided layer bracket of the lowest eigenvalues")
    _add_curve_source(p, named_flags=False)
    p.add_argument("--alpha", type=float, help="Robin coupling")
    wd = p.add_mutually_exclusive_group()
    wd.add_argument("--delta", type=float, help="layer width")
    wd.add_argument("--b", dest="schedule_b", type=float, help="width schedule b*log(alpha)/alpha (default 2)")
    p.add_argument("--ns", type=int, help="arc-length nodes (default: curve n)")
    p.add_argument("--nt", type=int, help="normal nodes (default 64)")
    p.add_argument("--grading", type=float, help="t-grid grading rate (default 2*alpha/3, 0 = uniform)")
    p.add_argument("-k", "--k", dest="k", type=int, help="number of eigenvalues (default 1)")

    p = sub.add_parser("oracle", parents=[common], help="reference values by radial shooting")
    p.add_argument("problem", choices=("disk",), help="disk: Robin disk of radius R")
    p.add_argument("--R", type=float, default=1.0, help="disk radius (default 1)")
    p.add_argument("--alpha", type=float, required=True, help="Robin coupling")
    p.add_argument("--m", type=int, default=0, help="angular mode (default 0)")
    p.add_argument("--method", choices=("rk4", "taylor"), default="rk4", help="integrator (default rk4)")

    p = sub.add_parser("sweep", parents=[common], help="run a sweep plan (alpha sweep or gap report)")
    p.add_argument("--plan", type=Path, required=True, help="TOML/JSON plan")
    p.add_argument("--workers", type=int, help="worker processes (default: ROBINLAYER_WORKERS or 1)")
    p.add_argument("--output-dir", dest="output_dir", type=Path, help="directory for CSV/JSON/SVG outputs")

    p = sub.add_parser("predict", parents=[common], help="semiclassical level predictions")
    p.add_argument("model", choices=("harmonic", "degenerate"), help="harmonic: sum sqrt(mu/2)(2n-1); degenerate: -d^2 + Cp s^(2p)")
    p.add_argument("--mu", type=float, action="append", help="Hessian eigenvalue, repeatable (harmonic)")
    p.add_argument("--p", type=int, help="well order (degenerate)")
    p.add_argument("--Cp", type=float, help="well coefficient (degenerate)")
    p.add_argument("--count", type=int, default=1, help="number of levels (default 1)")
    return parser


# --------------------------------------------------------------------------
# helpers


def _file_tables(path: Path | None, key: str) -> tuple[dict, dict]:
    """(object table, run options) from a config file."""
    if path is None:
        return {}, {}
    data = load_mapping(path)
    if key in data:
        obj = dict(data.pop(key))
        return obj, data
    return data, {}


def _pick(args, opts, name, default=None):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return opts.get(name, default)


def _curve_table(args) -> tuple[dict, dict, Path | None]:
    table, opts = _file_tables(args.config, "curve")
    base = args.config.parent if args.config else None
    if args.preset:
        if table.get("kind") != args.preset:
            table = {}
        table["kind"] = args.preset
    if args.csv:
        table = {"kind": "csv", "path": str(args.csv.resolve()), "closed": not args.open}
    for dest in CURVE_FLAGS:
        val = getattr(args, f"curve_{dest}", None)
        if val is not None:
            table[dest] = val
    table.update(_set_pairs(args.set))
    if args.n is not None:
        table["n"] = args.n
    if "kind" not in table:
        raise ValueError("no curve given: use --config, --preset or --csv")
    return table, opts, base


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _jfloat(v):
    v = float(v)
    return v if math.isfinite(v) else None


# --------------------------------------------------------------------------
# subcommands


def cmd_curve(args, cfg: CliConfig) -> int:
    table, _, base = _curve_table(args)
    curve = curve_from_mapping(table, base)
    if args.action == "csv":
        rows = zip(curve.s, curve.position[:, 0], curve.position[:, 1], curve.kappa)
        _emit(_csv(("s", "x", "y", "kappa"), rows), args.out)
        return 0
    info = {
        "name": curve.name,
        "closed": curve.closed,
        "n": curve.n,
        "L": curve.length,
        "kappa_min": float(np.min(curve.kappa)),
        "kappa_max": float(np.max(curve.kappa)),
        "turning": curve.turning(),
        "min_layer_width": _jfloat(min_layer_width(curve)),
    }
    peak = curvature_peak(curve)
    info.update(s0=peak.s0, kappa2=peak.kappa2, flat=peak.flat, maxima=list(peak.maxima))
    _emit(json.dumps(info, sort_keys=True) + "\n", args.out)
    return 0


def cmd_model1d(args, cfg: CliConfig) -> int:
    if args.beta is None:
        r = solve_dirichlet_model(args.alpha, args.delta)
    else:
        r = solve_robin_model(args.alpha, args.delta, args.beta)
    rec = {
        "alpha": r.alpha,
        "delta": r.delta,
        "beta": r.beta,
        "end": "dirichlet" if r.dirichlet else "robin",
        "E": r.E,
        "E_plus_alpha2": r.E_shift,
        "k": r.k,
        "psi0_sq": r.psi0_sq,
        "psi0_sq_minus_2alpha": r.psi0_shift,
        "psidelta_sq": r.psidelta_sq,
    }
    _emit(json.dumps(rec, sort_keys=True) + "\n", args.out)
    return 0


def cmd_effective(args, cfg: CliConfig) -> int:
    table, opts, base = _curve_table(args)
    alpha = _pick(args, opts, "alpha")
    if alpha is None:
        raise ValueError("--alpha is required")
    k = int(_pick(args, opts, "k", 1))
    curve = curve_from_mapping(table, base)
    res = effective_eigs(assemble_effective(curve, float(alpha)), k, seed=cfg.seed)
    if not res.all_converged:
        raise NumericalError(f"effective solve did not converge (residuals {res.residuals})")
    _emit(_csv(("alpha", "j", "eigenvalue"), [(float(alpha), j + 1, float(e)) for j, e in enumerate(res.eigenvalues)]), args.out)
    return 0


def cmd_bands(args, cfg: CliConfig) -> int:
    table, opts = _file_tables(args.config, "cell")
    if args.cell:
        if table.get("kind") != args.cell:
            table = {}
        table["kind"] = args.cell
    for key in ("period", "mean", "amplitude", "value", "n"):
        val = getattr(args, key)
        if val is not None:
            table[key] = val
    if "kind" not in table:
        raise ValueError("no cell given: use --config or --cell")
    alpha = _pick(args, opts, "alpha")
    if alpha is None:
        raise ValueError("--alpha is required")
    thetas = int(_pick(args, opts, "thetas", 33))
    j_max = int(_pick(args, opts, "j_max", 4))
    cell = cell_from_mapping(table)
    bs = bloch_bands(cell, float(alpha), None, thetas, j_max)
    rows = [(float(th), j + 1, float(bs.bands[i, j])) for i, th in enumerate(bs.theta_grid) for j in range(bs.j_max)]
    _emit(_csv(("theta", "j", "epsilon"), rows), args.out)
    if args.gaps is not None:
        rec = {"alpha": float(alpha), "gaps": [list(g) for g in bs.gaps], "edge_mismatch": bs.edge_mismatch, "tol": bs.tol}
        _emit(json.dumps(rec, sort_keys=True) + "\n", args.gaps)
    return 0


def cmd_bracket(args, cfg: CliConfig) -> int:
    table, opts, base = _curve_table(args)
    alpha = _pick(args, opts, "alpha")
    if alpha is None:
        raise ValueError("--alpha is required")
    delta = _pick(args, opts, "delta")
    b = args.schedule_b if args.schedule_b is not None else opts.get("b", 2.0)
    k = int(_pick(args, opts, "k", 1))
    curve = curve_from_mapping(table, base)
    conf = LayerConfig(
        curve,
        float(alpha),
        None if delta is None else float(delta),
        float(b),
        _pick(args, opts, "ns"),
        int(_pick(args, opts, "nt", 64)),
        _pick(args, opts, "grading"),
        seed=cfg.seed,
    )
    br = bracket_eigenvalues(conf, k)
    if not br.converged.all():
        raise NumericalError("layer solve did not converge")
    rows = [
        (br.alpha, br.delta, j + 1, br.lower[j], br.upper[j], br.midpoint[j], br.halfwidth[j]) for j in range(br.lower.size)
    ]
    _emit(_csv(("alpha", "delta", "j", "lower", "upper", "midpoint", "halfwidth"), rows), args.out)
    if br.truncated:
        logging.getLogger(__name__).warning("only %d of %d Dirichlet-end eigenvalues are negative", br.lower.size, k)
    return 0


def cmd_oracle(args, cfg: CliConfig) -> int:
    prob = ShootingProblem(args.R, args.alpha, args.m)
    E = disk_shooting(prob, method=args.method)
    rec = {"problem": "disk", "R": args.R, "alpha": args.alpha, "m": args.m, "method": args.method, "E": E}
    _emit(json.dumps(rec, sort_keys=True) + "\n", args.out)
    return 0


def cmd_sweep(args, cfg: CliConfig) -> int:
    plan_cfg = load_mapping(args.plan)
    base = args.plan.parent
    if args.output_dir is not None:
        plan_cfg["output_dir"] = str(args.output_dir)
    if "cell" in plan_cfg:
        return _gap_sweep(plan_cfg, base, args)
    if args.workers is not None:
        plan_cfg["workers"] = args.workers
    if args.seed is not None:
        plan_cfg["seed"] = args.seed
    if isinstance(plan_cfg.get("output_dir"), str) and not Path(plan_cfg["output_dir"]).is_absolute():
        if args.output_dir is None:
            plan_cfg["output_dir"] = str(base / plan_cfg["output_dir"])
    plan = SweepPlan.from_mapping(plan_cfg, base_dir=base)
    table = run_sweep(plan)
    _emit(table.csv_text(), args.out)
    failed = [r for r in table.rows if r.error]
    for r in failed:
        logging.getLogger(__name__).warning("alpha=%g j=%d: %s", r.alpha, r.j, r.error)
    return 0


def _gap_sweep(plan_cfg, base, args) -> int:
    known = {"cell", "alphas", "budget", "budget_from", "n", "theta_count", "j_max", "output_dir", "seed", "workers"}
    extra = set(plan_cfg) - known
    if extra:
        raise ValueError(f"unknown gap plan keys: {sorted(extra)}")
    budget = plan_cfg.get("budget")
    if plan_cfg.get("budget_from"):
        src = Path(plan_cfg["budget_from"])
        budget = remainder_budget(RemainderTable.read_csv(src if src.is_absolute() else base / src))
    report = gap_report(
        plan_cfg["cell"],
        [float(a) for a in plan_cfg["alphas"]],
        budget,
        plan_cfg.get("n"),
        int(plan_cfg.get("theta_count", 33)),
        int(plan_cfg.get("j_max", 4)),
    )
    _emit(report.csv_text(), args.out)
    outdir = plan_cfg.get("output_dir")
    if outdir:
        outdir = Path(outdir)
        if not outdir.is_absolute():
            outdir = base / outdir
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "gaps.csv").write_text(report.csv_text(), encoding="utf-8")
        (outdir / "gaps.json").write_text(report.json_text(), encoding="utf-8")
        emit_band_plots(report, outdir)
    return 0


def cmd_predict(args, cfg: CliConfig) -> int:
    if args.model == "harmonic":
        if not args.mu:
            raise ValueError("predict harmonic needs at least one --mu")
        levels = harmonic_levels(args.mu, args.count).levels
    else:
        if args.p is None or args.Cp is None:
            raise ValueError("predict degenerate needs --p and --Cp")
        levels = degenerate_well_levels(DegenerateWellSpec(args.p, args.Cp), args.count)
    _emit(",".join(f"{v:.12g}" for v in levels) + "\n", args.out)
    return 0


COMMANDS = {
    "curve": cmd_curve,
    "model1d": cmd_model1d,
    "effective": cmd_effective,
    "bands": cmd_bands,
    "bracket": cmd_bracket,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "predict": cmd_predict,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {k: v for k, v in vars(args).items() if v is not None and k not in ("subcommand", "seed", "config")}
    cfg = CliConfig(args.subcommand, getattr(args, "config", None), overrides, args.seed if args.seed is not None else 0)
    try:
        return COMMANDS[args.subcommand](args, cfg)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
