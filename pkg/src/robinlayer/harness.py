"""Alpha sweeps: layer brackets vs the effective boundary operator, fits, gap reports, plots.

The remainder of a sweep row is ``midpoint + alpha^2 - E_eff`` where the
midpoint comes from the layer bracket and ``E_eff`` from the boundary operator
on the same arc-length grid. ``predicted`` is the semiclassical estimate of
``E_eff + alpha*kappa_max`` (``e_j * alpha^(1/2)`` at a nondegenerate maximum,
``e_j * alpha^(1/(p+1))`` at a flat one of order 2p).
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__, plots
from .effective import (
    BandStructure,
    DegenerateWellSpec,
    assemble_effective,
    bloch_bands,
    degenerate_well_levels,
    effective_eigs,
    harmonic_levels,
)
from .errors import NumericalError
from .geometry import ArcCurve, PeriodicCell, cell_from_mapping, curvature_peak, curve_from_mapping
from .geometry import PRESET_DEFAULTS
from .layer import LayerConfig, bracket_eigenvalues

log = logging.getLogger(__name__)

CSV_COLUMNS = ("alpha", "delta", "j", "lower", "upper", "midpoint", "halfwidth", "effective", "remainder", "predicted")
SOLVERS = ("effective", "bracket")
PREDICTORS = ("auto", "harmonic", "degenerate", "constant", "none")
WORKERS_ENV = "ROBINLAYER_WORKERS"


@dataclass(frozen=True)
class SweepPlan:
    """One curve, a list of alpha values and the grids to solve on.

    ``curve`` is a curve config table (``{"kind": "ellipse", "a": 2, "b": 1}``);
    its ``n`` is replaced by ``n_s`` so both operators share the s-grid.
    """

    curve: Mapping
    alphas: tuple[float, ...]
    j_max: int = 1
    solvers: tuple[str, ...] = SOLVERS
    n_s: int = 256
    n_t: int = 64
    b: float = 2.0
    delta: float | None = None
    grading: float | None = None
    predictor: str = "auto"
    output_dir: str | None = None
    seed: int = 0
    workers: int | None = None
    base_dir: str | None = None

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas:
            raise ValueError("alpha list is empty")
        if any(not (math.isfinite(a) and a > 0) for a in alphas):
            raise ValueError("alpha values must be positive and finite")
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("alpha values must be strictly ascending")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "solvers", tuple(self.solvers))
        unknown = set(self.solvers) - set(SOLVERS)
        if unknown or not self.solvers:
            raise ValueError(f"solvers must be a non-empty subset of {SOLVERS}, got {self.solvers}")
        if not 1 <= self.j_max <= 10:
            raise ValueError(f"j_max must be in [1, 10], got {self.j_max}")
        if self.n_s < 64:
            raise ValueError(f"n_s must be >= 64, got {self.n_s}")
        if self.n_t < 16:
            raise ValueError(f"n_t must be >= 16, got {self.n_t}")
        if self.b < 2.0:
            raise ValueError(f"b must be >= 2, got {self.b}")
        if "bracket" in self.solvers and self.delta is None and alphas[0] <= 1.0:
            raise ValueError("the default delta schedule needs alpha > 1")
        if self.predictor not in PREDICTORS:
            raise ValueError(f"predictor must be one of {PREDICTORS}")
        if "kind" not in self.curve:
            raise ValueError("curve config needs a 'kind'")
        object.__setattr__(self, "curve", dict(self.curve))

    @classmethod
    def from_mapping(cls, cfg: Mapping, base_dir=None) -> "SweepPlan":
        cfg = dict(cfg)
        known = {f for f in cls.__dataclass_fields__}
        extra = set(cfg) - known
        if extra:
            raise ValueError(f"unknown plan keys: {sorted(extra)}")
        if "curve" not in cfg or "alphas" not in cfg:
            raise ValueError("a plan needs 'curve' and 'alphas'")
        if base_dir is not None and cfg.get("base_dir") is None:
            cfg["base_dir"] = str(base_dir)
        return cls(**cfg)

    def build_curve(self) -> ArcCurve:
        cfg = dict(self.curve)
        cfg["n"] = self.n_s
        return curve_from_mapping(cfg, self.base_dir)

    def worker_count(self) -> int:
        if self.workers is not None:
            return max(1, int(self.workers))
        env = os.environ.get(WORKERS_ENV, "").strip()
        return max(1, int(env)) if env else 1


@dataclass(frozen=True)
class RemainderRow:
    alpha: float
    delta: float
    j: int
    lower: float
    upper: float
    midpoint: float
    halfwidth: float
    effective: float
    remainder: float
    predicted: float
    converged: bool = True
    error: str | None = None

    def csv_fields(self) -> list[str]:
        return [str(self.j) if c == "j" else repr(float(getattr(self, c))) for c in CSV_COLUMNS]


@dataclass(frozen=True)
class RemainderTable:
    rows: tuple[RemainderRow, ...]
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)

    def select(self, j: int | None = None) -> list[RemainderRow]:
        return [r for r in self.rows if j is None or r.j == j]

    def column(self, name: str, j: int | None = None) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.select(j)], dtype=float)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.csv_fields())
        return buf.getvalue()

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.csv_text(), encoding="utf-8")
        return path

    def json_text(self) -> str:
        rows = [{k: _json_float(v) for k, v in asdict(r).items()} for r in self.rows]
        return json.dumps({"metadata": self.metadata, "rows": rows}, indent=2, sort_keys=True) + "\n"

    def write_json(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.json_text(), encoding="utf-8")
        return path

    @classmethod
    def read_csv(cls, path) -> "RemainderTable":
        return cls.parse_csv(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def parse_csv(cls, text: str) -> "RemainderTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"expected CSV header {','.join(CSV_COLUMNS)}")
        rows = []
        for rec in reader:
            if not rec:
                continue
            vals = dict(zip(CSV_COLUMNS, rec))
            kw = {c: (int(vals[c]) if c == "j" else float(vals[c])) for c in CSV_COLUMNS}
            rows.append(RemainderRow(**kw, converged=math.isfinite(kw["remainder"])))
        return cls(tuple(rows))


def _json_float(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


# --------------------------------------------------------------------------
# predictors


@dataclass(frozen=True)
class Prediction:
    kind: str
    levels: tuple[float, ...]
    exponent: float

    def value(self, alpha: float, j: int) -> float:
        if self.kind == "none" or j > len(self.levels):
            return math.nan
        return self.levels[j - 1] * alpha**self.exponent


def predict_levels(curve: ArcCurve, count: int, kind: str = "auto") -> Prediction:
    """Leading shifts of E_eff + alpha*kappa_max for the first ``count`` levels.

    Every maximum of the curvature contributes its own copy of the well levels.
    """
    kap = np.asarray(curve.kappa)
    spec = curve.spec
    is_flat_well = spec is not None and spec.kind == "preset" and spec.name == "flat_well"
    if kind == "auto":
        if np.ptp(kap) <= 1e-9 * max(1.0, float(np.max(np.abs(kap)))):
            kind = "constant"
        elif is_flat_well:
            kind = "degenerate"
        elif curvature_peak(curve).flat:
            kind = "none"
        else:
            kind = "harmonic"
    if kind == "none":
        return Prediction("none", (), 0.0)
    if kind == "constant":
        return Prediction("constant", (0.0,) * count, 0.0)
    if kind == "degenerate":
        if not is_flat_well:
            raise ValueError("the degenerate predictor needs the flat_well preset")
        params = {**PRESET_DEFAULTS["flat_well"], **dict(spec.params)}
        p, Cp = int(params["p"]), float(params["Cp"])
        wells = 2  # the profile is centrally symmetric with two maxima
        per_well = degenerate_well_levels(DegenerateWellSpec(p=p, Cp=Cp), count)
        levels = np.sort(np.repeat(per_well, wells))[:count]
        return Prediction("degenerate", tuple(float(v) for v in levels), 1.0 / (p + 1))
    if kind == "harmonic":
        peak = curvature_peak(curve)
        if peak.flat or peak.kappa2 >= 0:
            raise ValueError("the harmonic predictor needs a nondegenerate curvature maximum")
        wells = max(1, len(peak.maxima))
        per_well = harmonic_levels([-peak.kappa2], count).levels
        levels = np.sort(np.repeat(per_well, wells))[:count]
        return Prediction("harmonic", tuple(float(v) for v in levels), 0.5)
    raise ValueError(f"unknown predictor {kind!r}")


# --------------------------------------------------------------------------
# sweeps


def _nan_rows(plan, alpha, delta, prediction, msg, effective=None):
    eff = [math.nan] * plan.j_max if effective is None else list(effective)
    return [
        RemainderRow(alpha, delta, j, *([math.nan] * 4), eff[j - 1], math.nan, prediction.value(alpha, j), False, msg)
        for j in range(1, plan.j_max + 1)
    ]


def _solve_point(args) -> list[RemainderRow]:
    plan, alpha, prediction = args
    curve = plan.build_curve()
    delta = math.nan
    eff = np.full(plan.j_max, math.nan)
    try:
        if "effective" in plan.solvers:
            op = assemble_effective(curve, alpha, plan.n_s)
            res = effective_eigs(op, plan.j_max, tol=1e-10 * max(1.0, alpha), seed=plan.seed)
            eff = np.where(res.converged, res.eigenvalues, math.nan)
        if "bracket" not in plan.solvers:
            return _nan_rows(plan, alpha, delta, prediction, None, eff)
        cfg = LayerConfig(curve, alpha, plan.delta, plan.b, plan.n_s, plan.n_t, plan.grading, seed=plan.seed)
        delta = float(cfg.delta)
        br = bracket_eigenvalues(cfg, plan.j_max)
    except (ValueError, ArithmeticError, NumericalError) as exc:
        log.warning("alpha=%g failed: %s", alpha, exc)
        return _nan_rows(plan, alpha, delta, prediction, f"{type(exc).__name__}: {exc}", eff)
    rows = []
    for j in range(1, plan.j_max + 1):
        if j > br.lower.size:
            rows.append(_nan_rows(plan, alpha, delta, prediction, "no negative Dirichlet-end eigenvalue", eff)[j - 1])
            continue
        i = j - 1
        ok = bool(br.converged[i])
        mid = float(br.midpoint[i])
        rem = mid + alpha * alpha - float(eff[i]) if ok else math.nan
        rows.append(
            RemainderRow(
                alpha,
                delta,
                j,
                float(br.lower[i]),
                float(br.upper[i]),
                mid,
                float(br.halfwidth[i]),
                float(eff[i]),
                rem,
                prediction.value(alpha, j),
                ok,
                None if ok else "layer solve did not converge",
            )
        )
    return rows


def run_sweep(plan: SweepPlan) -> RemainderTable:
    """Solve every alpha of the plan, in parallel when more than one worker is set.

    Failures at one alpha are recorded in that alpha's rows. Output files go to
    ``plan.output_dir`` when it is set.
    """
    curve = plan.build_curve()
    prediction = predict_levels(curve, plan.j_max, plan.predictor)
    items = [(plan, a, prediction) for a in plan.alphas]
    workers = min(plan.worker_count(), len(items))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_solve_point, items))
    else:
        chunks = [_solve_point(it) for it in items]
    rows = tuple(r for chunk in chunks for r in chunk)
    meta = {
        "curve": dict(plan.curve),
        "curve_label": curve.name,
        "kappa_max": float(np.max(curve.kappa)),
        "n_s": plan.n_s,
        "n_t": plan.n_t,
        "b": plan.b,
        "delta": plan.delta,
        "grading": plan.grading,
        "j_max": plan.j_max,
        "solvers": list(plan.solvers),
        "seed": plan.seed,
        "predictor": prediction.kind,
        "predictor_levels": list(prediction.levels),
        "predictor_exponent": prediction.exponent,
        "versions": _versions(),
    }
    table = RemainderTable(rows, meta)
    if plan.output_dir is not None:
        out = Path(plan.output_dir)
        table.write_csv(out / "sweep.csv")
        table.write_json(out / "sweep.json")
        emit_plots(table, out)
    return table


def _versions() -> dict:
    import scipy

    return {"robinlayer": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


# --------------------------------------------------------------------------
# fits


def _log_pairs(pairs, min_points):
    data = np.asarray(list(pairs), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < min_points:
        raise ValueError(f"need at least {min_points} (alpha, value) pairs")
    if not np.all(np.isfinite(data)) or np.any(data <= 0):
        raise ValueError("alpha and value must be positive and finite for a log-log fit")
    return np.log(data[:, 0]), np.log(data[:, 1])


def fit_exponent(pairs: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Slope and its standard error from least squares on (log alpha, log value)."""
    x, y = _log_pairs(pairs, 4)
    xc = x - x.mean()
    sxx = float(np.dot(xc, xc))
    if sxx == 0.0:
        raise ValueError("alpha values must not all coincide")
    slope = float(np.dot(xc, y - y.mean())) / sxx
    resid = y - y.mean() - slope * xc
    stderr = math.sqrt(float(np.dot(resid, resid)) / (x.size - 2) / sxx)
    return slope, stderr


def fit_prefactor(pairs: Sequence[tuple[float, float]], exponent: float) -> float:
    """Least-squares C in log(value) = log C + exponent*log(alpha) with the exponent held fixed."""
    x, y = _log_pairs(pairs, 1)
    return float(math.exp(float(np.mean(y - exponent * x))))


def fit_intercept(pairs: Sequence[tuple[float, float]]) -> float:
    """exp of the intercept of the free log-log fit."""
    pairs = list(pairs)
    x, y = _log_pairs(pairs, 4)
    slope, _ = fit_exponent(pairs)
    return float(math.exp(float(np.mean(y - slope * x))))


# --------------------------------------------------------------------------
# gap reports


def remainder_budget(table: RemainderTable) -> float:
    """Empirical remainder budget: twice the largest |R| seen in a sweep."""
    rem = np.abs(table.column("remainder"))
    rem = rem[np.isfinite(rem)]
    if rem.size == 0:
        raise ValueError("the table has no finite remainders")
    return 2.0 * float(rem.max())


@dataclass(frozen=True)
class GapRow:
    alpha: float
    gaps: tuple[tuple[float, float], ...]
    lengths: tuple[float, ...]
    certified: tuple[bool, ...]
    bands: BandStructure


@dataclass(frozen=True)
class GapReport:
    rows: tuple[GapRow, ...]
    budget: float | None
    note: str

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("alpha", "gap", "lower", "upper", "length", "certified"))
        for r in self.rows:
            for g, ((lo, hi), ln, c) in enumerate(zip(r.gaps, r.lengths, r.certified), start=1):
                w.writerow((repr(r.alpha), g, repr(lo), repr(hi), repr(ln), int(c)))
        return buf.getvalue()

    def json_text(self) -> str:
        rows = [
            {
                "alpha": r.alpha,
                "gaps": [list(g) for g in r.gaps],
                "lengths": list(r.lengths),
                "certified": list(r.certified),
                "edge_mismatch": r.bands.edge_mismatch,
            }
            for r in self.rows
        ]
        return json.dumps({"budget": self.budget, "note": self.note, "rows": rows}, indent=2, sort_keys=True) + "\n"


def gap_report(
    cell: PeriodicCell | Mapping,
    alphas: Sequence[float],
    budget: float | None = None,
    n: int | None = None,
    theta_count: int = 33,
    j_max: int = 4,
) -> GapReport:
    """Gaps of the effective Bloch bands for each alpha.

    A gap is flagged certified when its length exceeds ``2*budget``; the
    budget is an empirical surrogate (see ``remainder_budget``), not a proven
    constant. With ``budget=None`` nothing is certified.
    """
    if isinstance(cell, Mapping):
        cell = cell_from_mapping(cell)
    if budget is not None and not (math.isfinite(budget) and budget >= 0):
        raise ValueError("budget must be finite and >= 0")
    rows = []
    for a in alphas:
        bs = bloch_bands(cell, float(a), n, theta_count, j_max)
        lengths = tuple(hi - lo for lo, hi in bs.gaps)
        cert = tuple(budget is not None and ln > 2.0 * budget for ln in lengths)
        rows.append(GapRow(float(a), bs.gaps, lengths, cert, bs))
    if budget is None:
        note = "no remainder budget given; no window certified"
    else:
        note = f"certified when gap length > 2 * {budget!r} (empirical budget: 2 x max observed |R| of a layer sweep)"
    return GapReport(tuple(rows), budget, note)


# --------------------------------------------------------------------------
# plots

PLOT_METRICS = ("remainder", "halfwidth", "effective_shift")


def emit_plots(table: RemainderTable, outdir) -> list[Path]:
    """One SVG per metric: remainder, bracket halfwidth, and a log-log plot of E_eff + alpha*kappa_max."""
    outdir = Path(outdir)
    kmax = table.metadata.get("kappa_max")
    js = sorted({r.j for r in table.rows})
    figs = {
        "remainder": plots.Figure("remainder vs alpha", "alpha", "midpoint + alpha^2 - E_eff"),
        "halfwidth": plots.Figure("bracket halfwidth", "alpha", "halfwidth", logx=True, logy=True),
        "effective_shift": plots.Figure("effective shift", "alpha", "E_eff + alpha*kappa_max", logx=True, logy=True),
    }
    for j in js:
        a = table.column("alpha", j)
        figs["remainder"].add(f"j={j}", a, table.column("remainder", j))
        figs["halfwidth"].add(f"j={j}", a, table.column("halfwidth", j))
        if kmax is not None:
            figs["effective_shift"].add(f"j={j}", a, table.column("effective", j) + a * kmax)
            figs["effective_shift"].add(f"predicted j={j}", a, table.column("predicted", j), dashed=True)
    return [plots.save(figs[m], outdir / f"{m}.svg") for m in PLOT_METRICS]


def emit_band_plots(report: GapReport, outdir) -> list[Path]:
    """Band functions per alpha, plus gap length vs alpha."""
    outdir = Path(outdir)
    paths = []
    for r in report.rows:
        fig = plots.Figure(f"bands at alpha={r.alpha:g}", "theta", "epsilon")
        for j in range(r.bands.j_max):
            fig.add(f"band {j + 1}", r.bands.theta_grid, r.bands.bands[:, j])
        paths.append(plots.save(fig, outdir / f"bands_alpha_{r.alpha:g}.svg"))
    fig = plots.Figure("gap lengths", "alpha", "gap length")
    count = max((len(r.lengths) for r in report.rows), default=0)
    for g in range(count):
        pts = [(r.alpha, r.lengths[g]) for r in report.rows if g < len(r.lengths)]
        fig.add(f"gap {g + 1}", [p[0] for p in pts], [p[1] for p in pts])
    paths.append(plots.save(fig, outdir / "gap_lengths.svg"))
    return paths
