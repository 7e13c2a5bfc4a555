"""Closed plane curves sampled at uniform arc length, plus periodic curvature cells.

Presets are built from an analytic parametrization (or an analytic curvature
for the intrinsic ones) and resampled at uniform arc length with a spectral
arc-length map, so their curvature is exact up to rounding. Sampled curves go
through a periodic cubic spline and get curvature from central differences of
the tangent angle, which is second order in the output spacing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np
from scipy.interpolate import CubicSpline

PRESET_DEFAULTS: dict[str, dict[str, float]] = {
    "circle": {"R": 1.0},
    "ellipse": {"a": 2.0, "b": 1.0},
    "perturbed_circle": {"R": 1.0, "eps": 0.1, "m": 2},
    "flat_well": {"p": 2, "Cp": 1.0, "length": 2.0 * math.pi},
    "stadium": {"R": 1.0, "ell": 2.0},
}

_INTEGER_PARAMS = {("perturbed_circle", "m"), ("flat_well", "p")}

PLATEAU_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class CurveSpec:
    """Recipe for a curve: either a named preset or a list of sample points."""

    kind: str
    name: str | None = None
    params: Mapping[str, float] = field(default_factory=dict)
    points: np.ndarray | None = None
    closed: bool = True

    def __post_init__(self):
        if self.kind == "preset":
            if self.name not in PRESET_DEFAULTS:
                raise ValueError(f"unknown preset {self.name!r}; choose from {sorted(PRESET_DEFAULTS)}")
            defaults = PRESET_DEFAULTS[self.name]
            unknown = set(self.params) - set(defaults)
            if unknown:
                raise ValueError(f"unknown parameters for {self.name}: {sorted(unknown)}")
            merged = {**defaults, **{k: float(v) for k, v in self.params.items()}}
            for key, val in merged.items():
                if not math.isfinite(val) or val <= 0:
                    raise ValueError(f"{self.name}.{key} must be finite and > 0, got {val}")
                if (self.name, key) in _INTEGER_PARAMS and val != int(val):
                    raise ValueError(f"{self.name}.{key} must be an integer, got {val}")
            if self.name == "ellipse" and merged["a"] < merged["b"]:
                raise ValueError("ellipse needs a >= b")
            if self.name == "perturbed_circle" and merged["eps"] >= 1.0:
                raise ValueError("perturbed_circle needs eps < 1 to stay star-shaped")
            object.__setattr__(self, "params", MappingProxyType(merged))
            object.__setattr__(self, "closed", True)
        elif self.kind == "sampled":
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2:
                raise ValueError("sampled points must have shape (m, 2)")
            if self.closed and len(pts) > 1 and np.array_equal(pts[0], pts[-1]):
                pts = pts[:-1]
            if len(pts) < 16:
                raise ValueError(f"need at least 16 sample points, got {len(pts)}")
            if not np.all(np.isfinite(pts)):
                raise ValueError("sample points must be finite")
            steps = np.diff(np.vstack([pts, pts[:1]]) if self.closed else pts, axis=0)
            if np.any(np.hypot(steps[:, 0], steps[:, 1]) == 0.0):
                raise ValueError("consecutive sample points must be distinct")
            object.__setattr__(self, "points", _frozen(pts))
            object.__setattr__(self, "params", MappingProxyType({}))
        else:
            raise ValueError(f"kind must be 'preset' or 'sampled', got {self.kind!r}")

    @classmethod
    def preset(cls, name: str, **params) -> "CurveSpec":
        return cls(kind="preset", name=name, params=params)

    @classmethod
    def sampled(cls, points, closed: bool = True) -> "CurveSpec":
        return cls(kind="sampled", points=points, closed=closed)

    @property
    def label(self) -> str:
        if self.kind == "sampled":
            return "sampled"
        args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}({args})"


@dataclass(frozen=True)
class ArcCurve:
    """Curve sampled at uniform arc length.

    Closed curves use nodes ``s_i = i*L/n``; open arcs include both end points.
    """

    length: float
    kappa: np.ndarray
    position: np.ndarray
    closed: bool = True
    spec: CurveSpec | None = None

    def __post_init__(self):
        kap = _frozen(self.kappa)
        pos = _frozen(self.position)
        if kap.ndim != 1 or pos.shape != (kap.size, 2):
            raise ValueError("kappa must be (n,) and position (n, 2)")
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ValueError("length must be finite and positive")
        if not np.all(np.isfinite(kap)):
            raise ValueError("curvature must be finite")
        object.__setattr__(self, "kappa", kap)
        object.__setattr__(self, "position", pos)

    @property
    def n(self) -> int:
        return self.kappa.size

    @property
    def h(self) -> float:
        return self.length / (self.n if self.closed else self.n - 1)

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    @property
    def name(self) -> str:
        return self.spec.label if self.spec is not None else "curve"

    def turning(self) -> float:
        """Trapezoid sum of curvature over one period (2*pi for a simple closed curve)."""
        if self.closed:
            return float(np.sum(self.kappa) * self.h)
        k = self.kappa
        return float((k.sum() - 0.5 * (k[0] + k[-1])) * self.h)

    def at(self, n: int) -> "ArcCurve":
        """The same curve on an n-node grid."""
        if n == self.n:
            return self
        if self.spec is not None:
            return build_arc_curve(self.spec, n)
        if not self.closed:
            raise ValueError("cannot resample an open curve without its spec")
        s_new = np.arange(n) * self.length / n
        ext = np.append(self.s, self.length)
        kap = CubicSpline(ext, np.append(self.kappa, self.kappa[0]), bc_type="periodic")(s_new)
        px = CubicSpline(ext, np.append(self.position[:, 0], self.position[0, 0]), bc_type="periodic")(s_new)
        py = CubicSpline(ext, np.append(self.position[:, 1], self.position[0, 1]), bc_type="periodic")(s_new)
        return ArcCurve(self.length, kap, np.column_stack([px, py]), True, None)


@dataclass(frozen=True)
class PeriodicCell:
    """One period of an L-periodic curvature profile on a uniform grid."""

    period: float
    kappa: np.ndarray
    name: str = "cell"

    def __post_init__(self):
        kap = _frozen(self.kappa)
        if kap.ndim != 1 or kap.size < 4:
            raise ValueError("cell curvature must be a 1D array with at least 4 entries")
        if not (self.period > 0 and math.isfinite(self.period)):
            raise ValueError("period must be finite and positive")
        if not np.all(np.isfinite(kap)):
            raise ValueError("cell curvature must be finite")
        object.__setattr__(self, "kappa", kap)

    @property
    def n(self) -> int:
        return self.kappa.size

    @property
    def h(self) -> float:
        return self.period / self.n

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    closed = True

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], period: float, n: int, name="cell"):
        s = np.arange(n) * period / n
        return cls(period, np.broadcast_to(np.asarray(func(s), dtype=float), (n,)), name)

    @classmethod
    def preset(cls, kind: str, period: float = 2.0 * math.pi, n: int = 256, **params) -> "PeriodicCell":
        """``free`` (kappa = 0), ``constant`` (kappa = value) or ``cosine`` (mean + amplitude*cos)."""
        if kind == "free":
            _no_extra(kind, params, set())
            return cls.from_function(lambda s: 0.0 * s, period, n, "free")
        if kind == "constant":
            _no_extra(kind, params, {"value"})
            value = float(params.get("value", 1.0))
            return cls.from_function(lambda s: value + 0.0 * s, period, n, f"constant({value:g})")
        if kind == "cosine":
            _no_extra(kind, params, {"mean", "amplitude"})
            mean = float(params.get("mean", 1.0))
            amp = float(params.get("amplitude", 1.0))
            return cls.from_function(
                lambda s: mean + amp * np.cos(2.0 * np.pi * s / period), period, n, f"cosine({mean:g},{amp:g})"
            )
        raise ValueError(f"unknown cell kind {kind!r}; choose from free, constant, cosine")

    def at(self, n: int) -> "PeriodicCell":
        if n == self.n:
            return self
        ext = np.append(self.s, self.period)
        spline = CubicSpline(ext, np.append(self.kappa, self.kappa[0]), bc_type="periodic")
        return PeriodicCell(self.period, spline(np.arange(n) * self.period / n), self.name)


def _no_extra(kind, params, allowed):
    extra = set(params) - allowed
    if extra:
        raise ValueError(f"unknown parameters for cell {kind}: {sorted(extra)}")


@dataclass(frozen=True)
class CurvaturePeak:
    """Location and shape of the curvature maximum."""

    s0: float
    kappa_max: float
    kappa2: float
    flat: bool
    maxima: tuple[float, ...]


# --------------------------------------------------------------------------
# spectral helpers


class _PeriodicPrimitive:
    """Antiderivative of a smooth periodic function known on a uniform grid.

    ``F(x) = mean*x + P(x)`` with ``P`` periodic and ``P(0) = 0``.
    """

    def __init__(self, samples: np.ndarray, period: float):
        m = samples.size
        c = np.fft.rfft(samples) / m
        if m % 2 == 0:
            c[-1] *= 0.5
        self.mean = float(c[0].real)
        mags = np.abs(c[1:])
        scale = max(np.abs(c).max(), 1e-300)
        live = np.nonzero(mags > 1e-17 * scale)[0]
        kmax = live[-1] + 1 if live.size else 0
        self.freq = 2.0 * np.pi / period * np.arange(1, kmax + 1)
        self.coef = c[1 : kmax + 1] / (1j * self.freq) if kmax else np.zeros(0, complex)
        # resolution check: the tail of the spectrum must have died out
        tail = mags[-max(4, m // 16) :]
        self.resolved = bool(tail.max(initial=0.0) <= 1e-13 * scale)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = self.mean * x
        if self.coef.size:
            for start in range(0, x.size, 2048):
                xs = x.ravel()[start : start + 2048]
                phase = np.exp(1j * np.outer(xs, self.freq)) - 1.0
                out.ravel()[start : start + 2048] += 2.0 * np.real(phase @ self.coef)
        return out


def _resolved_primitive(fn: Callable[[np.ndarray], np.ndarray], period: float, m0: int = 512):
    m = m0
    while True:
        grid = np.arange(m) * period / m
        prim = _PeriodicPrimitive(fn(grid), period)
        if prim.resolved or m >= 1 << 17:
            return prim
        m *= 2


def _from_parametric(pos, dpos, curvature, n, spec) -> ArcCurve:
    """Resample ``theta -> pos(theta)`` (period 2*pi) at uniform arc length."""

    def speed(th):
        d = dpos(th)
        return np.hypot(d[0], d[1])

    arc = _resolved_primitive(speed, 2.0 * np.pi)
    length = 2.0 * np.pi * arc.mean
    targets = np.arange(n) * length / n
    th = targets / arc.mean
    for _ in range(50):
        step = (arc(th) - targets) / speed(th)
        th = th - step
        if np.max(np.abs(step)) < 1e-15:
            break
    x, y = pos(th)
    return ArcCurve(length, curvature(th), np.column_stack([x, y]), True, spec)


def _from_intrinsic(kappa_fn, length, n, spec) -> ArcCurve:
    """Integrate an analytic curvature twice; the start tangent points along +y."""
    angle = _resolved_primitive(kappa_fn, length)
    if abs(angle.mean * length - 2.0 * np.pi) > 1e-9:
        raise ValueError("curvature does not integrate to 2*pi over one period")

    def tangent_angle(s):
        return 0.5 * np.pi + angle(s)

    xp = _resolved_primitive(lambda s: np.cos(tangent_angle(s)), length)
    yp = _resolved_primitive(lambda s: np.sin(tangent_angle(s)), length)
    if math.hypot(xp.mean, yp.mean) * length > 1e-9 * length:
        raise ValueError("curvature profile does not close up")
    s = np.arange(n) * length / n
    return ArcCurve(length, kappa_fn(s), np.column_stack([xp(s), yp(s)]), True, spec)


# --------------------------------------------------------------------------
# presets


def _circle(R, n, spec):
    return _from_parametric(
        lambda t: (R * np.cos(t), R * np.sin(t)),
        lambda t: (-R * np.sin(t), R * np.cos(t)),
        lambda t: np.full_like(t, 1.0 / R),
        n,
        spec,
    )


def _ellipse(a, b, n, spec):
    def curvature(t):
        sp = np.hypot(a * np.sin(t), b * np.cos(t))
        return a * b / sp**3

    return _from_parametric(
        lambda t: (a * np.cos(t), b * np.sin(t)),
        lambda t: (-a * np.sin(t), b * np.cos(t)),
        curvature,
        n,
        spec,
    )


def _perturbed_circle(R, eps, m, n, spec):
    def radius(t):
        return R * (1.0 + eps * np.cos(m * t)), -R * eps * m * np.sin(m * t), -R * eps * m * m * np.cos(m * t)

    def pos(t):
        r = radius(t)[0]
        return r * np.cos(t), r * np.sin(t)

    def dpos(t):
        r, dr, _ = radius(t)
        return dr * np.cos(t) - r * np.sin(t), dr * np.sin(t) + r * np.cos(t)

    def curvature(t):
        r, dr, ddr = radius(t)
        return (r * r + 2.0 * dr * dr - r * ddr) / (r * r + dr * dr) ** 1.5

    return _from_parametric(pos, dpos, curvature, n, spec)


def flat_well_profile(p: int, Cp: float, length: float):
    """Curvature ``k0 - c*sin(2*pi*s/L)**(2p)`` with a degenerate maximum at s = 0 and s = L/2.

    The profile has period L/2, so the curve is centrally symmetric and closes
    automatically. Near each maximum ``kappa = kappa_max - Cp*s**(2p) + O(s**(2p+2))``.
    """
    c = Cp * (length / (2.0 * np.pi)) ** (2 * p)
    k0 = 2.0 * np.pi / length + c * math.comb(2 * p, p) / 4.0**p
    if k0 - c <= 0:
        raise ValueError(
            f"flat_well(p={p}, Cp={Cp}, length={length}) is not convex; lower Cp or length"
        )

    def kappa(s):
        return k0 - c * np.sin(2.0 * np.pi * np.asarray(s) / length) ** (2 * p)

    return kappa, k0


def _stadium(R, ell, n, spec):
    warnings.warn(
        "stadium boundary is only C^{1,1}: curvature jumps at the arc junctions",
        stacklevel=3,
    )
    quarter = 0.5 * np.pi * R
    breaks = np.cumsum([quarter, ell, np.pi * R, ell, quarter])
    length = breaks[-1]
    s = np.arange(n) * length / n
    seg = np.searchsorted(breaks, s, side="right")
    x = np.empty(n)
    y = np.empty(n)
    half = 0.5 * ell
    starts = np.concatenate([[0.0], breaks[:-1]])
    u = s - starts[seg]
    pieces = [(half, 0.0, None), (None, None, (half, R, -1.0)), (-half, 0.5 * np.pi, None),
              (None, None, (-half, -R, 1.0)), (half, -0.5 * np.pi, None)]
    for k, (cx, phi0, straight) in enumerate(pieces):
        mask = seg == k
        if straight is None:
            phi = phi0 + u[mask] / R
            x[mask] = cx + R * np.cos(phi)
            y[mask] = R * np.sin(phi)
        else:
            x0, y0, sign = straight
            x[mask] = x0 + sign * u[mask]
            y[mask] = y0
    # cell averages over [s_i - h/2, s_i + h/2] keep the turning sum exact across the jumps
    h = length / n

    def arc_measure(a):
        # measure of arc pieces in [0, a] for a in [-h, L + h]
        a = np.asarray(a)
        edges = np.concatenate([[0.0], breaks])
        total = np.zeros_like(a)
        for k in (0, 2, 4):
            total += np.clip(a - edges[k], 0.0, edges[k + 1] - edges[k])
        total += np.where(a < 0, -np.clip(-a, 0.0, quarter), 0.0)
        total += np.where(a > length, np.clip(a - length, 0.0, quarter), 0.0)
        return total

    frac = (arc_measure(s + 0.5 * h) - arc_measure(s - 0.5 * h)) / h
    frac = np.where(np.abs(frac - 1.0) < 1e-12, 1.0, np.where(np.abs(frac) < 1e-12, 0.0, frac))
    kap = frac / R
    return ArcCurve(float(length), kap, np.column_stack([x, y]), True, spec)


# --------------------------------------------------------------------------
# sampled curves


def _segments_cross(a0, a1, b0, b1) -> np.ndarray:
    """Closed-segment intersection test, broadcast over leading axes."""

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    d1 = orient(b0, b1, a0)
    d2 = orient(b0, b1, a1)
    d3 = orient(a0, a1, b0)
    d4 = orient(a0, a1, b1)
    boxes = (
        (np.minimum(a0[..., 0], a1[..., 0]) <= np.maximum(b0[..., 0], b1[..., 0]))
        & (np.minimum(b0[..., 0], b1[..., 0]) <= np.maximum(a0[..., 0], a1[..., 0]))
        & (np.minimum(a0[..., 1], a1[..., 1]) <= np.maximum(b0[..., 1], b1[..., 1]))
        & (np.minimum(b0[..., 1], b1[..., 1]) <= np.maximum(a0[..., 1], a1[..., 1]))
    )
    return boxes & (d1 * d2 <= 0) & (d3 * d4 <= 0)


def is_simple(points: np.ndarray, closed: bool = True) -> bool:
    """True when no two non-adjacent segments of the polyline touch."""
    p = np.asarray(points, dtype=float)
    q = np.roll(p, -1, axis=0) if closed else p[1:]
    p = p if closed else p[:-1]
    m = len(p)
    idx = np.arange(m)
    for start in range(0, m, 256):
        i = idx[start : start + 256, None]
        hit = _segments_cross(p[i], q[i], p[None, :], q[None, :])
        gap = idx[None, :] - i
        adjacent = (np.abs(gap) <= 1) | (closed & (np.abs(gap) == m - 1))
        if np.any(hit & ~adjacent & (gap > 0)):
            return False
    return True


def signed_area(points: np.ndarray) -> float:
    p = np.asarray(points, dtype=float)
    q = np.roll(p, -1, axis=0)
    return 0.5 * float(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def _spline_arc(spline, lo, hi):
    """Gauss-Legendre arc length of a spline over [lo, hi] (arrays)."""
    mid = 0.5 * (lo + hi)
    rad = 0.5 * (hi - lo)
    u = mid[:, None] + rad[:, None] * _GL_X[None, :]
    d = spline(u, 1)
    return rad * (np.hypot(d[..., 0], d[..., 1]) @ _GL_W)


def _from_samples(spec: CurveSpec, n: int) -> ArcCurve:
    pts = np.array(spec.points)
    closed = spec.closed
    if not is_simple(pts, closed):
        raise ValueError("sampled curve is not simple (segments intersect)")
    if closed and signed_area(pts) < 0:
        pts = pts[::-1].copy()
    nodes = np.vstack([pts, pts[:1]]) if closed else pts
    chord = np.hypot(*np.diff(nodes, axis=0).T)
    u = np.concatenate([[0.0], np.cumsum(chord)])
    spline = CubicSpline(u, nodes, bc_type="periodic" if closed else "not-a-knot")
    seg_len = _spline_arc(spline, u[:-1], u[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    length = float(cum[-1])
    h = length / (n if closed else n - 1)
    targets = np.arange(n) * h
    seg = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(seg_len) - 1)
    par = u[seg] + (targets - cum[seg]) / seg_len[seg] * chord[seg]
    for _ in range(3):
        d = spline(par, 1)
        par = par - (cum[seg] + _spline_arc(spline, u[seg], par) - targets) / np.hypot(d[:, 0], d[:, 1])
    position = spline(par)
    d = spline(par, 1)
    angle = np.arctan2(d[:, 1], d[:, 0])
    if closed:
        dang = np.angle(np.exp(1j * (np.roll(angle, -1) - angle)))
        kappa = (dang + np.roll(dang, 1)) / (2.0 * h)
    else:
        ang = np.unwrap(angle)
        kappa = np.gradient(ang, h, edge_order=2)
    return ArcCurve(length, kappa, position, closed, spec)


# --------------------------------------------------------------------------
# public API


def build_arc_curve(spec: CurveSpec, n: int) -> ArcCurve:
    """Sample ``spec`` at ``n`` uniform arc-length nodes."""
    if int(n) != n or n < 32:
        raise ValueError(f"grid size must be an integer >= 32, got {n}")
    n = int(n)
    if spec.kind == "sampled":
        return _from_samples(spec, n)
    p = spec.params
    if spec.name == "circle":
        return _circle(p["R"], n, spec)
    if spec.name == "ellipse":
        return _ellipse(p["a"], p["b"], n, spec)
    if spec.name == "perturbed_circle":
        return _perturbed_circle(p["R"], p["eps"], int(p["m"]), n, spec)
    if spec.name == "flat_well":
        kappa, _ = flat_well_profile(int(p["p"]), p["Cp"], p["length"])
        return _from_intrinsic(kappa, p["length"], n, spec)
    if spec.name == "stadium":
        return _stadium(p["R"], p["ell"], n, spec)
    raise AssertionError(spec.name)


def curvature_peak(curve: ArcCurve | PeriodicCell) -> CurvaturePeak:
    """Global curvature maximum, refined position and second derivative there."""
    kap = np.asarray(curve.kappa)
    n = kap.size
    h = curve.h
    closed = curve.closed
    kmax = float(kap.max())
    i0 = int(np.argmax(kap))
    near = kap >= kmax - PLATEAU_TOL
    # longest run of near-max nodes, wrapping around for closed curves
    if closed and near.all():
        longest = n
    else:
        longest, cur = 0, 0
        seq = np.concatenate([near, near]) if closed else near
        for flag in seq:
            cur = cur + 1 if flag else 0
            longest = max(longest, cur)
    if longest >= 3:
        return CurvaturePeak(float(i0 * h), kmax, 0.0, True, (float(i0 * h),))

    def nb(i, k):
        j = i + k
        return kap[j % n] if closed else kap[j]

    tol = 1e-9 * max(1.0, abs(kmax))
    peaks = []
    for i in np.nonzero(kap >= kmax - tol)[0]:
        if not closed and (i == 0 or i == n - 1):
            continue
        if kap[i] >= nb(i, -1) and kap[i] >= nb(i, 1):
            peaks.append(int(i))
    if not peaks:
        raise ValueError("curvature maximum sits at an end of an open arc; no interior maximum")

    def refine(i):
        km, k0, kp = nb(i, -1), kap[i], nb(i, 1)
        denom = km - 2.0 * k0 + kp
        off = 0.5 * (km - kp) / denom if denom < 0 else 0.0
        return off

    i = peaks[0] if i0 not in peaks else i0
    off = refine(i)
    s0 = (i + off) * h
    if closed:
        s0 %= curve.length if isinstance(curve, ArcCurve) else curve.period
    half = 4 if (closed or 4 <= i <= n - 5) else min(i, n - 1 - i)
    if half >= 2:
        js = np.arange(-half, half + 1)
        vals = np.array([nb(i, int(j)) for j in js])
        coef = np.polyfit(js.astype(float), vals, min(4, 2 * half))
        k2 = float(np.polyval(np.polyder(coef, 2), off)) / (h * h)
    else:
        k2 = float(nb(i, -1) - 2 * kap[i] + nb(i, 1)) / (h * h)
    k2 = min(k2, 0.0)
    maxima = tuple(sorted(float(((p + refine(p)) * h) % (n * h if closed else np.inf)) for p in peaks))
    return CurvaturePeak(float(s0), kmax, k2, False, maxima)


def min_layer_width(curve: ArcCurve | PeriodicCell) -> float:
    """Largest delta with 1 - t*kappa >= 1/2 for all t in [0, delta]; inf if kappa <= 0."""
    kmax = float(np.max(curve.kappa))
    return math.inf if kmax <= 0 else 0.5 / kmax


# --------------------------------------------------------------------------
# config helpers


def curve_from_mapping(cfg: Mapping, base_dir=None) -> ArcCurve:
    """Build a curve from ``{kind = "ellipse", a = 2.0, b = 1.0, n = 512}``-style tables.

    ``kind = "csv"`` reads ``path`` (header ``x,y``); ``closed`` defaults to true.
    """
    cfg = dict(cfg)
    kind = cfg.pop("kind", None)
    if kind is None:
        raise ValueError("curve config needs a 'kind'")
    n = int(cfg.pop("n", 512))
    if kind == "csv":
        import pathlib

        path = pathlib.Path(cfg.pop("path"))
        if base_dir is not None and not path.is_absolute():
            path = pathlib.Path(base_dir) / path
        closed = bool(cfg.pop("closed", True))
        if cfg:
            raise ValueError(f"unknown keys in csv curve config: {sorted(cfg)}")
        return build_arc_curve(CurveSpec.sampled(read_points_csv(path), closed), n)
    return build_arc_curve(CurveSpec.preset(kind, **cfg), n)


def cell_from_mapping(cfg: Mapping) -> PeriodicCell:
    """``{kind = "cosine", period = 6.283, n = 256, mean = 1, amplitude = 1}``."""
    cfg = dict(cfg)
    kind = cfg.pop("kind", None)
    if kind is None:
        raise ValueError("cell config needs a 'kind'")
    period = float(cfg.pop("period", 2.0 * math.pi))
    n = int(cfg.pop("n", 256))
    return PeriodicCell.preset(kind, period, n, **cfg)


def read_points_csv(path) -> np.ndarray:
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.dtype.names is None or not {"x", "y"} <= set(data.dtype.names):
        raise ValueError(f"{path}: expected a CSV header with columns x,y")
    return np.column_stack([np.atleast_1d(data["x"]), np.atleast_1d(data["y"])])
