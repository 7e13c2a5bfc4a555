"""Robin Laplacian on the boundary layer {0 < t < delta} in arc-length/normal coordinates.

With phi = 1 - t*kappa(s) the quadratic form is

    int phi^{-1} (du/ds)^2 + phi (du/dt)^2  ds dt  -  alpha int u(s, 0)^2 ds

with mass weight phi ds dt. It is discretized on a tensor grid (periodic in s,
t_0 = 0 < ... < t_nt = delta) as a sum of squared edge differences weighted by
phi at edge midpoints, with trapezoid weights for the lumped mass and for the
s-edges. The far edge t = delta gets either a Dirichlet row elimination or
nothing (natural Neumann). Because both ends come from the same form, the
discrete Dirichlet problem is a restriction of the Neumann one and the
eigenvalues interlace exactly as in the continuum.

The t-grid is exponentially graded towards t = 0 by default: bound states
decay like exp(-alpha*t), and a uniform grid puts most nodes where the
eigenfunction is already negligible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import NumericalError
from .geometry import ArcCurve, PeriodicCell, min_layer_width
from .linalg import SparseSym, SpectrumResult, lanczos_lowest

DEFAULT_GRADING = 2.0 / 3.0


class End(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


def schedule_delta(alpha: float, b: float = 2.0) -> float:
    """Layer width b*log(alpha)/alpha."""
    if alpha <= 1.0:
        raise ValueError(f"the log schedule needs alpha > 1, got {alpha}")
    return b * math.log(alpha) / alpha


@dataclass(frozen=True)
class LayerConfig:
    """Layer problem on ``curve``.

    ``delta`` defaults to ``min(b*log(alpha)/alpha, min_layer_width(curve))``.
    ``grading`` is the decay rate of the t-grid map in absolute units; ``None``
    means ``(2/3)*alpha`` and 0 gives a uniform grid. Keep it fixed when
    comparing several alpha values on one grid. ``tol`` is the Lanczos residual
    tolerance, default ``1e-8*max(1, alpha^2)``.
    """

    curve: ArcCurve | PeriodicCell
    alpha: float
    delta: float | None = None
    b: float = 2.0
    n_s: int | None = None
    n_t: int = 64
    grading: float | None = None
    tol: float | None = None
    seed: int = 0
    clipped: bool = field(default=False, init=False)

    def __post_init__(self):
        a = float(self.alpha)
        if not (math.isfinite(a) and a >= 0):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not self.curve.closed:
            raise ValueError("the layer needs a closed curve or periodic cell")
        if self.b < 2.0:
            raise ValueError(f"schedule coefficient b must be >= 2, got {self.b}")
        if self.n_t < 16:
            raise ValueError(f"n_t must be >= 16, got {self.n_t}")
        n_s = self.curve.n if self.n_s is None else int(self.n_s)
        if n_s < 32:
            raise ValueError(f"n_s must be >= 32, got {n_s}")
        object.__setattr__(self, "n_s", n_s)
        width = min_layer_width(self.curve)
        if self.delta is None:
            d = schedule_delta(a, self.b)
            if d > width:
                d = width
                object.__setattr__(self, "clipped", True)
            object.__setattr__(self, "delta", d)
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be finite and > 0, got {self.delta}")
        kap = np.asarray(self.curve.at(n_s).kappa)
        kmax = max(float(kap.max()), float((0.5 * (kap + np.roll(kap, -1))).max()))
        if 1.0 - self.delta * kmax < 0.5 - 1e-12:
            raise ValueError(
                f"phi = 1 - t*kappa drops below 1/2 (delta={self.delta:.6g}, kappa_max={kmax:.6g}); "
                f"use delta <= {width:.6g}"
            )
        if self.grading is not None and not (self.grading >= 0 and math.isfinite(self.grading)):
            raise ValueError("grading must be finite and >= 0")
        object.__setattr__(self, "alpha", a)

    @property
    def rate(self) -> float:
        return DEFAULT_GRADING * self.alpha if self.grading is None else float(self.grading)

    @property
    def solver_tol(self) -> float:
        return self.tol if self.tol is not None else 1e-8 * max(1.0, self.alpha**2)

    def t_grid(self) -> np.ndarray:
        return layer_t_grid(self.delta, self.n_t, self.rate)


def layer_t_grid(delta: float, n_t: int, rate: float) -> np.ndarray:
    """Nodes t_j = -log(1 - xi_j (1 - exp(-rate*delta))) / rate for uniform xi_j in [0, 1]."""
    xi = np.linspace(0.0, 1.0, n_t + 1)
    if rate * delta < 1e-12:
        t = delta * xi
    else:
        t = -np.log1p(xi * np.expm1(-rate * delta)) / rate
    t[0] = 0.0
    t[-1] = delta
    return t


@dataclass(frozen=True)
class LayerSystem:
    """Assembled stiffness A and lumped mass M; eigenvalues solve A u = E M u."""

    stiffness: SparseSym
    mass: np.ndarray
    s: np.ndarray
    t: np.ndarray
    n_rows_t: int
    end: End

    def folded(self) -> SparseSym:
        """M^{-1/2} A M^{-1/2}, same eigenvalues as the generalized problem."""
        return self.stiffness.congruence(1.0 / np.sqrt(self.mass))

    def node(self, i, j):
        return np.asarray(i) * self.n_rows_t + np.asarray(j)

    def grid_values(self, func) -> np.ndarray:
        """Evaluate func(s, t) on the kept nodes in solver ordering."""
        S, T = np.meshgrid(self.s, self.t[: self.n_rows_t], indexing="ij")
        return np.asarray(func(S, T), dtype=float).ravel()


def assemble_layer(config: LayerConfig, end: End | str) -> LayerSystem:
    end = End(end)
    curve = config.curve.at(config.n_s)
    ns, nt = config.n_s, config.n_t
    period = curve.period if isinstance(curve, PeriodicCell) else curve.length
    hs = period / ns
    t = config.t_grid()
    ht = np.diff(t)
    tm = 0.5 * (t[:-1] + t[1:])
    w = np.zeros(nt + 1)
    w[:-1] += 0.5 * ht
    w[1:] += 0.5 * ht
    kap = np.asarray(curve.kappa)
    kap_mid = 0.5 * (kap + np.roll(kap, -1))
    alpha = config.alpha

    stride = nt + 1
    I, J = np.meshgrid(np.arange(ns), np.arange(nt + 1), indexing="ij")
    # s-edges (i, j) -- (i+1, j): weight w_j / (hs * phi(s_{i+1/2}, t_j))
    cs = w[None, :] / (hs * (1.0 - t[None, :] * kap_mid[:, None]))
    sa = (I * stride + J).ravel()
    sb = (((I + 1) % ns) * stride + J).ravel()
    # t-edges (i, j) -- (i, j+1): weight hs * phi(s_i, t_{j+1/2}) / ht_j
    ct = hs * (1.0 - tm[None, :] * kap[:, None]) / ht[None, :]
    ta = (I[:, :nt] * stride + J[:, :nt]).ravel()
    tb = ta + 1
    robin = np.arange(ns) * stride
    rows = np.concatenate([sa, sb, sa, sb, ta, tb, ta, tb, robin])
    cols = np.concatenate([sa, sb, sb, sa, ta, tb, tb, ta, robin])
    csv, ctv = cs.ravel(), ct.ravel()
    vals = np.concatenate([csv, csv, -csv, -csv, ctv, ctv, -ctv, -ctv, np.full(ns, -alpha * hs)])
    N = ns * stride
    A = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    mass = (hs * w[None, :] * (1.0 - t[None, :] * kap[:, None])).ravel()
    if end is End.DIRICHLET:
        keep = (np.arange(N) % stride) != nt
        A = A[keep][:, keep]
        mass = mass[keep]
        n_rows_t = nt
    else:
        n_rows_t = nt + 1
    return LayerSystem(SparseSym.from_scipy(A), mass, curve.s, t, n_rows_t, end)


def layer_eigs(config: LayerConfig, end: End | str, k: int = 1, return_vectors: bool = False) -> SpectrumResult:
    system = assemble_layer(config, end)
    return lanczos_lowest(
        system.folded(), k, tol=config.solver_tol, seed=config.seed, return_vectors=return_vectors
    )


@dataclass(frozen=True)
class BracketResult:
    """Neumann-end (lower) and Dirichlet-end (upper) eigenvalues on one grid."""

    lower: np.ndarray
    upper: np.ndarray
    alpha: float
    delta: float
    converged: np.ndarray
    residual: np.ndarray
    truncated: bool
    n_s: int
    n_t: int

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def halfwidth(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower) + self.residual

    def contains(self, value: float, j: int = 0, slack: float = 0.0) -> bool:
        return bool(self.lower[j] - slack <= value <= self.upper[j] + slack)


def bracket_eigenvalues(config: LayerConfig, k: int = 1) -> BracketResult:
    """E_j with natural and with Dirichlet conditions at t = delta, same grid.

    Only indices with a negative Dirichlet value are returned; ``truncated``
    reports whether any were dropped.
    """
    if not 1 <= k <= 10:
        raise ValueError(f"k must be in [1, 10], got {k}")
    lo = layer_eigs(config, End.NEUMANN, k)
    hi = layer_eigs(config, End.DIRICHLET, k)
    lower, upper = lo.eigenvalues, hi.eigenvalues
    residual = np.maximum(lo.residuals, hi.residuals)
    converged = lo.converged & hi.converged
    slack = 1e-9 * np.abs(upper) + residual
    bad = converged & (lower > upper + slack)
    if np.any(bad):
        raise NumericalError(f"bracket inverted at indices {np.nonzero(bad)[0].tolist()}: {lower} > {upper}")
    negative = upper < 0
    count = int(np.argmin(negative)) if not negative.all() else k
    return BracketResult(
        lower[:count].copy(),
        upper[:count].copy(),
        config.alpha,
        float(config.delta),
        converged[:count].copy(),
        residual[:count].copy(),
        count < k,
        config.n_s,
        config.n_t,
    )


def robin_eig_estimate(config: LayerConfig, k: int = 1) -> np.ndarray:
    """Rows of (bracket midpoint, halfwidth) for the first k eigenvalues."""
    br = bracket_eigenvalues(config, k)
    return np.column_stack([br.midpoint, br.halfwidth])
