"""The boundary operator -d^2/ds^2 - alpha*kappa(s) and its semiclassical predictors.

On a closed curve the operator is discretized with periodic central
differences. On a periodic cell the wrap-around entries carry the Bloch phase
exp(+-i theta); the complex Hermitian matrix is solved as the real symmetric
system [[Re, -Im], [Im, Re]], whose spectrum is that of the complex one with
every eigenvalue doubled.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .geometry import ArcCurve, PeriodicCell
from .linalg import SparseSym, SpectrumResult, dense_eigh, lanczos_lowest


@dataclass(frozen=True)
class EffectiveOperator:
    curve: ArcCurve | PeriodicCell
    alpha: float
    n: int
    matrix: SparseSym


def _length(curve) -> float:
    return curve.period if isinstance(curve, PeriodicCell) else curve.length


def _laplacian(n: int, h: float) -> sp.csr_matrix:
    off = np.full(n, -1.0 / h**2)
    diag = np.full(n, 2.0 / h**2)
    rows = np.concatenate([np.arange(n), np.arange(n), (np.arange(n) + 1) % n])
    cols = np.concatenate([np.arange(n), (np.arange(n) + 1) % n, np.arange(n)])
    return sp.csr_matrix((np.concatenate([diag, off, off]), (rows, cols)), shape=(n, n))


def assemble_effective(curve: ArcCurve | PeriodicCell, alpha: float, n: int | None = None) -> EffectiveOperator:
    """Periodic second-order FD matrix of -d^2/ds^2 - alpha*kappa on n nodes."""
    n = curve.n if n is None else int(n)
    if n < 64:
        raise ValueError(f"effective operator needs n >= 64, got {n}")
    if not curve.closed:
        raise ValueError("effective operator needs a closed curve or a periodic cell")
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    c = curve.at(n)
    h = _length(c) / n
    mat = _laplacian(n, h) - sp.diags(float(alpha) * np.asarray(c.kappa))
    return EffectiveOperator(c, float(alpha), n, SparseSym.from_scipy(mat))


def effective_eigs(op: EffectiveOperator, k: int, tol: float = 1e-9, seed: int = 0) -> SpectrumResult:
    return lanczos_lowest(op.matrix, k, tol=tol, seed=seed)


def ground_shift(curve: ArcCurve | PeriodicCell, alpha: float, n: int | None = None, tol: float = 1e-9) -> float:
    """E_1 + alpha * kappa_max for the effective operator."""
    op = assemble_effective(curve, alpha, n)
    res = effective_eigs(op, 1, tol=tol)
    return float(res.eigenvalues[0] + alpha * np.max(op.curve.kappa))


# --------------------------------------------------------------------------
# semiclassical predictors


@dataclass(frozen=True)
class HarmonicLevels:
    mu: np.ndarray
    levels: np.ndarray

    def distinct(self) -> list[tuple[float, int]]:
        """(level, multiplicity) pairs, merging values equal to 1e-12 relative."""
        out: list[tuple[float, int]] = []
        for v in self.levels:
            if out and abs(v - out[-1][0]) <= 1e-12 * max(1.0, abs(v)):
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((float(v), 1))
        return out


def harmonic_levels(mu, count: int) -> HarmonicLevels:
    """Smallest ``count`` values of sum_k sqrt(mu_k/2)(2 n_k - 1), n_k >= 1, with multiplicity."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if mu.ndim != 1 or mu.size == 0 or not np.all(mu > 0) or not np.all(np.isfinite(mu)):
        raise ValueError("mu must be a non-empty list of positive numbers")
    if not 1 <= count <= 64:
        raise ValueError(f"count must be in [1, 64], got {count}")
    w = np.sqrt(mu / 2.0)

    def value(idx):
        return float(np.dot(w, 2.0 * np.asarray(idx) - 1.0))

    start = (1,) * mu.size
    heap = [(value(start), start)]
    seen = {start}
    levels = []
    while len(levels) < count:
        val, idx = heapq.heappop(heap)
        levels.append(val)
        for d in range(mu.size):
            nxt = idx[:d] + (idx[d] + 1,) + idx[d + 1 :]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (value(nxt), nxt))
    return HarmonicLevels(mu, np.array(levels))


@dataclass(frozen=True)
class DegenerateWellSpec:
    """-d^2/ds^2 + Cp*s^(2p) on [-W, W] with ``n`` interior nodes.

    ``half_width`` and ``n`` default to values derived from the natural length
    Cp^(-1/(2p+2)) and a WKB estimate of the highest requested level.
    """

    p: int
    Cp: float
    half_width: float | None = None
    n: int | None = None

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p}")
        if not (self.Cp > 0 and math.isfinite(self.Cp)):
            raise ValueError(f"Cp must be positive, got {self.Cp}")
        if self.half_width is not None and not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.n is not None and self.n < 16:
            raise ValueError("n must be >= 16")


def _wkb_level(p: int, Cp: float, j: int) -> float:
    # upper-side estimate: the WKB action integral over the unit well is at least 1.5
    return (math.pi * j / 1.5) ** (2 * p / (p + 1)) * Cp ** (1 / (p + 1))


def _well_levels(p, Cp, W, n, count):
    h = 2.0 * W / (n + 1)
    x = -W + h * np.arange(1, n + 1)
    # fourth-order five-point stencil, zero ghosts beyond the Dirichlet ends
    band = np.zeros((3, n))
    band[0] = 30.0 / (12 * h * h) + Cp * x ** (2 * p)
    band[1, :-1] = -16.0 / (12 * h * h)
    band[2, :-2] = 1.0 / (12 * h * h)
    return scipy.linalg.eig_banded(band, lower=True, eigvals_only=True, select="i", select_range=(0, count - 1))


def degenerate_well_levels(spec: DegenerateWellSpec, count: int = 1, max_doublings: int = 3) -> np.ndarray:
    """Lowest ``count`` eigenvalues of -d^2/ds^2 + Cp*s^(2p) on the line.

    The box is doubled at fixed spacing until the levels move by less than
    1e-8; the result on the largest box is returned.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    p, Cp = int(spec.p), float(spec.Cp)
    e_est = _wkb_level(p, Cp, count)
    ell = Cp ** (-1.0 / (2 * p + 2))
    W = spec.half_width if spec.half_width is not None else (50.0 * e_est / Cp) ** (1.0 / (2 * p))
    if spec.n is not None:
        h = 2.0 * W / (spec.n + 1)
    else:
        h = min(0.01 * ell, 0.05 / math.sqrt(e_est))
    n = max(16, int(round(2.0 * W / h)) - 1)
    h = 2.0 * W / (n + 1)
    prev = _well_levels(p, Cp, W, n, count)
    for _ in range(max_doublings):
        W2 = 2.0 * W
        n2 = 2 * n + 1  # same spacing on the doubled box
        cur = _well_levels(p, Cp, W2, n2, count)
        if np.max(np.abs(cur - prev)) < 1e-8:
            return cur
        W, n, prev = W2, n2, cur
    raise ValueError(
        f"box half-width {spec.half_width if spec.half_width else W} too small for p={p}, Cp={Cp}: "
        "levels still move under doubling; pass a larger half_width"
    )


def harmonic_prefactor(kappa2: float) -> float:
    """Ground level sqrt(-kappa''/2) of the harmonic model at a nondegenerate maximum."""
    if kappa2 >= 0:
        raise ValueError("kappa'' must be negative at a nondegenerate maximum")
    return math.sqrt(-kappa2 / 2.0)


# --------------------------------------------------------------------------
# Floquet-Bloch bands


@dataclass(frozen=True)
class BandStructure:
    theta_grid: np.ndarray
    bands: np.ndarray  # (theta, j)
    alpha: float
    edges: np.ndarray  # (j, 2) band ranges from theta in {0, pi}
    grid_edges: np.ndarray  # (j, 2) band ranges over the whole grid
    tol: float
    gaps: tuple[tuple[float, float], ...] = ()

    @property
    def j_max(self) -> int:
        return self.bands.shape[1]

    @property
    def edge_mismatch(self) -> float:
        return float(np.max(np.abs(self.edges - self.grid_edges)))


def bloch_matrix(cell: PeriodicCell, alpha: float, theta: float, n: int | None = None) -> SparseSym:
    """Real symmetric 2n x 2n form of the Bloch-phase FD matrix."""
    c = cell.at(cell.n if n is None else int(n))
    n = c.n
    h = c.period / n
    re = sp.lil_matrix((n, n))
    im = sp.lil_matrix((n, n))
    re.setdiag(2.0 / h**2 - alpha * np.asarray(c.kappa))
    re.setdiag(np.full(n - 1, -1.0 / h**2), 1)
    re.setdiag(np.full(n - 1, -1.0 / h**2), -1)
    # u_n = exp(i theta) u_0
    re[n - 1, 0] += -math.cos(theta) / h**2
    re[0, n - 1] += -math.cos(theta) / h**2
    im[n - 1, 0] += -math.sin(theta) / h**2
    im[0, n - 1] += math.sin(theta) / h**2
    big = sp.bmat([[re, -im], [im, re]], format="csr")
    return SparseSym.from_scipy(big)


def bloch_spectrum(cell: PeriodicCell, alpha: float, theta: float, j_max: int, n: int | None = None) -> np.ndarray:
    mat = bloch_matrix(cell, alpha, theta, n)
    res = dense_eigh(mat)
    w = res.eigenvalues
    pairs = 0.5 * (w[0::2] + w[1::2])
    return pairs[:j_max]


def theta_grid(count: int) -> np.ndarray:
    """``count`` equispaced phases on [0, 2*pi), with pi inserted if missing."""
    if count < 17:
        raise ValueError(f"theta_count must be >= 17, got {count}")
    grid = 2.0 * np.pi * np.arange(count) / count
    if not np.any(np.isclose(grid, np.pi, rtol=0, atol=1e-14)):
        grid = np.sort(np.append(grid, np.pi))
    return grid


def bloch_bands(cell: PeriodicCell, alpha: float, n: int | None = None, theta_count: int = 33, j_max: int = 4) -> BandStructure:
    """Band functions on a theta grid plus gaps between the first ``j_max`` bands."""
    n = cell.n if n is None else int(n)
    if n > 1000:
        raise ValueError("bloch_bands uses the dense solver; keep n <= 1000")
    if j_max < 1 or j_max > n:
        raise ValueError("j_max out of range")
    grid = theta_grid(theta_count)
    bands = np.array([bloch_spectrum(cell, alpha, th, j_max, n) for th in grid])
    i0 = int(np.argmin(np.abs(grid)))
    ipi = int(np.argmin(np.abs(grid - np.pi)))
    at_edges = bands[[i0, ipi]]
    edges = np.column_stack([at_edges.min(axis=0), at_edges.max(axis=0)])
    grid_edges = np.column_stack([bands.min(axis=0), bands.max(axis=0)])
    scale = float(np.max(np.abs(bands))) if bands.size else 1.0
    tol = max(1e-9 * abs(alpha), 1e-9 * scale, 1e-12)
    bs = BandStructure(grid, bands, float(alpha), edges, grid_edges, tol)
    return BandStructure(grid, bands, float(alpha), edges, grid_edges, tol, tuple(detect_gaps(bs)))


def detect_gaps(bands: BandStructure, use_grid: bool = False) -> list[tuple[float, float]]:
    """Open intervals between consecutive unions of band ranges.

    Band ranges come from theta in {0, pi} (Hill band-edge property) unless
    ``use_grid`` asks for the extrema over the full theta grid.
    """
    if bands.j_max < 2:
        raise ValueError("gap detection needs at least two bands")
    ranges = bands.grid_edges if use_grid else bands.edges
    order = np.argsort(ranges[:, 0])
    merged: list[list[float]] = []
    for lo, hi in ranges[order]:
        if merged and lo <= merged[-1][1] + bands.tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([float(lo), float(hi)])
    return [(merged[i][1], merged[i + 1][0]) for i in range(len(merged) - 1)]


def gap_lengths(bands: BandStructure) -> list[float]:
    return [hi - lo for lo, hi in bands.gaps]
