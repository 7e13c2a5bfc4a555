"""Symmetric eigenproblems: CSR storage, a dense reference solver and Lanczos.

``lanczos_lowest`` is a thick-restart Lanczos with full (two-pass classical
Gram-Schmidt) reorthogonalization. Converged pairs are locked and a final
restart from a random vector orthogonal to them checks that no copy of a
repeated eigenvalue was missed; a plain Krylov space started from one vector
only ever sees one direction of each eigenspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.linalg
import scipy.sparse as sp

EPS = np.finfo(float).eps


class SparseSym:
    """Symmetric matrix in CSR form with the full (both triangles) pattern."""

    def __init__(self, indptr, indices, data, n: int, *, check: bool = True):
        csr = sp.csr_matrix((np.asarray(data, float), np.asarray(indices), np.asarray(indptr)), shape=(n, n))
        csr.sum_duplicates()
        csr.sort_indices()
        if not np.all(np.isfinite(csr.data)):
            raise ValueError("matrix entries must be finite")
        self._csr = csr
        if check:
            asym = self.asymmetry()
            if asym > 1e-14 * max(self.max_abs(), 1e-300):
                raise ValueError(f"matrix is not symmetric (max |A_ij - A_ji| = {asym:.3e})")

    @classmethod
    def from_scipy(cls, m, *, check: bool = True) -> "SparseSym":
        csr = sp.csr_matrix(m)
        if csr.shape[0] != csr.shape[1]:
            raise ValueError(f"matrix must be square, got {csr.shape}")
        return cls(csr.indptr, csr.indices, csr.data, csr.shape[0], check=check)

    @classmethod
    def from_triplets(cls, rows, cols, vals, n: int, *, check: bool = True) -> "SparseSym":
        return cls.from_scipy(sp.coo_matrix((vals, (rows, cols)), shape=(n, n)), check=check)

    @classmethod
    def from_dense(cls, a) -> "SparseSym":
        return cls.from_scipy(sp.csr_matrix(np.asarray(a, dtype=float)))

    @property
    def n(self) -> int:
        return self._csr.shape[0]

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def indptr(self) -> np.ndarray:
        return self._csr.indptr

    @property
    def indices(self) -> np.ndarray:
        return self._csr.indices

    @property
    def data(self) -> np.ndarray:
        return self._csr.data

    def to_scipy(self) -> sp.csr_matrix:
        return self._csr.copy()

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    def max_abs(self) -> float:
        return float(np.abs(self._csr.data).max(initial=0.0))

    def norm_bound(self) -> float:
        """Max absolute row sum; bounds the spectral radius."""
        return float(np.asarray(abs(self._csr).sum(axis=1)).max(initial=0.0))

    def asymmetry(self) -> float:
        return float(abs(self._csr - self._csr.T).max()) if self.nnz else 0.0

    def congruence(self, d) -> "SparseSym":
        """``D A D`` for a diagonal D given as a vector."""
        d = np.asarray(d, float)
        dm = sp.diags(d)
        return SparseSym.from_scipy(dm @ self._csr @ dm, check=False)

    def __matmul__(self, v):
        return apply(self, v)

    def __repr__(self) -> str:
        return f"SparseSym(n={self.n}, nnz={self.nnz})"


def apply(matrix: SparseSym, vector) -> np.ndarray:
    v = np.asarray(vector)
    if v.shape[0] != matrix.n:
        raise ValueError(f"dimension mismatch: matrix is {matrix.n}x{matrix.n}, vector has {v.shape[0]} rows")
    return matrix._csr @ v


def write_matrix_market(matrix: SparseSym, path) -> None:
    scipy.io.mmwrite(str(path), matrix.to_scipy().tocoo(), symmetry="symmetric")


def read_matrix_market(path) -> SparseSym:
    return SparseSym.from_scipy(scipy.io.mmread(str(path)))


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    iterations: int
    converged: np.ndarray
    tol: float
    vectors: np.ndarray | None = None

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def _as_operator(matrix):
    if isinstance(matrix, SparseSym):
        return matrix._csr, matrix.n, matrix.norm_bound()
    if sp.issparse(matrix):
        csr = sp.csr_matrix(matrix)
        return csr, csr.shape[0], float(np.asarray(abs(csr).sum(axis=1)).max(initial=0.0))
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    return a, a.shape[0], float(np.abs(a).sum(axis=1).max())


def dense_eigh(matrix) -> SpectrumResult:
    """All eigenvalues of a symmetric matrix with n <= 2000 (LAPACK dsyev)."""
    a = matrix.to_dense() if isinstance(matrix, SparseSym) else np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    if n > 2000:
        raise ValueError(f"dense_eigh is limited to n <= 2000, got {n}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    scale = float(np.abs(a).max(initial=0.0))
    if np.abs(a - a.T).max(initial=0.0) > 1e-14 * max(scale, 1e-300):
        raise ValueError("matrix is not symmetric")
    w, v = scipy.linalg.eigh(a, driver="ev")
    res = np.linalg.norm(a @ v - v * w, axis=0)
    tol = 1e-10 * max(float(np.abs(a).sum(axis=1).max(initial=0.0)), 1e-300)
    return SpectrumResult(w, res, n, res <= tol, tol, v)


def alternating_ramp(n: int) -> np.ndarray:
    v = (-1.0) ** np.arange(n) * np.arange(1, n + 1)
    return v / np.linalg.norm(v)


class _Run:
    __slots__ = ("values", "vectors", "iterations", "estimates")

    def __init__(self, values, vectors, iterations, estimates):
        self.values = values
        self.vectors = vectors
        self.iterations = iterations
        self.estimates = estimates


def _project_out(w, X):
    if X is not None and X.shape[0]:
        w -= (X @ w) @ X
    return w


def _thick_restart(op, n, nev, X, v0, tol, budget, basis, norm, rng, check_every=10) -> _Run:
    """Lowest ``nev`` eigenpairs of ``op`` restricted to the complement of rows of X."""
    n_locked = 0 if X is None else X.shape[0]
    avail = n - n_locked
    m = min(basis, avail)
    keep = min(m - 1, max(nev + 16, m // 3))
    V = np.empty((m + 1, n))
    H = np.zeros((m, m))
    v = _project_out(np.array(v0, dtype=float), X)
    v = _project_out(v, X)
    nv = np.linalg.norm(v)
    if nv < 1e-8:
        v = _project_out(rng.standard_normal(n), X)
        nv = np.linalg.norm(v)
    V[0] = v / nv
    start = 0
    it = 0
    breakdown = 1e-13 * max(norm, 1e-300)
    while True:
        theta = S = None
        for j in range(start, m):
            w = op @ V[j]
            it += 1
            w = _project_out(w, X)
            basis_j = V[: j + 1]
            h = basis_j @ w
            w -= h @ basis_j
            w = _project_out(w, X)
            h2 = basis_j @ w
            w -= h2 @ basis_j
            h += h2
            H[: j + 1, j] = h
            H[j, : j + 1] = h
            beta = float(np.linalg.norm(w))
            exhausted = j + 1 == avail
            if not exhausted:
                if beta <= breakdown:
                    # invariant subspace: continue with a fresh orthogonal direction
                    w = _project_out(rng.standard_normal(n), X)
                    for _ in range(2):
                        w -= (basis_j @ w) @ basis_j
                    V[j + 1] = w / np.linalg.norm(w)
                    beta = 0.0
                else:
                    V[j + 1] = w / beta
            last = j == m - 1
            if exhausted or last or it >= budget or (j + 1 >= nev and (j + 1 - start) % check_every == 0):
                theta, S = scipy.linalg.eigh(H[: j + 1, : j + 1])
                est = np.abs(beta * S[j, :nev]) if not exhausted else np.zeros(min(nev, j + 1))
                if exhausted or it >= budget or np.all(est < tol):
                    if j + 1 < nev:
                        raise ValueError("Krylov space smaller than the number of requested eigenpairs")
                    Y = S[:, :nev].T @ V[: j + 1]
                    return _Run(theta[:nev].copy(), Y, it, est)
        # thick restart: keep the lowest Ritz vectors, continue from the residual direction
        Y = S[:, :keep].T @ V[:m]
        V[:keep] = Y
        V[keep] = V[m]
        H[:] = 0.0
        H[np.arange(keep), np.arange(keep)] = theta[:keep]
        start = keep


def lanczos_lowest(
    matrix,
    k: int,
    tol: float = 1e-9,
    max_iter: int = 20000,
    *,
    seed: int = 0,
    basis_size: int = 128,
    verify_multiplicity: bool | None = None,
    return_vectors: bool = False,
) -> SpectrumResult:
    """Lowest ``k`` eigenvalues of a sparse symmetric matrix.

    The tolerance applies to true residual norms ``||A v - lambda v||`` with unit
    ``v``. It is raised to ``100*eps*||A||`` when the request is below what
    double precision can deliver; the value actually used is in ``result.tol``.
    Repeated eigenvalues are checked by an extra run orthogonal to the locked
    pairs when ``k > 1`` (``verify_multiplicity`` overrides this).
    """
    op, n, norm = _as_operator(matrix)
    if k < 1 or k > 20:
        raise ValueError(f"k must be in [1, 20], got {k}")
    if n < 4 * k:
        raise ValueError(f"need n >= 4k, got n={n}, k={k}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    tol_eff = max(float(tol), 100.0 * EPS * norm)
    rng = np.random.default_rng(seed)
    stop = 0.5 * tol_eff

    run = _thick_restart(op, n, k, None, alternating_ramp(n), stop, max_iter, basis_size, norm, rng)
    iterations = run.iterations
    values = list(run.values)
    vectors = list(run.vectors)

    if verify_multiplicity is None:
        verify_multiplicity = k > 1
    if verify_multiplicity and iterations < max_iter and n - k >= 1:
        for _ in range(k):
            X = np.array(vectors)
            probe = _thick_restart(
                op, n, 1, X, rng.standard_normal(n), stop, max_iter - iterations, basis_size, norm, rng
            )
            iterations += probe.iterations
            if probe.estimates[0] >= stop or probe.values[0] >= max(values) - tol_eff:
                break
            drop = int(np.argmax(values))
            values[drop] = probe.values[0]
            vectors[drop] = probe.vectors[0]
            if iterations >= max_iter:
                break

    order = np.argsort(values, kind="stable")
    lam = np.asarray(values)[order]
    vecs = np.asarray(vectors)[order]
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    residuals = np.linalg.norm((op @ vecs.T).T - lam[:, None] * vecs, axis=1)
    converged = residuals <= tol_eff
    return SpectrumResult(lam, residuals, iterations, converged, tol_eff, vecs.T if return_vectors else None)
