import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from robinlayer.linalg import (
    SparseSym,
    apply,
    dense_eigh,
    lanczos_lowest,
    read_matrix_market,
    write_matrix_market,
)


def random_sparse_sym(n, density, seed):
    rng = np.random.default_rng(seed)
    m = sp.random(n, n, density=density, random_state=rng, data_rvs=rng.standard_normal)
    m = m + m.T + sp.diags(rng.standard_normal(n))
    return SparseSym.from_scipy(m)


def laplacian_1d(n):
    h = 1.0 / (n + 1)
    main = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    return SparseSym.from_scipy(sp.diags([off, main, off], [-1, 0, 1])), h


def test_dense_small_examples():
    assert np.allclose(dense_eigh(np.diag([3.0, 1.0, 2.0])).eigenvalues, [1, 2, 3])
    assert np.allclose(dense_eigh(np.array([[0.0, 1.0], [1.0, 0.0]])).eigenvalues, [-1, 1])


def test_dense_trace_and_residuals():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((50, 50))
    a = a + a.T
    res = dense_eigh(a)
    assert abs(res.eigenvalues.sum() - np.trace(a)) < 1e-10
    assert res.all_converged
    assert np.all(np.diff(res.eigenvalues) >= 0)


def test_dense_rejects_bad_input():
    with pytest.raises(ValueError):
        dense_eigh(np.array([[1.0, np.nan], [np.nan, 1.0]]))
    with pytest.raises(ValueError):
        dense_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        dense_eigh(np.ones((2, 3)))


def test_lanczos_laplacian_matches_closed_form():
    A, h = laplacian_1d(400)
    res = lanczos_lowest(A, 3)
    j = np.arange(1, 4)
    exact_fd = 2 * (1 - np.cos(j * np.pi * h)) / h**2
    assert res.all_converged
    assert np.allclose(res.eigenvalues, exact_fd, rtol=0, atol=1e-9 * exact_fd.max())
    assert np.allclose(res.eigenvalues, (j * np.pi) ** 2, rtol=5e-3)


def test_lanczos_diagonal():
    A = SparseSym.from_scipy(sp.diags(np.arange(1.0, 1001.0)))
    res = lanczos_lowest(A, 5)
    assert np.allclose(res.eigenvalues, [1, 2, 3, 4, 5], atol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_lanczos_random_vs_dense(seed):
    A = random_sparse_sym(200, 0.05, seed)
    ref = dense_eigh(A).eigenvalues[:5]
    res = lanczos_lowest(A, 5, seed=seed)
    assert res.all_converged
    assert np.allclose(res.eigenvalues, ref, atol=1e-8)


def test_lanczos_repeated_eigenvalues():
    d = np.repeat(np.arange(1.0, 101.0), 2)
    res = lanczos_lowest(SparseSym.from_scipy(sp.diags(d)), 6)
    assert np.allclose(res.eigenvalues, [1, 1, 2, 2, 3, 3], atol=1e-9)


def test_lanczos_residual_contract():
    A = random_sparse_sym(300, 0.02, 11)
    res = lanczos_lowest(A, 4, tol=1e-10, return_vectors=True)
    V = res.vectors
    true_res = np.linalg.norm(A.to_scipy() @ V - V * res.eigenvalues, axis=0)
    assert np.all(true_res <= res.tol)
    assert np.allclose(V.T @ V, np.eye(4), atol=1e-10)


def test_lanczos_deterministic():
    A = random_sparse_sym(200, 0.05, 1)
    a = lanczos_lowest(A, 3, seed=7).eigenvalues
    b = lanczos_lowest(A, 3, seed=7).eigenvalues
    assert np.array_equal(a, b)


def test_lanczos_partial_result_on_budget():
    A, _ = laplacian_1d(2000)
    res = lanczos_lowest(A, 3, tol=1e-12, max_iter=20)
    assert not res.all_converged
    assert res.eigenvalues.size == 3


def test_lanczos_preconditions():
    A = random_sparse_sym(40, 0.2, 0)
    with pytest.raises(ValueError):
        lanczos_lowest(A, 21)
    with pytest.raises(ValueError):
        lanczos_lowest(A, 11)
    with pytest.raises(ValueError):
        lanczos_lowest(A, 0)


def test_apply_examples():
    n = 30
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    assert np.array_equal(apply(SparseSym.from_scipy(sp.identity(n)), v), v)
    assert np.array_equal(apply(SparseSym.from_scipy(sp.csr_matrix((n, n))), v), np.zeros(n))
    A = random_sparse_sym(n, 0.2, 2)
    e = np.zeros(n)
    e[4] = 1.0
    assert np.array_equal(apply(A, e), A.to_dense()[:, 4])
    with pytest.raises(ValueError):
        apply(A, np.ones(n + 1))


def test_asymmetric_input_rejected():
    m = sp.csr_matrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        SparseSym.from_scipy(m)


def test_congruence_matches_generalized_problem():
    A = random_sparse_sym(60, 0.1, 5)
    mass = np.linspace(0.5, 2.0, 60)
    folded = A.congruence(1 / np.sqrt(mass))
    import scipy.linalg

    ref = scipy.linalg.eigh(A.to_dense(), np.diag(mass), eigvals_only=True)
    assert np.allclose(dense_eigh(folded).eigenvalues, ref, atol=1e-10)


def test_matrix_market_round_trip(tmp_path):
    A = random_sparse_sym(50, 0.1, 4)
    path = tmp_path / "a.mtx"
    write_matrix_market(A, path)
    B = read_matrix_market(path)
    assert np.allclose(A.to_dense(), B.to_dense(), atol=1e-15)


@given(n=st.integers(40, 120), density=st.floats(0.02, 0.2), seed=st.integers(0, 10**6), k=st.integers(1, 5))
def test_lanczos_agrees_with_dense_property(n, density, seed, k):
    A = random_sparse_sym(n, density, seed)
    ref = dense_eigh(A).eigenvalues[:k]
    res = lanczos_lowest(A, k, seed=seed)
    assert res.all_converged
    tol = np.maximum(1e-8, 1e-10 * np.abs(ref))
    assert np.all(np.abs(res.eigenvalues - ref) <= tol)
    assert np.all(np.diff(res.eigenvalues) >= 0)
