import numpy as np
import pytest

from ldfm.linalg import (
    ConvergenceError,
    NotPositiveDefiniteError,
    NotSquareError,
    NotSymmetricError,
    SingularPencilError,
    SingularSystemError,
    TooLargeError,
    solve_spd,
    solve_sylvester_kron,
    solve_sylvester_sympsd,
    sym_eigen,
)


def random_psd(rng, n, rank=None):
    rank = rank or n
    a = rng.normal(size=(n, rank))
    return a @ a.T


class TestSymEigen:
    def test_identity(self):
        decomp = sym_eigen(np.eye(3))
        assert np.allclose(decomp.eigenvalues, [1.0, 1.0, 1.0])
        assert np.allclose(decomp.eigenvectors.T @ decomp.eigenvectors, np.eye(3), atol=1e-10)

    def test_diagonal(self):
        decomp = sym_eigen(np.diag([2.0, 5.0]))
        assert np.allclose(decomp.eigenvalues, [2.0, 5.0])
        # axis vectors up to sign
        assert np.allclose(np.abs(decomp.eigenvectors), np.eye(2), atol=1e-12)

    def test_random_symmetric_reconstruction(self):
        rng = np.random.default_rng(7)
        m = rng.normal(size=(6, 6))
        m = m + m.T
        decomp = sym_eigen(m)
        recon = decomp.eigenvectors @ np.diag(decomp.eigenvalues) @ decomp.eigenvectors.T
        assert np.linalg.norm(recon - m) <= 1e-8 * np.linalg.norm(m)
        assert np.max(np.abs(decomp.eigenvectors.T @ decomp.eigenvectors - np.eye(6))) <= 1e-10
        assert np.all(np.diff(decomp.eigenvalues) >= 0)

    def test_not_square(self):
        with pytest.raises(NotSquareError):
            sym_eigen(np.zeros((2, 3)))

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetricError):
            sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_symmetrizes_input_within_tol(self):
        m = np.array([[1.0, 2.0], [2.0 + 1e-12, 1.0]])
        decomp = sym_eigen(m)
        assert np.allclose(sorted(decomp.eigenvalues), [-1.0, 3.0])


class TestSylvesterSympsd:
    def test_identity_pair_halves_rhs(self):
        r = np.array([[1.0, 2.0], [3.0, 4.0]])
        w = solve_sylvester_sympsd(np.eye(2), np.eye(2), r)
        assert np.allclose(w, r / 2.0)

    def test_diagonal_elementwise(self):
        w = solve_sylvester_sympsd(
            np.diag([1.0, 2.0]), np.diag([3.0]), np.array([[4.0], [10.0]])
        )
        assert np.allclose(w, [[1.0], [2.0]])

    def test_matches_kron_oracle(self):
        rng = np.random.default_rng(11)
        p = random_psd(rng, 4)
        q = random_psd(rng, 5)
        r = rng.normal(size=(4, 5))
        w_fast = solve_sylvester_sympsd(p, q, r)
        w_oracle = solve_sylvester_kron(p, q, r)
        assert np.linalg.norm(w_fast - w_oracle) <= 1e-8 * np.linalg.norm(w_oracle)

    def test_residual_bound(self):
        rng = np.random.default_rng(3)
        p = random_psd(rng, 6)
        q = random_psd(rng, 9)
        r = rng.normal(size=(6, 9))
        w = solve_sylvester_sympsd(p, q, r)
        residual = np.linalg.norm(p @ w + w @ q - r)
        assert residual <= 1e-8 * (np.linalg.norm(r) + 1.0)

    def test_zero_operators_raise(self):
        with pytest.raises(SingularPencilError):
            solve_sylvester_sympsd(np.zeros((2, 2)), np.zeros((3, 3)), np.zeros((2, 3)))

    def test_psd_clipping_of_roundoff_negatives(self):
        # eigenvalue -1e-14 sits inside [-eps, 0] and must be treated as 0
        p = np.diag([1.0, -1e-14])
        q = np.diag([2.0, 3.0])
        w = solve_sylvester_sympsd(p, q, np.ones((2, 2)))
        assert np.all(np.isfinite(w))

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetricError):
            solve_sylvester_sympsd(np.array([[1.0, 1.0], [0.0, 1.0]]), np.eye(2), np.eye(2))

    def test_determinism(self):
        rng = np.random.default_rng(5)
        p = random_psd(rng, 3)
        q = random_psd(rng, 4)
        r = rng.normal(size=(3, 4))
        first = solve_sylvester_sympsd(p, q, r)
        second = solve_sylvester_sympsd(p, q, r)
        assert np.array_equal(first, second)


class TestSylvesterKron:
    def test_identity_pair(self):
        r = np.array([[2.0, 4.0], [6.0, 8.0]])
        w = solve_sylvester_kron(np.eye(2), np.eye(2), r)
        assert np.allclose(w, [[1.0, 2.0], [3.0, 4.0]])

    def test_agrees_with_sympsd_on_psd_inputs(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            k = int(rng.integers(1, 7))
            d = int(rng.integers(1, 13))
            p = random_psd(rng, k)
            q = random_psd(rng, d)
            r = rng.normal(size=(k, d))
            w_kron = solve_sylvester_kron(p, q, r)
            w_fast = solve_sylvester_sympsd(p, q, r)
            assert np.linalg.norm(w_fast - w_kron) <= 1e-7 * max(np.linalg.norm(w_kron), 1e-30)

    def test_nonsymmetric_inputs_still_solved(self):
        # the oracle is a generic dense solve; symmetry is not required
        p = np.array([[1.0, 0.5], [0.0, 2.0]])
        q = np.array([[3.0]])
        r = np.array([[1.0], [2.0]])
        w = solve_sylvester_kron(p, q, r)
        assert np.allclose(p @ w + w @ q, r)

    def test_zero_operator_singular(self):
        with pytest.raises(SingularSystemError):
            solve_sylvester_kron(np.zeros((2, 2)), np.zeros((2, 2)), np.ones((2, 2)))

    def test_too_large_guard(self):
        with pytest.raises(TooLargeError):
            solve_sylvester_kron(np.eye(10), np.eye(11), np.ones((10, 11)), max_dim=10)


class TestSolveSpd:
    def test_identity(self):
        b = np.arange(6.0).reshape(2, 3)
        assert np.allclose(solve_spd(np.eye(2), b), b)

    def test_diagonal(self):
        x = solve_spd(np.diag([2.0, 4.0]), np.array([[2.0], [8.0]]))
        assert np.allclose(x, [[1.0], [2.0]])

    def test_random_spd_residual(self):
        rng = np.random.default_rng(17)
        a = random_psd(rng, 8) + 0.5 * np.eye(8)
        b = rng.normal(size=(8, 4))
        x = solve_spd(a, b)
        assert np.linalg.norm(a @ x - b) <= 1e-10 * (np.linalg.norm(b) + 1.0)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefiniteError):
            solve_spd(np.diag([1.0, -1.0]), np.ones((2, 1)))


def test_solver_equivalence_property():
    """Eigendecomposition and Kronecker solvers agree on random PSD pencils."""
    rng = np.random.default_rng(2024)
    for _ in range(40):
        k = int(rng.integers(1, 7))
        d = int(rng.integers(1, 13))
        p = random_psd(rng, k)
        q = random_psd(rng, d) + 1e-3 * np.eye(d)
        r = rng.normal(size=(k, d))
        w_fast = solve_sylvester_sympsd(p, q, r)
        w_kron = solve_sylvester_kron(p, q, r)
        assert np.linalg.norm(w_fast - w_kron) <= 1e-7 * max(np.linalg.norm(w_kron), 1e-30)
        residual = np.linalg.norm(p @ w_fast + w_fast @ q - r)
        assert residual <= 1e-8 * (np.linalg.norm(r) + 1.0)


def test_rejects_nonfinite_input():
    bad = np.array([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        sym_eigen(bad)
