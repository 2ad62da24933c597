"""Dense symmetric-matrix primitives and structured Sylvester solvers.

Everything here operates on plain 2-D float64 numpy arrays. The two Sylvester
routines are the workhorses of the alternating optimizer: the eigendecomposition
solver is the production path, the Kronecker solver is a brute-force reference
kept for cross-validation on small instances.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg


class NotSquareError(ValueError):
    pass


class NotSymmetricError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class SingularPencilError(ValueError):
    """Some eigenvalue pair of the Sylvester operator sums to ~0.

    Signals degenerate data (e.g. an all-zero label matrix together with
    rank-deficient features); the equation has no stable unique solution.
    """


class TooLargeError(ValueError):
    pass


class SingularSystemError(ValueError):
    pass


class NotPositiveDefiniteError(ValueError):
    pass


class SymEigen(NamedTuple):
    eigenvalues: np.ndarray   # ascending, shape (n,)
    eigenvectors: np.ndarray  # orthonormal columns, shape (n, n)


def _as_matrix(a, name="matrix"):
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def sym_eigen(m, tol: float = 1e-8) -> SymEigen:
    """Eigendecomposition of a (numerically) symmetric matrix.

    The input is symmetrized as (M + M^T)/2 before decomposition; asymmetry
    beyond ``tol`` relative to the largest entry is rejected.
    """
    m = _as_matrix(m, "m")
    if m.shape[0] != m.shape[1]:
        raise NotSquareError(f"expected square matrix, got shape {m.shape}")
    scale = np.max(np.abs(m)) if m.size else 0.0
    asym = np.max(np.abs(m - m.T)) if m.size else 0.0
    if asym > tol * max(scale, 1e-300):
        raise NotSymmetricError(
            f"asymmetry {asym:.3e} exceeds tol*max|M| = {tol * scale:.3e}"
        )
    sym = 0.5 * (m + m.T)
    try:
        vals, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    return SymEigen(vals, vecs)


def default_pencil_eps(p: np.ndarray, q: np.ndarray) -> float:
    """Scale-relative guard below which an eigenvalue-pair sum counts as zero."""
    k = p.shape[0]
    d = q.shape[0]
    return 1e-10 * (np.trace(p) + np.trace(q)) / (k + d)


def solve_sylvester_sympsd(p, q, r, eps: float | None = None) -> np.ndarray:
    """Solve P W + W Q = R for symmetric PSD P (k x k) and Q (d x d).

    Diagonalizes P = U diag(lam) U^T and Q = V diag(mu) V^T, then
    W = U S V^T with S_ij = (U^T R V)_ij / (lam_i + mu_j). Eigenvalues in
    [-eps, 0] are clipped to 0 (PSD roundoff); any pair with
    lam_i + mu_j <= eps raises SingularPencilError.
    """
    p = _as_matrix(p, "p")
    q = _as_matrix(q, "q")
    r = _as_matrix(r, "r")
    if eps is None:
        eps = default_pencil_eps(p, q)
    lam, u = sym_eigen(p)
    mu, v = sym_eigen(q)
    if r.shape != (p.shape[0], q.shape[0]):
        raise ValueError(
            f"r must be {p.shape[0]}x{q.shape[0]}, got {r.shape[0]}x{r.shape[1]}"
        )
    if lam.size and lam[0] < -eps:
        raise ValueError(f"p is not PSD: min eigenvalue {lam[0]:.3e} < -eps")
    if mu.size and mu[0] < -eps:
        raise ValueError(f"q is not PSD: min eigenvalue {mu[0]:.3e} < -eps")
    lam = np.maximum(lam, 0.0)
    mu = np.maximum(mu, 0.0)
    pair_sums = lam[:, None] + mu[None, :]
    min_pair = np.min(pair_sums) if pair_sums.size else 0.0
    if min_pair <= eps:
        raise SingularPencilError(
            f"eigenvalue pair sum {min_pair:.3e} <= eps={eps:.3e}; "
            "the Sylvester operator is (near-)singular"
        )
    s = (u.T @ r @ v) / pair_sums
    return u @ s @ v.T


def solve_sylvester_kron(p, q, r, max_dim: int = 64) -> np.ndarray:
    """Brute-force Sylvester solve via Kronecker vectorization.

    Solves (I_d (x) P + Q^T (x) I_k) vec(W) = vec(R) with a dense linear
    solve; vec() stacks columns. Intended for small validation instances
    only -- the assembled system is (k*d) x (k*d).
    """
    p = _as_matrix(p, "p")
    q = _as_matrix(q, "q")
    r = _as_matrix(r, "r")
    k = p.shape[0]
    d = q.shape[0]
    if p.shape[0] != p.shape[1] or q.shape[0] != q.shape[1]:
        raise NotSquareError("p and q must be square")
    if r.shape != (k, d):
        raise ValueError(f"r must be {k}x{d}, got {r.shape[0]}x{r.shape[1]}")
    if k * d > max_dim * max_dim:
        raise TooLargeError(f"k*d = {k * d} exceeds max_dim^2 = {max_dim * max_dim}")
    op = np.kron(np.eye(d), p) + np.kron(q.T, np.eye(k))
    try:
        vec_w = np.linalg.solve(op, r.ravel(order="F"))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"vectorized Sylvester system is singular: {exc}") from exc
    w = vec_w.reshape((k, d), order="F")
    residual = np.linalg.norm(p @ w + w @ q - r)
    if residual > 1e-8 * (np.linalg.norm(r) + 1.0):
        raise SingularSystemError(
            f"solution residual {residual:.3e} too large; system is ill-conditioned"
        )
    return w


def solve_spd(a, b) -> np.ndarray:
    """Solve A X = B for symmetric positive definite A via Cholesky.

    One step of iterative refinement keeps the residual at roundoff level
    even for moderately conditioned A.
    """
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[0] != a.shape[1]:
        raise NotSquareError(f"a must be square, got shape {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"b must have {a.shape[0]} rows, got {b.shape[0]}")
    sym = 0.5 * (a + a.T)
    try:
        factor = scipy.linalg.cho_factor(sym, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"Cholesky failed: {exc}") from exc
    x = scipy.linalg.cho_solve(factor, b, check_finite=False)
    x += scipy.linalg.cho_solve(factor, b - sym @ x, check_finite=False)
    return x
