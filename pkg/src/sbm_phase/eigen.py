"""Leading eigenpair of B on the complement of the all-ones vector.

Two matrix-free solvers share one contract:

* ``lanczos`` (default): thick-restart Lanczos with full
  re-orthogonalization. Every basis vector is kept orthogonal to 1_n, so
  the Krylov space never leaves 1_n-perp and the top Ritz value converges
  to the largest eigenvalue of B there, even when it is negative.
* ``power``: power iteration on (B + s I) restricted to 1_n-perp. With
  s >= the spectral radius of B the shifted operator is positive
  semidefinite on that subspace, so its dominant eigenvector is B's
  algebraically largest one. Slow when the top gap is small.

Convergence needs both |lambda_k - lambda_{k-1}| and ||B y - lambda y||
below ``tol * max(1, |lambda|)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .modularity import DENSE_CAP, ModularityOperator

_METHODS = ("lanczos", "power")


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_iter: int = 20000
    shift: float | None = None  # power method only; None means 2n
    seed: int = 0
    method: str = "lanczos"
    krylov_dim: int = 40

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}")
        if self.krylov_dim < 2:
            raise ValueError("krylov_dim must be >= 2")


@dataclass(frozen=True)
class EigenResult:
    lambda_max: float
    y: np.ndarray
    iterations: int
    residual: float
    converged: bool


def _deflate(x: np.ndarray) -> np.ndarray:
    return x - x.mean()


def _start_vector(n: int, seed: int) -> np.ndarray:
    attempt = 0
    while True:
        rng = np.random.default_rng([seed, attempt])
        x = _deflate(rng.uniform(-1.0, 1.0, n))
        nrm = np.linalg.norm(x)
        if nrm >= 1e-12:
            return x / nrm
        attempt += 1


def fix_sign(y: np.ndarray) -> np.ndarray:
    """Flip ``y`` so its first entry with |y_i| > 1e-12 is positive."""
    nz = np.flatnonzero(np.abs(y) > 1e-12)
    if nz.size and y[nz[0]] < 0:
        return -y
    return y


def _finish(matvec, y, iterations, tol, converged) -> EigenResult:
    y = _deflate(y)
    y = fix_sign(y / np.linalg.norm(y))
    By = matvec(y)
    lam = float(y @ By)
    residual = float(np.linalg.norm(By - lam * y))
    converged = converged and residual <= tol * max(1.0, abs(lam))
    return EigenResult(lam, y, iterations, residual, converged)


def _power(matvec: Callable, n: int, cfg: SolverConfig) -> EigenResult:
    s = 2.0 * n if cfg.shift is None else float(cfg.shift)
    x = _start_vector(n, cfg.seed)
    lam_prev = None
    for it in range(1, cfg.max_iter + 1):
        Bx = matvec(x)
        lam = float(x @ Bx)
        scale = max(1.0, abs(lam))
        res = np.linalg.norm(Bx - lam * x)
        if lam_prev is not None and abs(lam - lam_prev) < cfg.tol * scale and res < cfg.tol * scale:
            return _finish(matvec, x, it, cfg.tol, True)
        lam_prev = lam
        x = _deflate(Bx + s * x)
        nrm = np.linalg.norm(x)
        if nrm == 0.0:
            # only possible when B + sI is singular on the start direction
            x = _start_vector(n, cfg.seed + it)
        else:
            x /= nrm
    return _finish(matvec, x, cfg.max_iter, cfg.tol, False)


def _lanczos(matvec: Callable, n: int, cfg: SolverConfig) -> EigenResult:
    m = min(cfg.krylov_dim, n - 1)
    keep = max(1, m // 2)
    V = np.zeros((m + 1, n))
    T = np.zeros((m, m))
    V[0] = _start_vector(n, cfg.seed)
    k = 0
    matvecs = 0
    theta_prev = None
    best = V[0].copy()
    while True:
        for j in range(k, m):
            w = matvec(V[j])
            matvecs += 1
            # two Gram-Schmidt passes against 1_n and the basis
            w = _deflate(w)
            h = V[: j + 1] @ w
            w -= h @ V[: j + 1]
            h2 = V[: j + 1] @ w
            w -= h2 @ V[: j + 1]
            w = _deflate(w)
            h += h2
            T[: j + 1, j] = h
            T[j, : j + 1] = h
            beta = float(np.linalg.norm(w))

            size = j + 1
            theta, S = np.linalg.eigh(T[:size, :size])
            top = float(theta[-1])
            best = S[:, -1] @ V[:size]
            scale = max(1.0, abs(top))
            ritz_res = abs(beta * S[-1, -1])
            # an invariant subspace makes the Ritz pairs exact
            breakdown = beta <= 1e-12 * max(1.0, float(np.abs(theta).max()))
            settled = theta_prev is not None and abs(top - theta_prev) < cfg.tol * scale
            theta_prev = top
            if breakdown or (settled and ritz_res < cfg.tol * scale):
                result = _finish(matvec, best, matvecs, cfg.tol, True)
                if result.converged or breakdown:
                    return result
            if matvecs >= cfg.max_iter:
                return _finish(matvec, best, matvecs, cfg.tol, False)
            V[j + 1] = w / beta

        # thick restart: keep the top Ritz vectors plus the residual direction
        ell = min(keep, m - 1)
        V[:ell] = S[:, -ell:].T @ V[:m]
        V[ell] = V[m]
        T[:] = 0.0
        T[np.arange(ell), np.arange(ell)] = theta[-ell:]
        k = ell


def leading_eigenpair(op: ModularityOperator, cfg: SolverConfig | None = None) -> EigenResult:
    """Largest eigenvalue of B over unit vectors orthogonal to 1_n.

    Returns a result with ``converged=False`` (best iterate, its residual)
    when ``max_iter`` operator applications are not enough.
    """
    cfg = cfg or SolverConfig()
    n = op.n
    if n == 2:
        y = np.array([1.0, -1.0]) / np.sqrt(2.0)
        return _finish(op.apply, y, 1, cfg.tol, True)
    if cfg.method == "power":
        return _power(op.apply, n, cfg)
    return _lanczos(op.apply, n, cfg)


def leading_singular_value(C, cfg: SolverConfig | None = None) -> float:
    """sigma_1(C) by power iteration on x -> C^T (C x)."""
    cfg = cfg or SolverConfig()
    C = sp.csr_matrix(C) if not sp.issparse(C) else C.tocsr()
    n1, n2 = C.shape
    if n1 == 0 or n2 == 0:
        raise ValueError("matrix must be non-empty")
    if C.nnz == 0:
        return 0.0
    CT = C.T.tocsr()
    # positive start: the top right singular vector of a 0/1 matrix is nonnegative
    x = np.random.default_rng(cfg.seed).uniform(0.5, 1.0, n2)
    x /= np.linalg.norm(x)
    lam_prev = None
    for _ in range(cfg.max_iter):
        Cx = C @ x
        z = CT @ Cx
        lam = float(x @ z)
        scale = max(1.0, lam)
        res = np.linalg.norm(z - lam * x)
        if lam_prev is not None and abs(lam - lam_prev) < cfg.tol * scale and res < cfg.tol * scale:
            break
        lam_prev = lam
        nrm = np.linalg.norm(z)
        if nrm == 0.0:
            return 0.0
        x = z / nrm
    else:
        raise RuntimeError(f"singular value iteration did not converge in {cfg.max_iter} steps")
    return float(np.linalg.norm(C @ x))


def dense_eigen_oracle(M: np.ndarray, cap: int = DENSE_CAP) -> tuple[np.ndarray, np.ndarray]:
    """All eigenpairs of a dense symmetric matrix (ascending), via LAPACK."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if M.shape[0] > cap:
        raise ValueError(f"n={M.shape[0]} exceeds the dense cap {cap}")
    return np.linalg.eigh(M)


def complement_basis(n: int) -> np.ndarray:
    """Orthonormal basis (n x (n-1)) of the complement of 1_n."""
    Q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, : n - 1]]))
    return Q[:, 1:]


def dense_top_on_complement(M: np.ndarray, cap: int = DENSE_CAP) -> tuple[float, np.ndarray, float]:
    """(largest eigenvalue, eigenvector, gap to the next) of M on 1_n-perp."""
    Q = complement_basis(M.shape[0])
    w, U = dense_eigen_oracle(Q.T @ M @ Q, cap)
    gap = float(w[-1] - w[-2]) if w.size > 1 else np.inf
    return float(w[-1]), Q @ U[:, -1], gap
