"""Largest singular values of dense and sparse complex matrices."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigsh

log = logging.getLogger(__name__)

DENSE_LIMIT = 400


@dataclass
class PowerResult:
    value: float
    iterations: int
    converged: bool
    vector: np.ndarray


def power_iteration(m, tol: float = 1e-10, max_iter: int = 200_000, seed: int = 0,
                    v0: np.ndarray | None = None) -> PowerResult:
    """Power iteration on A^H A.

    Stops once the residual ||A^H A v - lam v|| drops below tol * lam; the
    eigenvalue error is then of order residual^2 / gap.
    """
    n = m.shape[1]
    if n == 0:
        return PowerResult(0.0, 0, True, np.zeros(0))
    if v0 is None:
        rng = np.random.default_rng(seed)
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
    else:
        v = np.asarray(v0, dtype=complex)
    v /= np.linalg.norm(v)
    mh = m.conj().T
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = m @ v
        u = mh @ w
        lam = float(np.vdot(w, w).real)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return PowerResult(0.0, it, True, v)
        if np.linalg.norm(u - lam * v) <= tol * max(lam, 1e-300):
            return PowerResult(float(np.sqrt(lam)), it, True, u / nu)
        v = u / nu
    return PowerResult(float(np.sqrt(lam)), max_iter, False, v)


def lanczos_norm(m, v0: np.ndarray | None = None, tol: float = 1e-12, max_iter: int = 600,
                 check_every: int = 8, seed: int = 0) -> tuple[float, np.ndarray]:
    """Largest singular value from the top Ritz value of A^H A.

    Lanczos with full reorthogonalization.  Ritz values never exceed the
    true eigenvalue and grow with the Krylov dimension, so the result is a
    lower bound; iteration stops when the top Ritz value gains less than
    ``tol`` (relative) between checks.  With a starting vector the result is
    at least its Rayleigh quotient.
    """
    n = m.shape[1]
    mh = m.conj().T
    if sp.issparse(mh):
        mh = mh.tocsr()
    if v0 is None:
        rng = np.random.default_rng(seed)
        v0 = rng.normal(size=n) + 1j * rng.normal(size=n)
    q = np.asarray(v0, dtype=complex)
    q = q / np.linalg.norm(q)
    kmax = min(max_iter, n)
    Q = np.zeros((kmax + 1, n), dtype=complex)
    Q[0] = q
    alpha, beta = [], []
    theta_old = -np.inf
    theta, y = 0.0, np.ones(1)
    for k in range(kmax):
        w = mh @ (m @ Q[k])
        a = float(np.vdot(Q[k], w).real)
        w -= a * Q[k]
        if k:
            w -= beta[-1] * Q[k - 1]
        # full reorthogonalization, twice for stability
        for _ in range(2):
            w -= Q[: k + 1].T @ (Q[: k + 1].conj() @ w)
        alpha.append(a)
        b = float(np.linalg.norm(w))
        done = b <= 1e-14 * max(abs(a), 1e-300) or k + 1 == kmax
        if done or (k + 1) % check_every == 0:
            T = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
            evals, evecs = np.linalg.eigh(T)
            theta, y = evals[-1], evecs[:, -1]
            if done or theta - theta_old <= tol * abs(theta):
                break
            theta_old = theta
        beta.append(b)
        Q[k + 1] = w / b
    kk = len(alpha)
    vec = Q[:kk].T @ y
    return float(np.sqrt(max(theta, 0.0))), vec / np.linalg.norm(vec)


def _dense(m) -> np.ndarray:
    return m.toarray() if sp.issparse(m) else np.asarray(m)


def _partial_permutation_norm(m: sp.csr_matrix) -> tuple[float, np.ndarray] | None:
    """Exact norm when each row and column holds at most one nonzero, else None."""
    if m.nnz == 0:
        return 0.0, np.zeros(m.shape[1], dtype=complex)
    if np.diff(m.indptr).max() > 1 or np.bincount(m.indices, minlength=m.shape[1]).max() > 1:
        return None
    k = int(np.argmax(np.abs(m.data)))
    vec = np.zeros(m.shape[1], dtype=complex)
    vec[m.indices[k]] = 1.0
    return float(abs(m.data[k])), vec


def sparse_norm(m, tol: float = 0.0, v0: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Largest singular value via ARPACK on A^H A (Lanczos)."""
    m = sp.csr_matrix(m)
    m.eliminate_zeros()
    exact = _partial_permutation_norm(m)
    if exact is not None:
        return exact
    mh = m.conj().T.tocsr()
    n = m.shape[1]
    op = LinearOperator((n, n), matvec=lambda x: mh @ (m @ x), dtype=complex)
    if v0 is None:
        # ARPACK's own start vector depends on process state; fix it for reproducible reports
        rng = np.random.default_rng(0)
        v0 = rng.normal(size=n) + 1j * rng.normal(size=n)
    try:
        vals, vecs = eigsh(op, k=1, which="LA", tol=tol, v0=v0, ncv=min(n, 32), maxiter=50 * n)
    except (ArpackError, ArpackNoConvergence) as exc:
        # degenerate spectra (e.g. a weighted permutation) can stall ARPACK
        log.info("ARPACK failed (%s); using power iteration", exc)
        res = power_iteration(m, tol=1e-12, v0=v0)
        return res.value, res.vector
    return float(np.sqrt(max(vals[0], 0.0))), vecs[:, 0]


def op_norm(m, method: str = "auto", tol: float = 1e-10) -> float:
    """Largest singular value of ``m``.

    ``dense_svd`` uses LAPACK, ``power_iteration`` the routine above (falling
    back to dense with a warning if it stalls), ``lanczos`` the Ritz-value
    routine, ``sparse`` ARPACK, and ``auto`` picks dense for small matrices
    and Lanczos otherwise.
    """
    n = max(m.shape) if m.ndim == 2 else 0
    if n == 0:
        return 0.0
    if method == "auto":
        method = "dense_svd" if n <= DENSE_LIMIT else "lanczos"
    if method == "dense_svd":
        d = _dense(m)
        return float(np.linalg.norm(d, 2)) if d.size else 0.0
    if method == "power_iteration":
        res = power_iteration(m, tol=tol)
        if not res.converged:
            log.warning("power iteration did not converge; using dense SVD")
            return op_norm(m, "dense_svd")
        return res.value
    if method == "lanczos":
        return lanczos_norm(m)[0]
    if method == "sparse":
        if m.nnz == 0 if sp.issparse(m) else not np.any(m):
            return 0.0
        return sparse_norm(m)[0]
    raise ValueError(f"unknown method {method!r}")
