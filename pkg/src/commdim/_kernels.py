"""Hot inner loops, compiled with numba when available.

Two implementations of every kernel live here: explicit loops compiled with
``numba.njit`` and a vectorised numpy version.  Set ``COMMDIM_NO_NUMBA=1``
to force the numpy path (also used automatically if numba is missing).
Both paths update their array arguments in place and follow the same
Gauss-Seidel order, so they agree up to floating point summation order.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = [
    "USE_NUMBA",
    "hals_block",
    "simplex_pgd",
    "project_rows_simplex",
    "hals_block_numpy",
    "simplex_pgd_numpy",
    "project_rows_simplex_numpy",
]

# below this the HALS denominator is treated as a dead component
DEGENERATE = 1e-20


def _env_disabled() -> bool:
    return os.environ.get("COMMDIM_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disabled()


# ---------------------------------------------------------------- numpy path


def hals_block_numpy(C, W, H, n_iter, eps):
    r = W.shape[1]
    for _ in range(n_iter):
        CHt = C @ H.T
        HHt = H @ H.T
        for j in range(r):
            hjj = HHt[j, j]
            if hjj > DEGENERATE:
                W[:, j] = np.maximum(W[:, j] + (CHt[:, j] - W @ HHt[:, j]) / hjj, eps)
            else:
                W[:, j] *= (CHt[:, j] + eps) / (W @ HHt[:, j] + eps)
        WtC = W.T @ C
        WtW = W.T @ W
        for j in range(r):
            wjj = WtW[j, j]
            if wjj > DEGENERATE:
                H[j] = np.maximum(H[j] + (WtC[j] - WtW[j] @ H) / wjj, eps)
            else:
                H[j] *= (WtC[j] + eps) / (WtW[j] @ H + eps)


def project_rows_simplex_numpy(Y):
    """Euclidean projection of every row of ``Y`` onto the probability simplex."""
    Y = np.asarray(Y, dtype=float)
    k = Y.shape[1]
    U = -np.sort(-Y, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    ind = np.arange(1, k + 1)
    cond = U - css / ind > 0
    rho = k - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(Y.shape[0]), rho] / (rho + 1)
    return np.maximum(Y - theta[:, None], 0.0)


def simplex_pgd_numpy(T, P, Q, X, n_iter, step):
    """Projected gradient on ``0.5 ||T - P X Q||_F^2`` with rows of ``X`` on the simplex."""
    PtP = P.T @ P
    QQt = Q @ Q.T
    PtTQt = P.T @ T @ Q.T
    for _ in range(n_iter):
        G = PtP @ X @ QQt - PtTQt
        X[:] = project_rows_simplex_numpy(X - step * G)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _hals_block_nb(C, W, H, n_iter, eps):
        n, r = W.shape
        m = H.shape[1]
        for _ in range(n_iter):
            CHt = C @ H.T
            HHt = H @ H.T
            for j in range(r):
                hjj = HHt[j, j]
                for a in range(n):
                    s = 0.0
                    for l in range(r):
                        s += W[a, l] * HHt[l, j]
                    if hjj > DEGENERATE:
                        v = W[a, j] + (CHt[a, j] - s) / hjj
                        W[a, j] = v if v > eps else eps
                    else:
                        W[a, j] *= (CHt[a, j] + eps) / (s + eps)
            WtC = W.T @ C
            WtW = W.T @ W
            for j in range(r):
                wjj = WtW[j, j]
                for b in range(m):
                    s = 0.0
                    for l in range(r):
                        s += WtW[j, l] * H[l, b]
                    if wjj > DEGENERATE:
                        v = H[j, b] + (WtC[j, b] - s) / wjj
                        H[j, b] = v if v > eps else eps
                    else:
                        H[j, b] *= (WtC[j, b] + eps) / (s + eps)

    @numba.njit(cache=True, nogil=True)
    def _project_row_nb(y, out):
        k = y.shape[0]
        u = np.sort(y)[::-1]
        css = 0.0
        theta = 0.0
        for i in range(k):
            css += u[i]
            t = (css - 1.0) / (i + 1)
            if u[i] - t > 0:
                theta = t
        for i in range(k):
            v = y[i] - theta
            out[i] = v if v > 0.0 else 0.0

    @numba.njit(cache=True, nogil=True)
    def _project_rows_nb(Y):
        out = np.empty_like(Y)
        for i in range(Y.shape[0]):
            _project_row_nb(Y[i], out[i])
        return out

    @numba.njit(cache=True, nogil=True)
    def _simplex_pgd_nb(T, P, Q, X, n_iter, step):
        PtP = P.T @ P
        QQt = Q @ Q.T
        PtTQt = P.T @ T @ Q.T
        for _ in range(n_iter):
            G = PtP @ X @ QQt - PtTQt
            Y = X - step * G
            for i in range(X.shape[0]):
                _project_row_nb(Y[i], X[i])


# ---------------------------------------------------------------- dispatch


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def hals_block(C, W, H, n_iter, eps):
    """``n_iter`` HALS sweeps (W columns, then H rows), in place.

    Entries are floored at ``eps``.  A component whose Gram diagonal falls
    below ``DEGENERATE`` gets a multiplicative update instead of the
    closed-form one.
    """
    if USE_NUMBA:
        _hals_block_nb(C, W, H, int(n_iter), float(eps))
    else:
        hals_block_numpy(C, W, H, int(n_iter), float(eps))


def project_rows_simplex(Y):
    if USE_NUMBA:
        return _project_rows_nb(_f64(Y))
    return project_rows_simplex_numpy(Y)


def simplex_pgd(T, P, Q, X, n_iter, step):
    """In-place projected gradient steps for ``min ||T - P X Q||`` over row-stochastic ``X``."""
    if USE_NUMBA:
        _simplex_pgd_nb(_f64(T), _f64(P), _f64(Q), X, int(n_iter), float(step))
    else:
        simplex_pgd_numpy(T, P, Q, X, int(n_iter), float(step))


def warmup() -> None:
    """Trigger JIT compilation (or load it from cache) with tiny inputs."""
    C = np.eye(2)
    W = np.full((2, 2), 0.5)
    H = np.full((2, 2), 0.5)
    hals_block(C, W, H, 1, 1e-16)
    X = project_rows_simplex(W)
    simplex_pgd(C, C, C, X, 1, 0.5)
    X = np.full((2, 2), 0.5)
    simplex_pgd(C, C, C, X, 1, 0.5)
    project_rows_simplex(C)
