"""Nonnegative factorizations: heuristic search, checking and normalisation.

The search is multi-start HALS followed by a Gauss-Newton polish on the
support found by HALS.  HALS alone converges only sublinearly towards exact
factorizations that contain zeros, which is the typical shape of a
nonnegative-rank certificate; once the zero pattern is fixed the remaining
system ``WH = C`` is smooth and Gauss-Newton converges in a few steps.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import InvalidParams, NotStochasticProduct, ShapeMismatch
from .matcore import DEFAULT_TOL, Tolerances

__all__ = [
    "NMFConfig",
    "NonnegFactorization",
    "StochasticFactorization",
    "FactorizationCheck",
    "nmf",
    "nmf_rank_search",
    "stochastic_normalize",
    "a7_explicit",
    "verify_factorization",
]

log = logging.getLogger(__name__)

_CHECK_EVERY = 100
_STAGNATION = 1e-12
_POLISH_THRESHOLDS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


@dataclass(frozen=True)
class NMFConfig:
    max_iter: int = 5000
    restarts: int = 32
    seed: int = 42
    target_residual: float = 1e-6
    workers: int = 1
    eps: float = 1e-16
    polish: bool = True
    # skip the polish when HALS ends further than this from C (max-entry)
    polish_below: float = 5e-2
    polish_iter: int = 60
    # largest n*m for which the dense Gauss-Newton system is formed
    polish_max_size: int = 4096

    def __post_init__(self):
        if self.max_iter < 1 or self.restarts < 1 or self.workers < 1:
            raise InvalidParams("max_iter, restarts and workers must be >= 1")
        if not self.target_residual > 0:
            raise InvalidParams("target_residual must be > 0")


@dataclass(frozen=True, eq=False)
class NonnegFactorization:
    W: np.ndarray
    H: np.ndarray
    residual: float
    inner_dim: int
    seed: int
    iterations: int
    restarts_used: int
    target_residual: float = 1e-6
    best_restart: int = 0

    @property
    def success(self) -> bool:
        return self.residual <= self.target_residual

    def recompute_residual(self, C) -> float:
        return float(np.max(np.abs(np.asarray(C, dtype=float) - self.W @ self.H)))


@dataclass(frozen=True, eq=False)
class StochasticFactorization:
    L: np.ndarray
    R: np.ndarray

    @property
    def inner_dim(self) -> int:
        return self.L.shape[1]

    def product(self) -> np.ndarray:
        return self.L @ self.R


@dataclass
class FactorizationCheck:
    residual: float
    residual_tol: float
    negative_W: list[tuple[int, int]] = field(default_factory=list)
    negative_H: list[tuple[int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.negative_W and not self.negative_H and self.residual <= self.residual_tol

    @property
    def violations(self) -> list[str]:
        out = [f"W[{a + 1},{b + 1}] < 0" for a, b in self.negative_W]
        out += [f"H[{a + 1},{b + 1}] < 0" for a, b in self.negative_H]
        if self.residual > self.residual_tol:
            out.append(f"residual {self.residual:.3e} > {self.residual_tol:.1e}")
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "residual": self.residual,
            "residual_tol": self.residual_tol,
            "violations": self.violations,
        }


# ------------------------------------------------------------------ search


def _max_err(C, W, H) -> float:
    return float(np.max(np.abs(C - W @ H)))


def _restart_rng(seed: int, index: int) -> np.random.Generator:
    # restart t draws from SeedSequence(seed, spawn_key=(t,)), i.e. the t-th spawned child
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _init(C, r, rng):
    n, m = C.shape
    W = (1.0 - rng.random((n, r))) * np.linalg.norm(C, axis=1)[:, None]
    H = 1.0 - rng.random((r, m))
    WH = W @ H
    denom = float(np.sum(WH * WH))
    if denom > 0:
        W *= float(np.sum(C * WH)) / denom
    return np.ascontiguousarray(W), np.ascontiguousarray(H)


def _hals(C, W, H, cfg: NMFConfig) -> int:
    """Run HALS until ``max_iter``, target reached, or stagnation. Returns sweeps done."""
    done = 0
    prev = np.linalg.norm(C - W @ H)
    while done < cfg.max_iter:
        block = min(_CHECK_EVERY, cfg.max_iter - done)
        _kernels.hals_block(C, W, H, block, cfg.eps)
        done += block
        cur = np.linalg.norm(C - W @ H)
        if _max_err(C, W, H) <= cfg.target_residual * 1e-3:
            break
        if prev > 0 and (prev - cur) / prev < _STAGNATION:
            break
        prev = cur
    return done


def _gauss_newton_on_support(C, W, H, threshold, iters):
    n, r = W.shape
    m = H.shape[1]
    # balance so column j of W and row j of H have equal maxima
    s = np.sqrt(np.maximum(H.max(axis=1), 1e-300) / np.maximum(W.max(axis=0), 1e-300))
    W = W * s
    H = H / s[:, None]
    x = np.concatenate([W.ravel(), H.ravel()])
    scale = np.concatenate([np.broadcast_to(W.max(axis=0), (n, r)).ravel(),
                            np.broadcast_to(H.max(axis=1)[:, None], (r, m)).ravel()])
    free = x > threshold * scale
    x[~free] = 0.0
    In, Im = np.eye(n), np.eye(m)
    best_x, best = x.copy(), np.inf
    stall = 0
    for _ in range(iters):
        Wc = x[: n * r].reshape(n, r)
        Hc = x[n * r:].reshape(r, m)
        res = (Wc @ Hc - C).ravel()
        err = float(np.max(np.abs(res)))
        if err < best:
            best, best_x, stall = err, x.copy(), 0
        else:
            stall += 1
            if stall >= 8:
                break
        if err < 1e-15:
            break
        J = np.hstack([np.kron(In, Hc.T), np.kron(Wc, Im)])[:, free]
        step = np.linalg.lstsq(J, -res, rcond=None)[0]
        x[free] += step
        np.maximum(x, 0.0, out=x)
    return best_x[: n * r].reshape(n, r).copy(), best_x[n * r:].reshape(r, m).copy(), best


def _polish(C, W, H, cfg: NMFConfig):
    best = (W, H, _max_err(C, W, H))
    for thr in _POLISH_THRESHOLDS:
        W2, H2, err = _gauss_newton_on_support(C, W, H, thr, cfg.polish_iter)
        if err < best[2]:
            best = (W2, H2, err)
        if best[2] <= cfg.target_residual * 1e-6:
            break
    return best


def _one_restart(C, r, cfg: NMFConfig, index: int):
    rng = _restart_rng(cfg.seed, index)
    W, H = _init(C, r, rng)
    sweeps = _hals(C, W, H, cfg)
    err = _max_err(C, W, H)
    n, m = C.shape
    if cfg.polish and err <= cfg.polish_below and n * m <= cfg.polish_max_size:
        W, H, err = _polish(C, W, H, cfg)
    return W, H, err, sweeps


def nmf(C, r: int, config: NMFConfig = NMFConfig()) -> NonnegFactorization:
    """Search for nonnegative ``W`` (n x r), ``H`` (r x m) with ``WH`` close to ``C``.

    Parameters
    ----------
    C : array_like
        Nonnegative ``n x m`` matrix.
    r : int
        Inner dimension, ``1 <= r <= min(n, m)``.
    config : NMFConfig
        Restart count, iteration budget, seed and the max-entry residual that
        counts as success.

    Returns
    -------
    NonnegFactorization
        The best restart (lowest max-entry residual, ties to the lowest
        restart index).  ``success`` tells whether it met the target.  A
        failure is only evidence that no factorization exists, never proof.

    Notes
    -----
    Restart ``t`` seeds its generator with ``SeedSequence(seed,
    spawn_key=(t,))``, so results do not depend on ``workers`` or on the
    order in which restarts finish.
    """
    C = np.ascontiguousarray(np.asarray(C, dtype=float))
    n, m = C.shape
    if not 1 <= r <= min(n, m):
        raise InvalidParams(f"inner dimension {r} outside [1, {min(n, m)}]")
    indices = range(config.restarts)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda t: _one_restart(C, r, config, t), indices))
    else:
        results = [_one_restart(C, r, config, t) for t in indices]
    best = min(range(len(results)), key=lambda t: (results[t][2], t))
    W, H, err, sweeps = results[best]
    log.debug("nmf r=%d: best restart %d residual %.3e", r, best, err)
    return NonnegFactorization(
        W=W,
        H=H,
        residual=err,
        inner_dim=r,
        seed=config.seed,
        iterations=sweeps,
        restarts_used=len(results),
        target_residual=config.target_residual,
        best_restart=best,
    )


def nmf_rank_search(C, r_lo: int, r_hi: int, config: NMFConfig = NMFConfig()) -> Optional[int]:
    """Smallest ``r`` in ``[r_lo, r_hi]`` for which :func:`nmf` succeeds, else None."""
    if r_lo > r_hi:
        raise InvalidParams(f"empty rank range {r_lo}..{r_hi}")
    r_lo = max(1, r_lo)
    r_hi = min(r_hi, *np.shape(C))
    for r in range(r_lo, r_hi + 1):
        if nmf(C, r, config).success:
            return r
    return None


# ------------------------------------------------------------- utilities


def stochastic_normalize(W, H, tol: Tolerances = DEFAULT_TOL) -> StochasticFactorization:
    """Rescale a nonnegative factorization of a communication matrix into ``L R``.

    Rows of ``H`` with negligible mass are dropped together with the matching
    column of ``W``; the remaining rows of ``H`` are scaled to sum to one and
    the columns of ``W`` absorb the scale.  ``L`` is then row-stochastic
    because ``LR`` is.
    """
    W = np.asarray(W, dtype=float)
    H = np.asarray(H, dtype=float)
    if W.ndim != 2 or H.ndim != 2 or W.shape[1] != H.shape[0]:
        raise ShapeMismatch(f"cannot multiply {W.shape} by {H.shape}")
    WH = W @ H
    sums = WH.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > tol.row_sum_tol) or WH.min() < -tol.nonneg_tol:
        raise NotStochasticProduct("W @ H is not row-stochastic")
    mass = H.sum(axis=1)
    keep = mass >= tol.nonneg_tol
    L = W[:, keep] * mass[keep]
    R = H[keep] / mass[keep][:, None]
    return StochasticFactorization(L=L, R=R)


def a7_explicit() -> tuple[np.ndarray, np.ndarray]:
    """A 7 x 6 times 6 x 7 nonnegative factorization of ``A_7``.

    Cells marked ``None`` below are one minus the rest of their row; every
    such row holds exactly one of them.
    """
    i, j, k = (2.0 / 7.0 * np.sin(t * np.pi / 7.0) ** 2 for t in (1, 2, 3))
    q = 2 * i * k / (k - j)
    w = 2 * (i + j) - q
    c = 2 * (k - i * i / (k - j))
    p = 2 * k * (j - i) / (k - j)
    h1 = (j - 0.5 * (k - i * i / (k - j))) / w
    h2 = (j - i * k / (k - j)) / w
    rest = None
    rows = [
        [2 * k, 2 * j, 0, 0, 2 * i, 0],
        [0, 2 * k, 0, 0, q, w],
        [0, 2 * j, 2 * k, 0, 2 * i, 0],
        [0, 2 * i, p, rest, 0, 0],
        [0, 0, q, c, rest, w],
        [q, 0, 0, c, rest, w],
        [p, 2 * i, 0, rest, 0, 0],
    ]
    W = np.zeros((7, 6))
    for a, row in enumerate(rows):
        known = sum(v for v in row if v is not None)
        W[a] = [1.0 - known if v is None else v for v in row]
    H = np.array(
        [
            [0, i / (2 * k), j / (2 * k), (k - i) / (2 * k), (k - j) / (2 * k), 0, 0],
            [0, 0, 0, 0, 0.5, 0.5, 0],
            [j / (2 * k), i / (2 * k), 0, 0, 0, (k - j) / (2 * k), (k - i) / (2 * k)],
            [0.25, 0.5, 0.25, 0, 0, 0, 0],
            [0, 0, 0, 0.5, 0, 0, 0.5],
            [h1, 0, h1, h2, 0, 0, h2],
        ]
    )
    return W, H


def verify_factorization(C, W, H, tol: Tolerances = DEFAULT_TOL,
                         residual_tol: Optional[float] = None) -> FactorizationCheck:
    """Check ``W, H >= 0`` and ``max |C - WH| <= residual_tol`` (default ``recon_tol``)."""
    C = np.asarray(C, dtype=float)
    W = np.asarray(W, dtype=float)
    H = np.asarray(H, dtype=float)
    if W.ndim != 2 or H.ndim != 2 or W.shape[1] != H.shape[0] or (W.shape[0], H.shape[1]) != C.shape:
        raise ShapeMismatch(f"{W.shape} x {H.shape} does not produce {C.shape}")
    return FactorizationCheck(
        residual=_max_err(C, W, H),
        residual_tol=tol.recon_tol if residual_tol is None else residual_tol,
        negative_W=[tuple(int(v) for v in ix) for ix in np.argwhere(W < 0)],
        negative_H=[tuple(int(v) for v in ix) for ix in np.argwhere(H < 0)],
    )
