"""Ultraweak majorization ``C = L D R`` with row-stochastic ``L`` and ``R``.

``uw_leq`` is sound but incomplete: it answers YES with a checkable witness
or UNKNOWN.  The only way to get NO is :func:`uw_leq_identity`, where a
proven lower bound on the nonnegative rank rules out ``C = L I_d R``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _kernels
from .bounds import classical_dim_bounds
from .errors import InvalidParams, NotDeterministic, ShapeMismatch
from .factor import NMFConfig, nmf, stochastic_normalize
from .matcore import DEFAULT_TOL, Tolerances, deterministic_dimension, is_deterministic

__all__ = [
    "Answer",
    "MajorizeConfig",
    "MajorizationWitness",
    "MajorizationResult",
    "uw_leq_identity",
    "uw_leq",
    "uw_equivalent_deterministic",
    "check_witness",
    "compose_witnesses",
    "pad_witness",
]


class Answer(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class MajorizeConfig:
    max_alternations: int = 200
    restarts: int = 8
    seed: int = 42
    inner_iter: int = 50


@dataclass(frozen=True, eq=False)
class MajorizationWitness:
    L: np.ndarray
    R: np.ndarray
    residual: float

    def to_dict(self) -> dict:
        return {"L": self.L.tolist(), "R": self.R.tolist(), "residual": self.residual}


@dataclass(frozen=True, eq=False)
class MajorizationResult:
    answer: Answer
    witness: Optional[MajorizationWitness] = None
    reason: Optional[str] = None
    residual: Optional[float] = None

    def to_dict(self) -> dict:
        out: dict = {"answer": self.answer.value, "residual": self.residual}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


def _residual(C, L, D, R) -> float:
    return float(np.max(np.abs(np.asarray(C) - L @ np.asarray(D) @ R)))


def _row_stochastic(X, tol: Tolerances) -> bool:
    return bool(X.min() >= -tol.nonneg_tol and np.all(np.abs(X.sum(axis=1) - 1.0) <= tol.row_sum_tol))


def check_witness(C, D, L, R, tol: Tolerances = DEFAULT_TOL, residual_tol: Optional[float] = None) -> bool:
    """Independent re-verification of ``C = L D R``."""
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    if L.shape != (C.shape[0], D.shape[0]) or R.shape != (D.shape[1], C.shape[1]):
        return False
    limit = tol.recon_tol if residual_tol is None else residual_tol
    return _row_stochastic(L, tol) and _row_stochastic(R, tol) and _residual(C, L, D, R) <= limit


def compose_witnesses(w1: MajorizationWitness, w2: MajorizationWitness) -> tuple[np.ndarray, np.ndarray]:
    """From ``C = L1 D R1`` and ``D = L2 E R2`` build ``(L1 L2, R2 R1)`` for ``C`` vs ``E``."""
    return w1.L @ w2.L, w2.R @ w1.R


def pad_witness(w: MajorizationWitness, d_new: int) -> MajorizationWitness:
    """Extend a witness for ``C <= I_d`` to ``I_{d_new}`` with unused symbols."""
    d = w.L.shape[1]
    if d_new < d:
        raise ShapeMismatch(f"cannot pad from {d} down to {d_new}")
    L = np.hstack([w.L, np.zeros((w.L.shape[0], d_new - d))])
    extra = np.zeros((d_new - d, w.R.shape[1]))
    extra[:, 0] = 1.0
    return MajorizationWitness(L, np.vstack([w.R, extra]), w.residual)


def _trivial_identity_witness(C, d) -> Optional[MajorizationWitness]:
    n, m = C.shape
    if d >= m:
        # encode the outcome itself: L = [C 0], R = [I; e_1 ...]
        w = MajorizationWitness(C.copy(), np.eye(m), 0.0)
        return pad_witness(w, d)
    if d >= n:
        # encode the input: L = [I 0], R = [C; e_1 ...]
        w = MajorizationWitness(np.eye(n), C.copy(), 0.0)
        return pad_witness(w, d)
    return None


def uw_leq_identity(C, d: int, tol: Tolerances = DEFAULT_TOL,
                    nmf_config: Optional[NMFConfig] = None) -> MajorizationResult:
    """Decide ``C <= I_d``, i.e. whether a ``d``-state classical system implements ``C``.

    NO needs a proven lower bound above ``d``; YES ships a witness; anything
    else is UNKNOWN.
    """
    C = np.asarray(C, dtype=float)
    if d < 1:
        raise InvalidParams(f"d must be >= 1, got {d}")
    report = classical_dim_bounds(C, tol)
    lb = report.lb
    if lb > d:
        source = report.source_of(lb)[0]
        return MajorizationResult(Answer.NO, reason=f"{source} lower bound {lb} > {d}")

    trivial = _trivial_identity_witness(C, d)
    if trivial is not None:
        return MajorizationResult(Answer.YES, witness=trivial, residual=trivial.residual)

    cfg = nmf_config or NMFConfig()
    fac = nmf(C, d, cfg)
    if not fac.success:
        return MajorizationResult(
            Answer.UNKNOWN, residual=fac.residual,
            reason=f"no factorization found at inner dimension {d} (best residual {fac.residual:.3e})",
        )
    slack = Tolerances(**{**tol.to_dict(),
                          "row_sum_tol": max(tol.row_sum_tol, C.shape[1] * fac.residual)})
    sf = stochastic_normalize(fac.W, fac.H, slack)
    L = sf.L / sf.L.sum(axis=1, keepdims=True)
    w = pad_witness(MajorizationWitness(L, sf.R, 0.0), d)
    w = replace(w, residual=_residual(C, w.L, np.eye(d), w.R))
    limit = max(tol.recon_tol, cfg.target_residual)
    if not check_witness(C, np.eye(d), w.L, w.R, tol, limit):
        return MajorizationResult(Answer.UNKNOWN, residual=w.residual,
                                  reason="normalised factorization failed re-verification")
    return MajorizationResult(Answer.YES, witness=w, residual=w.residual)


def _spectral_sq(A) -> float:
    return float(np.linalg.norm(A, 2) ** 2) if A.size else 0.0


def _alternate(C, D, L, R, cfg: MajorizeConfig, tol: Tolerances) -> float:
    n, m = C.shape
    In, Im = np.eye(n), np.eye(m)
    best = _residual(C, L, D, R)
    stall = 0
    for _ in range(cfg.max_alternations):
        DR = D @ R
        lip = _spectral_sq(DR)
        if lip > 0:
            _kernels.simplex_pgd(C, In, DR, L, cfg.inner_iter, 1.0 / lip)
        LD = L @ D
        lip = _spectral_sq(LD)
        if lip > 0:
            _kernels.simplex_pgd(C, LD, Im, R, cfg.inner_iter, 1.0 / lip)
        err = _residual(C, L, D, R)
        if err <= tol.recon_tol:
            return err
        if err < best * (1 - 1e-9):
            best, stall = err, 0
        else:
            stall += 1
            if stall >= 20:
                break
    return _residual(C, L, D, R)


def uw_leq(C, D, tol: Tolerances = DEFAULT_TOL, config: MajorizeConfig = MajorizeConfig()) -> MajorizationResult:
    """Search for row-stochastic ``L, R`` with ``C = L D R``.

    Alternates projected-gradient solves for ``L`` (``R`` fixed) and ``R``
    (``L`` fixed) on the Frobenius objective; success is judged on the
    max-entry residual against ``recon_tol``.  Never answers NO.
    """
    C = np.ascontiguousarray(np.asarray(C, dtype=float))
    D = np.ascontiguousarray(np.asarray(D, dtype=float))
    n, m = C.shape
    p, q = D.shape
    if C.shape == D.shape and np.max(np.abs(C - D)) <= tol.recon_tol:
        w = MajorizationWitness(np.eye(n), np.eye(m), _residual(C, np.eye(n), D, np.eye(m)))
        return MajorizationResult(Answer.YES, witness=w, residual=w.residual)

    best_err, best_t = np.inf, -1
    for t in range(config.restarts):
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(t,)))
        if t == 0:
            R = np.full((q, m), 1.0 / m)
        else:
            R = np.ascontiguousarray(_kernels.project_rows_simplex(rng.random((q, m))))
        L = np.ascontiguousarray(_kernels.project_rows_simplex(rng.random((n, p))))
        err = _alternate(C, D, L, R, config, tol)
        if err < best_err:
            best_err, best_t = err, t
        if err <= tol.recon_tol and check_witness(C, D, L, R, tol):
            w = MajorizationWitness(L.copy(), R.copy(), err)
            return MajorizationResult(Answer.YES, witness=w, residual=err)
    return MajorizationResult(
        Answer.UNKNOWN, residual=float(best_err),
        reason=f"no witness within {tol.recon_tol:g} after {config.restarts} restarts",
    )


def uw_equivalent_deterministic(C, D, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Exact equivalence test for 0/1 matrices: same reduced identity size."""
    for name, X in (("C", C), ("D", D)):
        if not is_deterministic(X, tol):
            raise NotDeterministic(f"{name} is not a 0/1 matrix")
    return deterministic_dimension(C, tol) == deterministic_dimension(D, tol)
