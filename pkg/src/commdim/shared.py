"""Shared randomness as a mixture of classical protocols.

If the sender and receiver pick protocol ``k'`` with probability
``alpha_k'`` and each protocol is ``L_k' R_k'`` with inner dimension ``d``,
the mixture factorizes through ``d * k`` symbols::

    C = [alpha_1 L_1 ... alpha_k L_k] @ [R_1; ...; R_k]

so ``nrank(C) <= d k``.  Conversely a proven ``nrank(C) >= lb`` forces at
least ``ceil(lb / d)`` coordinated actions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, ShapeMismatch
from .factor import StochasticFactorization
from .matcore import DEFAULT_TOL, CommMatrix, Tolerances, validate

__all__ = ["SRProtocol", "mix", "block_factorization", "min_coordinated_actions"]


@dataclass(frozen=True, eq=False)
class SRProtocol:
    weights: tuple[float, ...]
    parts: tuple[StochasticFactorization, ...]
    d: int

    def __post_init__(self):
        tol = DEFAULT_TOL
        if len(self.weights) != len(self.parts) or not self.parts:
            raise ShapeMismatch("need one weight per part and at least one part")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > tol.row_sum_tol:
            raise InvalidParams(f"weights must be nonnegative and sum to 1, got {self.weights}")
        outer = None
        for idx, part in enumerate(self.parts):
            if part.L.shape[1] != self.d or part.R.shape[0] != self.d:
                raise ShapeMismatch(f"part {idx + 1} has inner dimension {part.L.shape[1]}, expected {self.d}")
            shape = (part.L.shape[0], part.R.shape[1])
            if outer is None:
                outer = shape
            elif shape != outer:
                raise ShapeMismatch(f"part {idx + 1} is {shape}, expected {outer}")
            for name, X in (("L", part.L), ("R", part.R)):
                if X.min() < -tol.nonneg_tol or np.any(np.abs(X.sum(axis=1) - 1.0) > tol.row_sum_tol):
                    raise InvalidParams(f"part {idx + 1}: {name} is not row-stochastic")

    @property
    def k(self) -> int:
        return len(self.parts)

    @classmethod
    def from_parts(cls, parts, d=None) -> "SRProtocol":
        """Build from ``[(weight, L, R), ...]``."""
        weights = tuple(float(w) for w, _, _ in parts)
        facs = tuple(StochasticFactorization(np.asarray(L, float), np.asarray(R, float)) for _, L, R in parts)
        if d is None:
            d = facs[0].L.shape[1] if facs else 0
        return cls(weights, facs, int(d))


def mix(p: SRProtocol, tol: Tolerances = DEFAULT_TOL) -> CommMatrix:
    """The communication matrix ``sum_k alpha_k L_k R_k`` of the protocol."""
    total = sum(w * part.product() for w, part in zip(p.weights, p.parts))
    return validate(total, tol)


def block_factorization(p: SRProtocol) -> StochasticFactorization:
    """Single factorization of ``mix(p)`` with inner dimension ``d * k``."""
    L = np.hstack([w * part.L for w, part in zip(p.weights, p.parts)])
    R = np.vstack([part.R for part in p.parts])
    return StochasticFactorization(L=L, R=R)


def min_coordinated_actions(nrank_lb: int, d: int) -> int:
    """Least ``k`` with ``d * k >= nrank_lb``."""
    if nrank_lb < 1 or d < 1:
        raise InvalidParams(f"need nrank_lb >= 1 and d >= 1, got {nrank_lb}, {d}")
    return -(-int(nrank_lb) // int(d))
