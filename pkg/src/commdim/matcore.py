"""Communication matrices: validation, numerical rank and canonical reduction.

A communication matrix ``C`` has ``C[a, b]`` equal to the probability that
the receiver outputs ``b`` when the sender was given input ``a``; it is
row-stochastic.  Any such matrix is ultraweakly equivalent to the matrix
obtained by deleting outcomes that never occur and inputs whose rows repeat
an earlier row, which is what :func:`reduce` computes.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import (
    InvalidParams,
    NegativeEntry,
    NotDeterministic,
    NotPermutation,
    RowSumViolation,
)

__all__ = [
    "Tolerances",
    "CommMatrix",
    "ReductionResult",
    "validate",
    "numerical_rank",
    "reduce",
    "is_deterministic",
    "deterministic_dimension",
]


@dataclass(frozen=True)
class Tolerances:
    row_sum_tol: float = 1e-9
    nonneg_tol: float = 1e-12
    entry_eq_tol: float = 1e-9
    rank_rel_tol: float = 1e-9
    recon_tol: float = 1e-10

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise InvalidParams(f"tolerance {f.name} must be > 0, got {value!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "Tolerances":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParams(f"unknown tolerance fields: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class CommMatrix:
    """Row-stochastic ``n x m`` matrix.  Build instances with :func:`validate`."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self):
        return f"CommMatrix(n={self.n}, m={self.m})"

    def allclose(self, other, atol: float) -> bool:
        other = np.asarray(other, dtype=float)
        return other.shape == self.shape and bool(np.max(np.abs(self.entries - other)) <= atol)


@dataclass(frozen=True, eq=False)
class ReductionResult:
    reduced: CommMatrix
    row_selector: np.ndarray
    col_injector: np.ndarray
    kept_rows: tuple[int, ...]
    kept_cols: tuple[int, ...]

    def reconstruct(self) -> np.ndarray:
        return self.row_selector @ self.reduced.entries @ self.col_injector


def validate(raw, tol: Tolerances = DEFAULT_TOL) -> CommMatrix:
    """Check that ``raw`` is row-stochastic and return it as a :class:`CommMatrix`.

    Entries in ``[-nonneg_tol, 0)`` are clipped to zero.  Raises
    :class:`NegativeEntry` or :class:`RowSumViolation` otherwise.
    """
    if isinstance(raw, CommMatrix):
        raw = raw.entries
    arr = np.array(raw, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidParams(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParams("matrix contains non-finite entries")
    if arr.min() < -tol.nonneg_tol:
        a, b = np.unravel_index(np.argmin(arr), arr.shape)
        raise NegativeEntry(f"entry ({a + 1}, {b + 1}) = {float(arr[a, b])!r} is negative")
    arr[arr < 0] = 0.0
    sums = arr.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol.row_sum_tol)
    if bad.size:
        a = bad[0]
        raise RowSumViolation(f"row {a + 1} sums to {float(sums[a])!r}")
    return CommMatrix(arr)


def numerical_rank(C, tol: Tolerances = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_rel_tol`` times the largest."""
    arr = np.asarray(C, dtype=float)
    s = np.linalg.svd(arr, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))


def reduce(C: CommMatrix, tol: Tolerances = DEFAULT_TOL) -> ReductionResult:
    """Remove never-occurring outcomes and repeated inputs.

    Among rows equal within ``entry_eq_tol`` the lowest-index one is kept.
    ``row_selector @ reduced @ col_injector`` gives back ``C``.
    """
    arr = np.asarray(C, dtype=float)
    n, m = arr.shape
    kept_cols = [b for b in range(m) if np.any(arr[:, b] >= tol.nonneg_tol)]

    kept_rows: list[int] = []
    klass = np.empty(n, dtype=int)
    for a in range(n):
        for idx, rep in enumerate(kept_rows):
            if np.max(np.abs(arr[a] - arr[rep])) <= tol.entry_eq_tol:
                klass[a] = idx
                break
        else:
            klass[a] = len(kept_rows)
            kept_rows.append(a)

    reduced = arr[np.ix_(kept_rows, kept_cols)]
    row_selector = np.zeros((n, len(kept_rows)))
    row_selector[np.arange(n), klass] = 1.0
    col_injector = np.zeros((len(kept_cols), m))
    col_injector[np.arange(len(kept_cols)), kept_cols] = 1.0
    return ReductionResult(
        reduced=CommMatrix(reduced),
        row_selector=row_selector,
        col_injector=col_injector,
        kept_rows=tuple(kept_rows),
        kept_cols=tuple(kept_cols),
    )


def is_deterministic(C, tol: Tolerances = DEFAULT_TOL) -> bool:
    arr = np.asarray(C, dtype=float)
    return bool(np.all((np.abs(arr) <= tol.entry_eq_tol) | (np.abs(arr - 1.0) <= tol.entry_eq_tol)))


def deterministic_dimension(C: CommMatrix, tol: Tolerances = DEFAULT_TOL) -> int:
    """Size ``d`` of the identity that a 0/1 communication matrix reduces to.

    Both a ``d``-level classical and a ``d``-level quantum system implement
    such a matrix, so ``d`` is its classical and its quantum dimension.
    """
    if not is_deterministic(C, tol):
        raise NotDeterministic("matrix has entries other than 0 and 1")
    red = reduce(C, tol).reduced.entries
    d = red.shape[0]
    ones = np.abs(red - 1.0) <= tol.entry_eq_tol
    if red.shape != (d, d) or not (
        np.all(ones.sum(axis=0) == 1) and np.all(ones.sum(axis=1) == 1)
    ):
        raise NotPermutation(f"reduced matrix of shape {red.shape} is not a permuted identity")
    return d
