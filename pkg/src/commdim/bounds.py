"""Lower bounds on nonnegative rank from polytope face counting.

The chain of reasoning:

* the restricted nonnegative rank of a rank-3 square matrix whose columns
  have pairwise incomparable zero sets equals its size;
* the restricted nonnegative rank is at most ``phi(nrank)``, a maximum of
  face counts of cyclic polytopes, and ``phi`` is increasing;
* so the nonnegative rank is at least the smallest ``r_plus`` with
  ``phi(r_plus) >= rnrank``.

All face counts are exact Python integers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional

import numpy as np

from .errors import InvalidParams, InvalidRange, PreconditionFailed
from .matcore import DEFAULT_TOL, CommMatrix, Tolerances, numerical_rank

__all__ = [
    "faces",
    "phi_r",
    "phi_prime",
    "column_sparsity_disjoint",
    "rnrank_rank3_disjoint",
    "nrank_lb_from_rnrank",
    "nrank_lb_log",
    "BoundReport",
    "classical_dim_bounds",
    "table_rows",
    "LOWER_SOURCES",
    "UPPER_SOURCES",
]

LOWER_SOURCES = ("RANK", "FACES_PHI_PRIME", "FACES_PHI_R", "LOG2_RNRANK")
UPPER_SOURCES = ("SIZE", "NMF", "EXPLICIT")


def _binom(p: int, q: int) -> int:
    if q < 0 or q > p or p < 0:
        return 0
    return comb(p, q)


def faces(n: int, d: int, k: int) -> int:
    """Maximal number of ``k``-faces of a ``d``-polytope with ``n`` vertices.

    Attained by the cyclic polytope.  The sum runs over ``i = 0 .. floor(d/2)``;
    for even ``d`` only half of the ``i = d/2`` term counts.

    >>> faces(6, 2, 1)
    6
    >>> faces(4, 3, 1)
    6
    """
    n, d, k = int(n), int(d), int(k)
    if d < 0 or n < d + 1:
        raise InvalidParams(f"faces({n}, {d}, {k}): need n >= d + 1 >= 1")
    if k == d:
        # the polytope itself; reachable only from the defensive branches below
        return 1
    if not 0 <= k <= d - 1:
        raise InvalidParams(f"faces({n}, {d}, {k}): need 0 <= k <= d - 1")
    total = Fraction(0)
    for i in range(d // 2 + 1):
        term = (_binom(d - i, k + 1 - i) + _binom(i, k + 1 - d + i)) * _binom(n - d - 1 + i, i)
        if d % 2 == 0 and i == d // 2:
            total += Fraction(term, 2)
        else:
            total += term
    if total.denominator != 1:
        raise ArithmeticError(f"faces({n}, {d}, {k}) is not an integer: {total}")
    return int(total)


def phi_r(r_plus: int, r: int) -> int:
    """``max over r <= r_u <= r_plus`` of ``faces(r_plus, r_u - 1, r_u - r)``."""
    if not 1 <= r <= r_plus:
        raise InvalidParams(f"phi_r needs 1 <= r <= r_plus, got r={r}, r_plus={r_plus}")
    return max(faces(r_plus, r_u - 1, r_u - r) for r_u in range(r, r_plus + 1))


def phi_prime(r_plus: int) -> int:
    """Sharper rank-3 bound: ``max_{r_u} min_{i in {0,1}} faces(r_plus, r_u-1, r_u-3+i)``."""
    if r_plus < 3:
        raise InvalidParams(f"phi_prime needs r_plus >= 3, got {r_plus}")
    return max(
        min(faces(r_plus, r_u - 1, r_u - 3 + i) for i in (0, 1))
        for r_u in range(3, r_plus + 1)
    )


def column_sparsity_disjoint(C, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff no column's zero set is contained in another column's zero set."""
    zero = np.asarray(C, dtype=float) < tol.nonneg_tol
    m = zero.shape[1]
    for i in range(m):
        for j in range(m):
            if i != j and not np.any(zero[:, i] & ~zero[:, j]):
                return False
    return True


def rnrank_rank3_disjoint(C: CommMatrix, tol: Tolerances = DEFAULT_TOL) -> int:
    """Restricted nonnegative rank of a rank-3 square matrix with disjoint column sparsity."""
    n, m = np.shape(C)
    if n != m:
        raise PreconditionFailed("square", f"matrix is {n}x{m}, not square")
    rank = numerical_rank(C, tol)
    if rank != 3:
        raise PreconditionFailed("rank", f"numerical rank is {rank}, not 3")
    if not column_sparsity_disjoint(C, tol):
        raise PreconditionFailed("disjoint_sparsity", "column sparsity patterns are not disjoint")
    return n


def _phi_for_rank(r_plus: int, rank: int) -> int:
    return phi_prime(r_plus) if rank == 3 else phi_r(r_plus, rank)


def nrank_lb_from_rnrank(rnrank_value: int, rank: int, use_phi_prime: bool = True) -> int:
    """Smallest ``r_plus >= rank`` whose face-count bound reaches ``rnrank_value``.

    Uses ``phi_prime`` for rank 3 (unless ``use_phi_prime`` is False) and
    ``phi_r(., rank)`` otherwise.
    """
    if not rnrank_value >= rank >= 1:
        raise InvalidParams(f"need rnrank >= rank >= 1, got {rnrank_value}, {rank}")
    if rank == 1:
        if rnrank_value != 1:
            raise InvalidParams("a rank-one nonnegative matrix has restricted nonnegative rank 1")
        return 1
    # phi(r_plus) >= r_plus for rank >= 2, so the scan stops by r_plus = rnrank_value
    r_plus = rank
    while True:
        bound = _phi_for_rank(r_plus, rank) if use_phi_prime else phi_r(r_plus, rank)
        if bound >= rnrank_value:
            return r_plus
        r_plus += 1


def nrank_lb_log(rnrank_value: int) -> int:
    """``ceil(log2(rnrank_value))`` computed exactly."""
    if rnrank_value < 1:
        raise InvalidParams(f"rnrank must be >= 1, got {rnrank_value}")
    return (int(rnrank_value) - 1).bit_length()


def table_rows(r_lo: int, r_hi: int) -> list[tuple[int, int, int]]:
    """``(r_plus, phi_prime, phi_3)`` for ``r_plus`` in ``[r_lo, r_hi]``."""
    if not 3 <= r_lo <= r_hi:
        raise InvalidRange(f"need 3 <= r_lo <= r_hi, got {r_lo}..{r_hi}")
    return [(r, phi_prime(r), phi_r(r, 3)) for r in range(r_lo, r_hi + 1)]


@dataclass
class BoundReport:
    rank: int
    rnrank: Optional[int] = None
    lower_bounds: list[tuple[int, str]] = field(default_factory=list)
    upper_bounds: list[tuple[int, str]] = field(default_factory=list)
    nmf_seed: Optional[int] = None

    @property
    def lb(self) -> int:
        return max(v for v, _ in self.lower_bounds)

    @property
    def ub(self) -> int:
        return min(v for v, _ in self.upper_bounds)

    def source_of(self, value: int, which: str = "lower") -> list[str]:
        items = self.lower_bounds if which == "lower" else self.upper_bounds
        return [s for v, s in items if v == value]

    def to_dict(self) -> dict:
        out = {
            "rank": self.rank,
            "rnrank": self.rnrank,
            "lower_bounds": [{"value": v, "source": s} for v, s in self.lower_bounds],
            "upper_bounds": [{"value": v, "source": s} for v, s in self.upper_bounds],
            "lb": self.lb,
            "ub": self.ub,
        }
        if self.nmf_seed is not None:
            out["seed"] = self.nmf_seed
        return out


def _matches_a7(C, tol: Tolerances) -> bool:
    from .ensembles import antidist_matrix

    arr = np.asarray(C, dtype=float)
    return arr.shape == (7, 7) and antidist_matrix(7).allclose(arr, tol.entry_eq_tol)


def classical_dim_bounds(C: CommMatrix, tol: Tolerances = DEFAULT_TOL, nmf_config=None) -> BoundReport:
    """Sandwich the nonnegative rank (classical dimension) of ``C``.

    Lower bounds come from the numerical rank and, for rank-3 square matrices
    with disjoint column sparsity, from the face-counting chain.  Upper bounds
    come from the matrix size, the built-in factorization of ``A_7`` and,
    when ``nmf_config`` is given, from a heuristic NMF rank search.  NMF
    failures are never turned into lower bounds.
    """
    n, m = np.shape(C)
    rank = numerical_rank(C, tol)
    report = BoundReport(rank=rank)
    report.lower_bounds.append((rank, "RANK"))

    if n == m and rank == 3 and column_sparsity_disjoint(C, tol):
        rn = rnrank_rank3_disjoint(C, tol)
        report.rnrank = rn
        report.lower_bounds.append((nrank_lb_from_rnrank(rn, 3), "FACES_PHI_PRIME"))
        report.lower_bounds.append((nrank_lb_from_rnrank(rn, 3, use_phi_prime=False), "FACES_PHI_R"))
        report.lower_bounds.append((nrank_lb_log(rn), "LOG2_RNRANK"))

    report.upper_bounds.append((min(n, m), "SIZE"))

    if _matches_a7(C, tol):
        from .factor import a7_explicit, verify_factorization

        W, H = a7_explicit()
        if verify_factorization(C, W, H, tol).passed:
            report.upper_bounds.append((W.shape[1], "EXPLICIT"))

    if nmf_config is not None:
        from .factor import nmf_rank_search

        lb = report.lb
        found = nmf_rank_search(C, lb, min(n, m), nmf_config)
        report.nmf_seed = nmf_config.seed
        if found is not None:
            report.upper_bounds.append((found, "NMF"))

    if report.lb > report.ub:
        raise ArithmeticError(f"inconsistent bounds: lb={report.lb} > ub={report.ub}")
    return report
