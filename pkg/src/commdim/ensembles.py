"""Named communication matrices: the antidistinguishability family and gates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSize, UnknownName
from .matcore import CommMatrix, validate

__all__ = ["NamedMatrix", "antidist_matrix", "gate_matrix", "named_matrix", "GATES"]


GATES = {
    "NOT": [[0.0, 1.0], [1.0, 0.0]],
    "XOR": [[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]],
    "AMBIG3": [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]],
}


@dataclass(frozen=True, eq=False)
class NamedMatrix:
    name: str
    matrix: CommMatrix


def antidist_matrix(n: int) -> CommMatrix:
    """The ``n x n`` antidistinguishability matrix.

    Entry ``(a, b)`` is ``(2/n) sin^2((a - b) pi / n)``.  The matrix is
    circulant and symmetric with an exactly zero diagonal: outcome ``b``
    rules out input ``b`` and nothing else.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidSize(f"antidistinguishability matrix needs n >= 2, got {n!r}")
    n = int(n)
    # circulant table indexed by min(d, n - d) keeps the matrix exactly symmetric
    shift = np.arange(n)
    shift = np.minimum(shift, n - shift)
    table = (2.0 / n) * np.sin(shift * np.pi / n) ** 2
    table[0] = 0.0
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return validate(table[idx])


def gate_matrix(name: str) -> CommMatrix:
    key = str(name).upper()
    if key not in GATES:
        raise UnknownName(f"unknown gate {name!r}; choose from {sorted(GATES)}")
    return validate(GATES[key])


def named_matrix(name: str, n: int | None = None) -> NamedMatrix:
    key = str(name).upper()
    if key == "ANTIDIST":
        if n is None:
            raise InvalidSize("ANTIDIST needs a size n")
        return NamedMatrix(f"ANTIDIST({n})", antidist_matrix(n))
    return NamedMatrix(key, gate_matrix(key))
