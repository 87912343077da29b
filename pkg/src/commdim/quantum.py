"""Qubit realisation of the antidistinguishability matrices.

States and effects live in the XZ plane of the Bloch sphere, so every
operator is ``c0 * I + cx * X + cz * Z`` with real coefficients and all
matrix arithmetic stays real.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidEnsemble, InvalidSize
from .matcore import DEFAULT_TOL, CommMatrix, Tolerances, validate

__all__ = [
    "BlochOperator",
    "QubitEnsemble",
    "VerificationReport",
    "qubit_implementation",
    "verify_ensemble",
    "gram",
    "quantum_dim_lower_bound",
]


@dataclass(frozen=True)
class BlochOperator:
    coeff_id: float
    coeff_x: float
    coeff_z: float

    def matrix(self) -> np.ndarray:
        c0, cx, cz = self.coeff_id, self.coeff_x, self.coeff_z
        return np.array([[c0 + cz, cx], [cx, c0 - cz]])

    @property
    def trace(self) -> float:
        return 2.0 * self.coeff_id

    @property
    def det(self) -> float:
        return self.coeff_id**2 - self.coeff_x**2 - self.coeff_z**2

    def is_psd(self, tol: float) -> bool:
        # exact for 2x2 symmetric matrices
        return bool(self.trace >= -tol and self.det >= -tol)

    def complement(self) -> "BlochOperator":
        return BlochOperator(1.0 - self.coeff_id, -self.coeff_x, -self.coeff_z)

    def scaled(self, factor: float) -> "BlochOperator":
        return BlochOperator(factor * self.coeff_id, factor * self.coeff_x, factor * self.coeff_z)


@dataclass(frozen=True)
class QubitEnsemble:
    states: tuple[BlochOperator, ...]
    effects: tuple[BlochOperator, ...]


@dataclass
class VerificationReport:
    states: list[dict] = field(default_factory=list)
    effects: list[dict] = field(default_factory=list)
    povm_complete: bool = False
    povm_deviation: float = 0.0

    @property
    def passed(self) -> bool:
        return (
            self.povm_complete
            and all(all(v for k, v in s.items() if k != "index") for s in self.states)
            and all(all(v for k, v in e.items() if k != "index") for e in self.effects)
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def _bloch_angles(n: int) -> np.ndarray:
    a = np.arange(1, n + 1)
    return 2.0 * a * np.pi / n


def qubit_implementation(n: int) -> QubitEnsemble:
    """States ``(I + r_a.sigma)/2`` and effects ``(I - r_b.sigma)/n``, ``a, b = 1..n``.

    ``r_a = (cos(2 a pi/n), 0, sin(2 a pi/n))``.  The effect ``M_b`` never
    fires on state ``b``, which makes the ensemble antidistinguishable.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidSize(f"qubit implementation needs n >= 2, got {n!r}")
    theta = _bloch_angles(int(n))
    states = tuple(BlochOperator(0.5, 0.5 * np.cos(t), 0.5 * np.sin(t)) for t in theta)
    effects = tuple(BlochOperator(1.0 / n, -np.cos(t) / n, -np.sin(t) / n) for t in theta)
    return QubitEnsemble(states, effects)


def verify_ensemble(ens: QubitEnsemble, tol: Tolerances = DEFAULT_TOL) -> VerificationReport:
    eps = tol.nonneg_tol
    report = VerificationReport()
    for a, s in enumerate(ens.states, start=1):
        report.states.append(
            {
                "index": a,
                "trace_one": bool(abs(s.trace - 1.0) <= tol.row_sum_tol),
                "psd": s.is_psd(eps),
                "pure": bool(abs(s.det) <= eps),
            }
        )
    total = np.zeros((2, 2))
    for b, e in enumerate(ens.effects, start=1):
        report.effects.append(
            {"index": b, "psd": e.is_psd(eps), "complement_psd": e.complement().is_psd(eps)}
        )
        total += e.matrix()
    deviation = float(np.max(np.abs(total - np.eye(2)))) if ens.effects else 1.0
    report.povm_deviation = deviation
    report.povm_complete = bool(deviation <= eps)
    return report


def gram(ens: QubitEnsemble, tol: Tolerances = DEFAULT_TOL) -> CommMatrix:
    """Matrix of outcome probabilities ``tr(s_a M_b)``."""
    if not verify_ensemble(ens, tol).passed:
        raise InvalidEnsemble("ensemble failed verification")
    S = np.stack([s.matrix() for s in ens.states])
    M = np.stack([e.matrix() for e in ens.effects])
    # tr(S_a M_b) = sum_ij S_a[i, j] M_b[j, i]
    probs = np.einsum("aij,bji->ab", S, M)
    return validate(probs, tol)


def quantum_dim_lower_bound(C: CommMatrix, tol: Tolerances = DEFAULT_TOL) -> int:
    """1 if every row of ``C`` is the same distribution, else 2.

    A one-dimensional system carries no information, so distinct rows already
    need a qubit.  No attempt is made at stronger PSD-rank bounds.
    """
    arr = np.asarray(C, dtype=float)
    if np.all(np.max(np.abs(arr - arr[0]), axis=1) <= tol.entry_eq_tol):
        return 1
    return 2
