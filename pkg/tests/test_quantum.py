import numpy as np
import pytest

from commdim.ensembles import antidist_matrix, gate_matrix
from commdim.errors import InvalidEnsemble, InvalidSize
from commdim.matcore import validate
from commdim.quantum import (
    BlochOperator,
    QubitEnsemble,
    gram,
    quantum_dim_lower_bound,
    qubit_implementation,
    verify_ensemble,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def _pauli_gram(n):
    # independent path: complex Pauli algebra, no Bloch-triple shortcut
    out = np.empty((n, n))
    for a in range(1, n + 1):
        ta = 2 * a * np.pi / n
        rho = 0.5 * (np.eye(2) + np.cos(ta) * SX + np.sin(ta) * SZ)
        for b in range(1, n + 1):
            tb = 2 * b * np.pi / n
            M = (np.eye(2) - np.cos(tb) * SX - np.sin(tb) * SZ) / n
            out[a - 1, b - 1] = np.trace(rho @ M).real
    return out


def test_n2_bloch_vectors():
    ens = qubit_implementation(2)
    assert ens.states[0].coeff_x == pytest.approx(-0.5)
    assert ens.states[1].coeff_x == pytest.approx(0.5)
    assert abs(ens.states[0].coeff_z) < 1e-15


def test_n4_angles():
    ens = qubit_implementation(4)
    got = [(round(2 * s.coeff_x, 12), round(2 * s.coeff_z, 12)) for s in ens.states]
    assert got == [(0.0, 1.0), (-1.0, 0.0), (-0.0, -1.0), (1.0, -0.0)]


@pytest.mark.parametrize("n", [2, 3, 7, 16, 64])
def test_gram_matches_pauli_oracle(n):
    np.testing.assert_allclose(gram(qubit_implementation(n)).entries, _pauli_gram(n), atol=1e-14, rtol=0)


@pytest.mark.parametrize("n", range(2, 65))
def test_gram_is_antidist(n):
    G = gram(qubit_implementation(n)).entries
    assert np.max(np.abs(G - antidist_matrix(n).entries)) <= 1e-12


@pytest.mark.parametrize("n", [2, 7, 31])
def test_verify_passes(n):
    rep = verify_ensemble(qubit_implementation(n))
    assert rep.passed and rep.povm_complete
    assert all(s["pure"] and s["psd"] and s["trace_one"] for s in rep.states)
    assert all(e["psd"] and e["complement_psd"] for e in rep.effects)


def test_scaled_effect_breaks_completeness():
    ens = qubit_implementation(7)
    bad = QubitEnsemble(ens.states, (ens.effects[0].scaled(1.5),) + ens.effects[1:])
    rep = verify_ensemble(bad)
    assert not rep.povm_complete and not rep.passed
    with pytest.raises(InvalidEnsemble):
        gram(bad)


def test_mixed_state_is_not_pure():
    ens = qubit_implementation(3)
    mixed = QubitEnsemble((BlochOperator(0.5, 0.1, 0.0),) + ens.states[1:], ens.effects)
    rep = verify_ensemble(mixed)
    assert rep.states[0]["psd"] and not rep.states[0]["pure"]


def test_not_psd_detected():
    assert not BlochOperator(0.5, 0.6, 0.0).is_psd(1e-12)
    assert BlochOperator(0.5, 0.3, 0.4).is_psd(1e-12)


@pytest.mark.parametrize("n", [2, 5, 12, 64])
def test_xz_plane_and_purity(n):
    ens = qubit_implementation(n)
    for op in ens.states + ens.effects:
        M = op.matrix()
        assert M.dtype == np.float64
        np.testing.assert_array_equal(M, M.T)
    assert all(s.det <= 1e-12 for s in ens.states)


def test_bloch_matrix_form():
    np.testing.assert_array_equal(BlochOperator(0.5, 0.2, 0.3).matrix(), [[0.8, 0.2], [0.2, 0.2]])


def test_small_n_rejected():
    with pytest.raises(InvalidSize):
        qubit_implementation(1)


@pytest.mark.parametrize("C, expected", [
    (validate([[0.3, 0.7]]), 1),
    (validate([[0.5, 0.5], [0.5, 0.5]]), 1),
    (antidist_matrix(7), 2),
    (validate(np.eye(3)), 2),
    (gate_matrix("AMBIG3"), 2),
])
def test_quantum_dim_lower_bound(C, expected):
    assert quantum_dim_lower_bound(C) == expected


def test_report_serializes():
    d = verify_ensemble(qubit_implementation(3)).to_dict()
    assert d["passed"] is True and len(d["states"]) == 3
