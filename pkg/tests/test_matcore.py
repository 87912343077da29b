import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commdim.ensembles import antidist_matrix, gate_matrix
from commdim.errors import InvalidParams, NegativeEntry, NotDeterministic, RowSumViolation
from commdim.matcore import (
    Tolerances,
    deterministic_dimension,
    numerical_rank,
    reduce,
    validate,
)

from conftest import random_stochastic


def test_validate_accepts_identity():
    C = validate(np.eye(2))
    assert C.shape == (2, 2)


def test_validate_accepts_ambiguous_third_label():
    C = validate([[1, 0], [0, 1], [0.5, 0.5]])
    assert C.n == 3 and C.m == 2


def test_validate_rejects_row_sum():
    with pytest.raises(RowSumViolation):
        validate([[0.6, 0.6]])


def test_validate_rejects_negative():
    with pytest.raises(NegativeEntry):
        validate([[1.5, -0.5]])


def test_validate_clips_tiny_negatives():
    C = validate([[1.0 + 1e-13, -1e-13]])
    assert C.entries[0, 1] == 0.0


def test_comm_matrix_is_read_only():
    C = validate(np.eye(2))
    with pytest.raises(ValueError):
        C.entries[0, 0] = 3.0


@pytest.mark.parametrize("bad", [{"row_sum_tol": 0.0}, {"recon_tol": -1.0}])
def test_tolerances_must_be_positive(bad):
    with pytest.raises(InvalidParams):
        Tolerances(**bad)


@pytest.mark.parametrize("M, expected", [
    (np.eye(3), 3),
    (antidist_matrix(7), 3),
    (antidist_matrix(2), 2),
    (np.full((4, 4), 0.25), 1),
])
def test_numerical_rank(M, expected):
    assert numerical_rank(M) == expected


def test_a2_is_antidiagonal():
    np.testing.assert_array_equal(antidist_matrix(2).entries, [[0, 1], [1, 0]])


def test_numerical_rank_sweep():
    assert all(numerical_rank(antidist_matrix(n)) == 3 for n in range(3, 65))


def test_reduce_xor():
    red = reduce(gate_matrix("XOR"))
    np.testing.assert_array_equal(red.reduced.entries, np.eye(2))
    # inputs 1 and 4 share row 1 of the reduced matrix, inputs 2 and 3 share row 2
    np.testing.assert_array_equal(red.row_selector, [[1, 0], [0, 1], [0, 1], [1, 0]])
    assert red.kept_rows == (0, 1)


def test_reduce_leaves_ambig3_unchanged():
    C = gate_matrix("AMBIG3")
    red = reduce(C)
    np.testing.assert_array_equal(red.reduced.entries, C.entries)
    np.testing.assert_array_equal(red.row_selector, np.eye(3))
    np.testing.assert_array_equal(red.col_injector, np.eye(2))


def test_reduce_drops_zero_column():
    red = reduce(validate([[1, 0, 0], [0, 1, 0]]))
    np.testing.assert_array_equal(red.reduced.entries, np.eye(2))
    np.testing.assert_array_equal(red.col_injector, [[1, 0, 0], [0, 1, 0]])
    assert red.kept_cols == (0, 1)


def _with_duplicates_and_zero_cols(rng, n, m, dup, zc):
    base = random_stochastic(rng, n, m)
    rows = np.vstack([base, base[rng.integers(0, n, dup)]])
    rows = rows[rng.permutation(len(rows))]
    out = np.zeros((rows.shape[0], m + zc))
    cols = rng.permutation(m + zc)[:m]
    out[:, cols] = rows
    return validate(out)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 4), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_reduce_reconstructs_exactly_and_is_idempotent(n, m, dup, zc, seed):
    C = _with_duplicates_and_zero_cols(np.random.default_rng(seed), n, m, dup, zc)
    red = reduce(C)
    np.testing.assert_array_equal(red.reconstruct(), C.entries)
    again = reduce(red.reduced)
    np.testing.assert_array_equal(again.reduced.entries, red.reduced.entries)
    assert numerical_rank(red.reduced) == numerical_rank(C)


@pytest.mark.parametrize("name, d", [("NOT", 2), ("XOR", 2)])
def test_deterministic_dimension_gates(name, d):
    assert deterministic_dimension(gate_matrix(name)) == d


def test_deterministic_dimension_identity():
    assert deterministic_dimension(validate(np.eye(5))) == 5


def test_deterministic_dimension_rejects_noise():
    with pytest.raises(NotDeterministic):
        deterministic_dimension(gate_matrix("AMBIG3"))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_deterministic_dimension_counts_distinct_rows(n, m, seed):
    rng = np.random.default_rng(seed)
    C = np.zeros((n, m))
    C[np.arange(n), rng.integers(0, m, n)] = 1.0
    distinct = len({tuple(r) for r in C})
    assert deterministic_dimension(validate(C)) == distinct
