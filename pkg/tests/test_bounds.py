from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from commdim.bounds import (
    classical_dim_bounds,
    column_sparsity_disjoint,
    faces,
    nrank_lb_from_rnrank,
    nrank_lb_log,
    phi_prime,
    phi_r,
    rnrank_rank3_disjoint,
    table_rows,
)
from commdim.ensembles import antidist_matrix
from commdim.errors import InvalidParams, InvalidRange, PreconditionFailed
from commdim.matcore import validate

TABLE = [(3, 3, 3), (4, 4, 6), (5, 6, 10), (6, 9, 18), (7, 14, 30)]
# values past the tabulated range, frozen from the exact evaluation
TABLE_EXT = [(8, 20, 50), (9, 30, 90), (10, 50, 150), (11, 77, 245)]


def _cyclic_faces(n, d, k):
    """Count k-faces of the cyclic polytope C(n, d) with qhull."""
    from scipy.spatial import ConvexHull

    t = np.linspace(-1.0, 1.0, n)
    pts = np.stack([t ** (p + 1) for p in range(d)], axis=1)
    hull = ConvexHull(pts)
    # cyclic polytopes are simplicial: every subset of a facet is a face
    found = set()
    for facet in hull.simplices:
        found.update(combinations(sorted(facet), k + 1))
    return len(found)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("extra", [1, 2, 3, 4])
def test_faces_against_convex_hull(d, extra):
    n = d + extra
    for k in range(d):
        assert faces(n, d, k) == _cyclic_faces(n, d, k), (n, d, k)


@pytest.mark.parametrize("n", range(3, 30))
def test_polygon_edges(n):
    assert faces(n, 2, 1) == n


@pytest.mark.parametrize("d", range(1, 12))
def test_simplex(d):
    for k in range(d):
        assert faces(d + 1, d, k) == comb(d + 1, k + 1)


def test_tetrahedron_edges():
    assert faces(4, 3, 1) == 6


@given(st.integers(2, 14), st.integers(0, 20))
def test_neighborly_vertices(d, extra):
    assert faces(d + 1 + extra, d, 0) == d + 1 + extra


@pytest.mark.parametrize("n", [2, 3, 10])
def test_segment_has_two_vertices(n):
    assert faces(n, 1, 0) == 2


@pytest.mark.parametrize("args", [(3, 3, 0), (5, 3, 4), (5, 3, -1), (0, -1, 0)])
def test_faces_invalid(args):
    with pytest.raises(InvalidParams):
        faces(*args)


@pytest.mark.parametrize("rp, phi3", [(3, 3), (6, 18), (7, 30)])
def test_phi_r_examples(rp, phi3):
    assert phi_r(rp, 3) == phi3


@pytest.mark.parametrize("rp, value", [(5, 6), (6, 9), (7, 14)])
def test_phi_prime_examples(rp, value):
    assert phi_prime(rp) == value


def test_table_reproduced():
    assert table_rows(3, 7) == TABLE
    assert table_rows(3, 3) == [(3, 3, 3)]


def test_table_extension():
    assert table_rows(8, 11) == TABLE_EXT


def test_table_range():
    with pytest.raises(InvalidRange):
        table_rows(2, 5)
    with pytest.raises(InvalidRange):
        table_rows(6, 5)


def test_monotone_and_ordered():
    pp = [phi_prime(r) for r in range(3, 21)]
    p3 = [phi_r(r, 3) for r in range(3, 21)]
    assert all(a <= b for a, b in zip(pp, pp[1:]))
    assert all(a <= b for a, b in zip(p3, p3[1:]))
    assert all(a <= b for a, b in zip(pp, p3))


@pytest.mark.parametrize("rp", range(3, 21))
def test_chain_to_power_of_two(rp):
    assert phi_r(rp, 3) <= comb(rp, rp // 2) <= 2**rp


def test_phi_r_invalid():
    with pytest.raises(InvalidParams):
        phi_r(3, 4)
    with pytest.raises(InvalidParams):
        phi_prime(2)


def test_sparsity_examples():
    assert column_sparsity_disjoint(antidist_matrix(7))
    assert column_sparsity_disjoint(np.eye(3))
    assert not column_sparsity_disjoint(np.full((2, 2), 0.5))


def test_sparsity_containment_detected():
    # column 2's zero set {row 1} sits inside column 1's zero set {row 1, row 2}
    C = np.array([[0.0, 0.0, 1.0], [0.0, 0.5, 0.5], [0.5, 0.5, 0.0]])
    assert not column_sparsity_disjoint(C)


@pytest.mark.parametrize("n", [3, 7, 16, 64])
def test_rnrank_antidist(n):
    assert rnrank_rank3_disjoint(antidist_matrix(n)) == n


def test_rnrank_preconditions():
    with pytest.raises(PreconditionFailed) as exc:
        rnrank_rank3_disjoint(antidist_matrix(2))
    assert exc.value.precondition == "rank"
    with pytest.raises(PreconditionFailed) as exc:
        rnrank_rank3_disjoint(validate(np.full((3, 2), 0.5)))
    assert exc.value.precondition == "square"
    # rank 3, square, but the all-positive column has an empty zero set
    M = np.array([[0.5, 0, 0.5, 0], [0, 0.5, 0.5, 0], [0, 0, 0.5, 0.5], [0.25, 0.25, 0.25, 0.25]])
    with pytest.raises(PreconditionFailed) as exc:
        rnrank_rank3_disjoint(validate(M))
    assert exc.value.precondition in {"rank", "disjoint_sparsity"}


@pytest.mark.parametrize("rn, rank, lb", [(7, 3, 6), (3, 3, 3), (5, 3, 5), (16, 3, 8), (14, 3, 7), (15, 3, 8)])
def test_nrank_lb_from_rnrank(rn, rank, lb):
    assert nrank_lb_from_rnrank(rn, rank) == lb


def test_nrank_lb_general_rank():
    # phi_4(4) = 4 < 5 and phi_4(5) = faces(5, 4, 1) = 10
    assert phi_r(5, 4) == 10
    assert nrank_lb_from_rnrank(5, 4) == 5


def test_nrank_lb_phi3_variant():
    assert nrank_lb_from_rnrank(7, 3, use_phi_prime=False) == 5


@given(st.integers(3, 200))
def test_nrank_lb_is_minimal(rn):
    r = nrank_lb_from_rnrank(rn, 3)
    assert phi_prime(r) >= rn
    assert r == 3 or phi_prime(r - 1) < rn


@pytest.mark.parametrize("v, lb", [(128, 7), (7, 3), (1, 0), (2, 1), (129, 8)])
def test_nrank_lb_log(v, lb):
    assert nrank_lb_log(v) == lb


def test_report_a7():
    rep = classical_dim_bounds(antidist_matrix(7))
    assert (rep.lb, rep.ub) == (6, 6)
    assert rep.rnrank == 7
    assert "FACES_PHI_PRIME" in rep.source_of(6)
    assert "EXPLICIT" in rep.source_of(6, "upper")
    assert dict((s, v) for v, s in rep.lower_bounds) == {
        "RANK": 3, "FACES_PHI_PRIME": 6, "FACES_PHI_R": 5, "LOG2_RNRANK": 3,
    }


def test_report_a16():
    rep = classical_dim_bounds(antidist_matrix(16))
    assert rep.lb == 8 and rep.ub == 16
    assert rep.lb >= max(3, 4)


def test_report_identity():
    rep = classical_dim_bounds(validate(np.eye(4)))
    assert (rep.lb, rep.ub) == (4, 4)
    assert rep.rnrank is None


def test_report_dict():
    d = classical_dim_bounds(antidist_matrix(7)).to_dict()
    assert d["lb"] == 6 and d["ub"] == 6 and "seed" not in d
