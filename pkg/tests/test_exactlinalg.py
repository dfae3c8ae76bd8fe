import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bwcoh.exactlinalg import (
    GF,
    QQ,
    ZZ,
    FgAbelianGroup,
    Matrix,
    cohomology_at,
    image_basis,
    kernel_basis,
    rank,
    smith_normal_form,
    solve,
    subquotient_dim,
)

small_int_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


# smith_normal_form


def test_snf_2x2():
    assert smith_normal_form(Matrix(ZZ, [[2, 4], [6, 8]])).d == (2, 4)


def test_snf_identity():
    assert smith_normal_form(Matrix.identity(ZZ, 2)).d == (1, 1)


def test_snf_zero():
    assert smith_normal_form(Matrix.zeros(ZZ, 2, 2)).d == ()


def _minor_gcd(a, k):
    """gcd of all k×k minors, computed directly."""
    m, n = a.shape
    g = 0
    for rows in itertools.combinations(range(m), k):
        for cols in itertools.combinations(range(n), k):
            g = math.gcd(g, round(np.linalg.det(a[np.ix_(rows, cols)].astype(float))))
    return g


@given(small_int_matrices)
def test_snf_reconstructs_and_divides(rows):
    A = Matrix(ZZ, rows)
    S = smith_normal_form(A)
    D = (S.U @ A @ S.V).a
    r = len(S.d)
    assert all(D[i, i] == S.d[i] for i in range(r))
    D2 = np.array(D, dtype=np.int64)
    D2[np.arange(r), np.arange(r)] = 0
    assert not D2.any()
    assert all(S.d[k + 1] % S.d[k] == 0 for k in range(r - 1))
    assert (S.V @ S.Vinv) == Matrix.identity(ZZ, A.cols)


@given(small_int_matrices)
def test_snf_matches_determinantal_divisors(rows):
    # d_1 ⋯ d_k is the gcd of the k×k minors
    A = Matrix(ZZ, rows)
    d = smith_normal_form(A).d
    a = np.array(rows, dtype=np.int64)
    prod = 1
    for k in range(1, min(a.shape) + 1):
        g = _minor_gcd(a, k)
        if k <= len(d):
            prod *= d[k - 1]
            assert g == prod
        else:
            assert g == 0


# kernel_basis / rank


def test_kernel_rank_one_f2():
    K = kernel_basis(Matrix(GF(2), [[1, 1], [1, 1]]))
    assert K.cols == 1
    assert K.tolist() == [[1], [1]]


def test_kernel_identity_q():
    assert kernel_basis(Matrix.identity(QQ, 3)).cols == 0


def test_kernel_zero_2x3():
    assert kernel_basis(Matrix.zeros(QQ, 2, 3)).cols == 3


@pytest.mark.parametrize("ring", [GF(2), GF(3), GF(5), QQ])
@given(data=st.data())
def test_rank_nullity(ring, data):
    m, n = data.draw(st.integers(0, 4)), data.draw(st.integers(0, 4))
    rows = [[data.draw(st.integers(-3, 3)) for _ in range(n)] for _ in range(m)]
    A = Matrix(ring, rows, shape=(m, n))
    K = kernel_basis(A)
    assert rank(A) + K.cols == n
    assert (A @ K).is_zero()
    assert image_basis(A).cols == rank(A)


def test_rank_over_f5_counts_by_enumeration():
    A = Matrix(GF(5), [[1, 2, 3], [2, 4, 1]])
    zeros = sum(
        1 for v in itertools.product(range(5), repeat=3) if not ((A.a.astype(int) @ np.array(v)) % 5).any()
    )
    assert zeros == 5 ** (3 - rank(A))


def test_solve_round_trip():
    A = Matrix(QQ, [[1, 2], [3, 4]])
    B = Matrix(QQ, [[5], [6]])
    assert A @ solve(A, B) == B


# subquotient_dim


def test_subquotient_plane_mod_diagonal():
    F = GF(2)
    assert subquotient_dim(Matrix.identity(F, 2), Matrix(F, [[1], [1]])) == 1


def test_subquotient_equal():
    F = GF(3)
    Z = Matrix(F, [[1, 0], [2, 1], [0, 1]])
    assert subquotient_dim(Z, Z) == 0


def test_subquotient_empty_b():
    F = GF(2)
    Z = Matrix(F, [[1, 0], [0, 1], [1, 1]])
    assert subquotient_dim(Z, Matrix.zeros(F, 3, 0)) == 2


# cohomology_at


def test_cohomology_z_mod_2():
    H = cohomology_at(Matrix(ZZ, [[2]]), Matrix.zeros(ZZ, 0, 1))
    assert H == FgAbelianGroup(0, (2,))
    assert str(H) == "Z/2"


def test_cohomology_zero_maps():
    H = cohomology_at(Matrix.zeros(ZZ, 3, 0), Matrix.zeros(ZZ, 0, 3))
    assert H.rank == 3 and not H.torsion


def test_cohomology_exact_over_f3():
    F = GF(3)
    d_in, d_out = Matrix(F, [[1], [1]]), Matrix(F, [[1, -1]])
    # brute force: kernel of d_out equals image of d_in on F_3^2
    ker = {v for v in itertools.product(range(3), repeat=2) if (v[0] - v[1]) % 3 == 0}
    im = {(t % 3, t % 3) for t in range(3)}
    assert ker == im
    assert cohomology_at(d_in, d_out).is_zero


def test_fg_group_rejects_bad_torsion():
    with pytest.raises(ValueError):
        FgAbelianGroup(0, (4, 2))
    with pytest.raises(ValueError):
        FgAbelianGroup(0, (1,))
