import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bwcoh import groupcoh as gc
from bwcoh import oracles
from bwcoh.chaincomplex import (
    CochainComplex,
    DoubleComplex,
    NotAField,
    cohomology_dims,
    complex_cohomology,
    double_complex_from_json,
    spectral_sequence,
    total_complex,
)
from bwcoh.exactlinalg import GF, QQ, ZZ, FgAbelianGroup, Matrix, NotAComplex, cohomology_at
from bwcoh.randgen import random_double_complex

F2 = GF(2)


def M(rows, ring=F2):
    return Matrix(ring, rows)


# total_complex


def test_single_column_is_vertical_complex():
    D = DoubleComplex(F2, [[1, 2, 1]], {}, {(0, 0): M([[1], [0]]), (0, 1): M([[0, 1]])})
    T = total_complex(D)
    assert T.dims == (1, 2, 1)
    assert T.d[0] == M([[1], [0]]) and T.d[1] == M([[0, 1]])


def test_single_row_is_horizontal_complex():
    D = DoubleComplex(F2, [[1], [2], [1]], {(0, 0): M([[1], [1]]), (1, 0): M([[1, 1]])}, {})
    T = total_complex(D)
    assert T.dims == (1, 2, 1)
    assert T.d[0] == M([[1], [1]]) and T.d[1] == M([[1, 1]])


def test_zero_square():
    D = DoubleComplex(F2, [[1, 1], [1, 1]], {}, {})
    T = total_complex(D)
    assert T.dims == (1, 2, 1)
    assert all(d.is_zero() for d in T.d)
    assert cohomology_dims(T) == [1, 2, 1]


def test_total_sign_rule_gives_complex_over_q():
    # one commuting square, identity maps everywhere: Tot must square to zero
    e = Matrix.identity(QQ, 1)
    D = DoubleComplex(QQ, [[1, 1], [1, 1]], {(0, 0): e, (0, 1): e}, {(0, 0): e, (1, 0): e})
    T = total_complex(D)
    assert (T.d[1] @ T.d[0]).is_zero()
    assert cohomology_dims(T) == [0, 0, 0]


def test_noncommuting_square_rejected():
    e = Matrix.identity(F2, 1)
    with pytest.raises(NotAComplex):
        DoubleComplex(F2, [[1, 1], [1, 1]], {(0, 0): e}, {(0, 0): e, (1, 0): e})


# spectral_sequence


def _exact_above_bottom_row():
    # columns are <b_p, x_p> -> <y_p> with dv(x_p) = y_p; dh(x_0) = x_1, dh(y_0) = y_1
    dv = {(0, 0): M([[0, 1]]), (1, 0): M([[0, 1]])}
    dh = {(0, 0): M([[0, 0], [0, 1]]), (0, 1): M([[1]])}
    return DoubleComplex(F2, [[2, 1], [2, 1]], dh, dv)


def test_exact_columns_collapse_to_bottom_row():
    S = spectral_sequence(_exact_above_bottom_row())
    assert S.page(1) == [[1, 0], [1, 0]]
    assert S.page(2) == S.einf == [[1, 0], [1, 0]]
    # bottom row of vertical cycles is b_0 --0--> b_1
    assert S.total[:2] == [1, 1]


def test_zero_differentials_pages_are_dims():
    dims = [[1, 2], [0, 3], [2, 1]]
    S = spectral_sequence(DoubleComplex(F2, dims, {}, {}))
    assert S.page(2) == dims and S.einf == dims


def test_folded_two_column_example():
    # F_2^2 -[[1,1]]-> F_2 in rows 0 and 1, vertical maps the identity
    I2, I1 = Matrix.identity(F2, 2), Matrix.identity(F2, 1)
    h = M([[1, 1]])
    D = DoubleComplex(F2, [[2, 2], [1, 1]], {(0, 0): h, (0, 1): h}, {(0, 0): I2, (1, 0): I1})
    S = spectral_sequence(D)
    T = total_complex(D)
    direct = [cohomology_at(T.d[n - 1] if n else Matrix.zeros(F2, T.dims[0], 0),
                            T.d[n] if n < len(T.d) else Matrix.zeros(F2, 0, T.dims[n])).rank
              for n in range(len(T.dims))]
    assert S.total[: len(direct)] == direct == [0, 0, 0]
    assert all(S.diagonal_sum(S.einf, n) == direct[n] for n in range(len(direct)))
    assert S.page(1) == [[0, 0], [0, 0]]


def test_spectral_needs_a_field():
    with pytest.raises(NotAField):
        spectral_sequence(DoubleComplex(ZZ, [[1]], {}, {}))


def test_zigzag_from_json_has_a_d2():
    D = double_complex_from_json(
        {
            "dims": [[0, 1], [1, 1], [1, 0]],
            "dv": [{"p": 1, "q": 0, "matrix": [[1]]}],
            "dh": [{"p": 0, "q": 1, "matrix": [[1]]}, {"p": 1, "q": 0, "matrix": [[1]]}],
        },
        F2,
    )
    S = spectral_sequence(D)
    assert S.page(2) == [[0, 1], [0, 0], [1, 0]]
    assert S.page(3) == S.einf == [[0, 0], [0, 0], [0, 0]]
    assert S.converges()


@pytest.mark.parametrize("ring", [GF(2), GF(3), QQ])
@given(seed=st.integers(0, 2**32 - 1))
def test_random_bicomplex_pages(ring, seed):
    D = random_double_complex(np.random.default_rng(seed), ring)
    S = spectral_sequence(D)
    assert S.pages == spectral_sequence(D, method="subquotient").pages
    assert S.page(2) == oracles.e2_by_iterated_cohomology(D)
    assert S.converges()
    assert S.total == cohomology_dims(total_complex(D))[: len(S.total)]


# complex_cohomology


def test_multiplication_by_two():
    H = complex_cohomology(CochainComplex(ZZ, [1, 1], [Matrix(ZZ, [[2]])]))
    assert H[0].is_zero and H[1] == FgAbelianGroup(0, (2,))


def test_zero_differentials_give_cochains():
    C = CochainComplex(ZZ, [2, 0, 3], [Matrix.zeros(ZZ, 0, 2), Matrix.zeros(ZZ, 3, 0)])
    assert [h.rank for h in complex_cohomology(C)] == [2, 0, 3]


def test_periodic_cyclic_complex():
    G = gc.cyclic_group(2)
    Mod = gc.trivial_module(G, F2)
    # the top degree of a truncated complex is not reduced, so go one further
    assert cohomology_dims(gc.bar_complex(G, Mod, 5))[:5] == [1] * 5
    assert oracles.periodic_cyclic_cohomology(G, 1, Mod, 4) == [1] * 5


def test_non_complex_rejected():
    with pytest.raises(NotAComplex):
        CochainComplex(F2, [1, 1, 1], [M([[1]]), M([[1]])])
