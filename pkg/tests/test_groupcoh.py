import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bwcoh import groupcoh as gc
from bwcoh import oracles
from bwcoh.exactlinalg import GF, ZZ, Matrix, rank
from bwcoh.randgen import random_group, random_module

F2, F3 = GF(2), GF(3)


def ranks(H):
    return [h.rank for h in H]


# groups and homomorphisms


def test_group_axioms_enforced():
    with pytest.raises(gc.GroupError):
        # x has no inverse
        table = [["e", "e", "e"], ["e", "x", "x"], ["x", "e", "x"], ["x", "x", "x"]]
        gc.group_from_json({"elements": ["e", "x"], "table": table, "unit": "e"})


def test_nonmultiplicative_map_rejected():
    C2, C3 = gc.cyclic_group(2), gc.cyclic_group(3)
    with pytest.raises(gc.GroupError):
        gc.GroupHom(C3, C2, [0, 1, 1])


def test_all_homs_counts():
    # |Hom(C_m, C_n)| = gcd(m, n)
    assert len(gc.all_homs(gc.cyclic_group(4), gc.cyclic_group(6))) == 2
    assert len(gc.all_homs(gc.symmetric_group(3), gc.cyclic_group(2))) == 2


# restrict_module


def test_restrict_along_identity():
    G = gc.cyclic_group(4)
    M = gc.sign_module(G, F3)
    R = gc.restrict_module(gc.GroupHom.identity(G), M)
    assert R.action == M.action


def test_restrict_along_trivial_map():
    G, H = gc.cyclic_group(3), gc.cyclic_group(4)
    R = gc.restrict_module(gc.GroupHom.trivial(G, H), gc.sign_module(H, F3))
    assert all(m == Matrix.identity(F3, 1) for m in R.action)


def test_restrict_sign_to_subgroup():
    C2, C4 = gc.cyclic_group(2), gc.cyclic_group(4)
    incl = gc.GroupHom(C2, C4, [0, 2])
    M = gc.sign_module(C4, F3)
    assert M.action[1] == Matrix(F3, [[-1]])
    R = gc.restrict_module(incl, M)
    assert R.action[1] == Matrix(F3, [[1]])


# bar_complex / group_cohomology


@given(st.integers(0, 2**32 - 1))
def test_h0_is_fixed_points(seed):
    rng = np.random.default_rng(seed)
    G = random_group(rng, 4)
    M = random_module(rng, G, F3, 2)
    assert gc.group_cohomology(G, M, 0)[0].rank == oracles.fixed_point_dim(M) == M.fixed_points().cols


def test_c2_trivial_f2():
    G = gc.cyclic_group(2)
    assert ranks(gc.group_cohomology(G, gc.trivial_module(G, F2), 4)) == [1] * 5


def test_c3_trivial_f2_vanishes():
    G = gc.cyclic_group(3)
    M = gc.trivial_module(G, F2)
    assert ranks(gc.group_cohomology(G, M, 4)) == [1, 0, 0, 0, 0]
    assert oracles.periodic_cyclic_cohomology(G, 1, M, 4) == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("ring", [F2, F3])
@pytest.mark.parametrize("kind", ["trivial", "sign", "regular"])
def test_cyclic_against_periodic_resolution(n, ring, kind):
    G = gc.cyclic_group(n)
    M = {"trivial": gc.trivial_module, "sign": gc.sign_module, "regular": gc.regular_module}[kind](G, ring)
    assert ranks(gc.group_cohomology(G, M, 4)) == oracles.periodic_cyclic_cohomology(G, 1, M, 4)


def test_integral_c4_sign():
    G = gc.cyclic_group(4)
    H = gc.group_cohomology(G, gc.sign_module(G, ZZ), 3)
    assert [str(h) for h in H] == ["0", "Z/2", "0", "Z/2"]


def test_klein_four_f2():
    V = gc.direct_product(gc.cyclic_group(2), gc.cyclic_group(2))
    # Poincaré series 1/(1-t)^2 over F_2
    assert ranks(gc.group_cohomology(V, gc.trivial_module(V, F2), 3)) == [1, 2, 3, 4]


def test_regular_module_is_coinduced():
    # Shapiro: the regular module has no higher cohomology
    G = gc.symmetric_group(3)
    assert ranks(gc.group_cohomology(G, gc.regular_module(G, F2), 2)) == [1, 0, 0]


def test_bar_tuple_cap():
    G = gc.symmetric_group(3)
    with pytest.raises(gc.CapExceeded):
        gc.bar_complex(G, gc.trivial_module(G, F2), 4, max_tuples=100)


# derivations


def test_derivations_trivial_action():
    G = gc.cyclic_group(2)
    M = gc.trivial_module(G, F2)
    assert gc.derivations(G, M).cols == 1
    assert oracles.brute_force_derivations(G, M) == 2


def test_derivations_zero_module():
    G = gc.cyclic_group(3)
    assert gc.derivations(G, gc.trivial_module(G, F2, 0)).cols == 0


def test_derivations_trivial_group():
    G = gc.trivial_group()
    assert gc.derivations(G, gc.trivial_module(G, F3, 2)).cols == 0


@given(st.integers(0, 2**32 - 1))
def test_derivations_match_enumeration(seed):
    rng = np.random.default_rng(seed)
    G = random_group(rng, 4)
    M = random_module(rng, G, F2, 2)
    d = gc.derivations(G, M).cols
    assert 2**d == oracles.brute_force_derivations(G, M)
    C = gc.bar_complex(G, M, 2)
    assert d == C.dims[1] - rank(C.differential(1))


# modules


def test_module_from_json_generators():
    G = gc.cyclic_group(4)
    M = gc.module_from_json({"dim": 1, "action": {G.elements[1]: [[-1]]}}, G, ZZ)
    assert M.action == gc.sign_module(G, ZZ).action


def test_inconsistent_module_rejected():
    G = gc.cyclic_group(2)
    with pytest.raises(gc.ModuleError):
        gc.module_from_json({"dim": 1, "action": {G.elements[1]: [[2]]}}, G, GF(5))
