import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bwcoh import groupcoh as gc
from bwcoh import natsys as ns
from bwcoh.exactlinalg import GF, QQ, ZZ, FgAbelianGroup, Matrix
from bwcoh.fincat import arrow_category, initial_object, monoid_category, terminal_category
from bwcoh.randgen import random_category, random_category_with_initial, random_functor, random_natural_system

seeds = st.integers(0, 2**32 - 1)


def group_category(G):
    return monoid_category(G.elements, G.table.tolist(), G.unit)


def times_two_arrow():
    I = arrow_category()
    e = Matrix.identity(ZZ, 1)
    F = ns.LinearFunctor(I, ZZ, [1, 1], [e, e, Matrix(ZZ, [[2]])])
    return I, ns.natural_system_from_functor(F)


# natural_system_from_functor


def test_constant_functor_gives_identity_actions():
    I = arrow_category()
    D = ns.natural_system_from_functor(ns.LinearFunctor.constant(I, ZZ, 1))
    e = Matrix.identity(ZZ, 1)
    for a in range(3):
        for f in range(3):
            if I.src[a] == I.dst[f]:
                assert D.push(a, f) == e
            if I.dst[a] == I.src[f]:
                assert D.pull(a, f) == e


def test_arrow_times_two():
    I, D = times_two_arrow()
    a, id0 = I.mor("a"), I.mor("id_0")
    assert D.dims[a] == 1
    assert D.push(a, id0) == Matrix(ZZ, [[2]])


def test_sign_module_functor_is_natural_over_f3():
    G = gc.cyclic_group(2)
    M = gc.sign_module(G, GF(3))
    F = ns.LinearFunctor(group_category(G), GF(3), [1], list(M.action))
    ns.natural_system_from_functor(F).validate()


def test_non_functor_rejected():
    I = group_category(gc.cyclic_group(2))
    with pytest.raises(ns.NaturalityViolation):
        # g acts by 2 over F_5, but g∘g = e forces g^2 = 1
        ns.LinearFunctor(I, GF(5), [1], [Matrix.identity(GF(5), 1), Matrix(GF(5), [[2]])])


# natural_system_from_bifunctor


def test_hom_bifunctor_on_arrow():
    I = arrow_category()
    D = ns.natural_system_from_bifunctor(ns.LinearBifunctor.hom(I, ZZ))
    # |Hom(0, 1)| = 1, so D(a) = Z
    assert D.dims[I.mor("a")] == len(I.hom(0, 1)) == 1


def test_constant_bifunctor_is_constant_system():
    I = arrow_category()
    D = ns.natural_system_from_bifunctor(ns.LinearBifunctor.constant(I, QQ, 2))
    C = ns.constant_system(I, QQ, 2)
    assert D.dims == C.dims
    assert all(ns.bw_differential(D, n) == ns.bw_differential(C, n) for n in range(3))


def test_bad_tables_rejected():
    I = arrow_category()
    a, id0 = I.mor("a"), I.mor("id_0")
    with pytest.raises(ns.NaturalityViolation):
        # pushing along an identity must act as the identity
        ns.NaturalSystem.from_tables(I, GF(2), [1, 1, 1], push={(id0, id0): Matrix(GF(2), [[0]])})
    # a zero action along the only non-identity arrow is fine
    ns.NaturalSystem.from_tables(I, GF(2), [1, 1, 1], push={(a, id0): Matrix(GF(2), [[0]])})


# bw_complex / bw_cohomology


def test_terminal_category_complex():
    D = ns.constant_system(terminal_category(), QQ, 2)
    C = ns.bw_complex(D, 5)
    assert C.dims == (2,) * 6
    e = Matrix.identity(QQ, 2)
    for n, d in enumerate(C.d):
        assert d == (e if n % 2 else Matrix.zeros(QQ, 2, 2))
    assert [h.rank for h in ns.bw_cohomology(D, 4)] == [2, 0, 0, 0, 0]


def test_arrow_initial_object_over_z():
    _, D = times_two_arrow()
    H = ns.bw_cohomology(D, 3)
    assert H[0] == FgAbelianGroup(1, ())
    assert all(h.is_zero for h in H[1:])


@pytest.mark.parametrize(
    "G, ring, kind",
    [
        (gc.cyclic_group(2), ZZ, "trivial"),
        (gc.cyclic_group(4), ZZ, "sign"),
        (gc.cyclic_group(3), GF(3), "trivial"),
        (gc.symmetric_group(3), GF(2), "trivial"),
    ],
)
def test_one_object_category_is_group_cohomology(G, ring, kind):
    M = gc.trivial_module(G, ring) if kind == "trivial" else gc.sign_module(G, ring)
    F = ns.LinearFunctor(group_category(G), ring, [M.dim], list(M.action))
    top = 2 if G.order > 4 else 3
    assert ns.bw_cohomology(ns.natural_system_from_functor(F), top) == gc.group_cohomology(G, M, top)


def test_z2_integral_cohomology():
    G = gc.cyclic_group(2)
    D = ns.constant_system(group_category(G), ZZ, 1)
    H = ns.bw_cohomology(D, 4)
    assert [str(h) for h in H] == ["Z", "0", "Z/2", "0", "Z/2"]


@given(seeds)
def test_bw_squares_to_zero(seed):
    rng = np.random.default_rng(seed)
    R = [GF(2), GF(3), QQ][seed % 3]
    D = random_natural_system(rng, random_category(rng, 6), R, 3)
    for n in range(1, 4):
        assert (ns.bw_differential(D, n) @ ns.bw_differential(D, n - 1)).is_zero()


@given(seeds)
def test_initial_object_vanishing(seed):
    rng = np.random.default_rng(seed)
    I = random_category_with_initial(rng, 6)
    F = random_functor(rng, I, GF(3), 3)
    H = ns.bw_cohomology(ns.natural_system_from_functor(F), 2)
    assert H[0].rank == F.dims[initial_object(I)]
    assert all(h.is_zero for h in H[1:])


def test_flipped_inner_sign_breaks_the_complex(monkeypatch):
    G = gc.cyclic_group(2)
    D = ns.constant_system(group_category(G), GF(3), 1)
    monkeypatch.setattr(ns, "_merge_sign", lambda j: 1)
    assert not (ns.bw_differential(D, 2) @ ns.bw_differential(D, 1)).is_zero()


# file format


def test_from_json_functor_shape():
    I = arrow_category()
    D = ns.natural_system_from_json(I, ZZ, {"functor": {"dims": {"0": 1, "1": 2}, "maps": {"a": [[1], [1]]}}})
    assert D.dims == (1, 2, 2)
    H = ns.bw_cohomology(D, 2)
    assert [h.rank for h in H] == [1, 0, 0]


def test_from_json_explicit_actions():
    I = arrow_category()
    data = {"dims": {"id_0": 1, "id_1": 1, "a": 1}, "push": [{"along": "a", "at": "id_0", "matrix": [[0]]}]}
    D = ns.natural_system_from_json(I, GF(2), data)
    assert D.push(I.mor("a"), I.mor("id_0")).is_zero()


def test_from_json_unknown_morphism():
    with pytest.raises(Exception, match="nope"):
        ns.natural_system_from_json(arrow_category(), ZZ, {"dims": {"nope": 1}})
