import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bwcoh import psiring as ps
from bwcoh.fincat import (
    AssocViolation,
    CapExceeded,
    CategoryError,
    IdentityViolation,
    arrow_category,
    category_from_json,
    chains,
    composability_count,
    discrete_category,
    factorization_category,
    initial_object,
    monoid_category,
    opposite,
    terminal_category,
    terminal_object,
    under_category,
    validate_category,
)
from bwcoh.randgen import random_category

seeds = st.integers(0, 2**32 - 1)
C2 = monoid_category(["e", "g"], [[0, 1], [1, 0]], 0)


# validate_category


def test_terminal_is_valid():
    T = validate_category(["*"], [("1", "*", "*")], {"*": "1"}, [("1", "1", "1")])
    assert (T.n_objects, T.n_morphisms) == (1, 1)


def test_c2_monoid_is_valid():
    assert C2.n_morphisms == 2
    g = C2.mor("g")
    assert C2.compose(g, g) == C2.mor("e")


def test_planted_associativity_failure_names_triple(data_dir):
    data = json.loads((data_dir / "bad_assoc.json").read_text())
    with pytest.raises(AssocViolation, match=r"\(f, g, h\) = \(x, y, x\)"):
        category_from_json(data)


def test_missing_identity():
    with pytest.raises(IdentityViolation):
        validate_category(["a"], [("f", "a", "a")], {}, [])


def test_missing_composite_rejected():
    with pytest.raises(CategoryError):
        validate_category(["*"], [("1", "*", "*"), ("x", "*", "*")], {"*": "1"}, [("1", "1", "1")])


def test_morphism_cap():
    with pytest.raises(CapExceeded):
        validate_category(["a"], [("1", "a", "a")], {"a": "1"}, [], max_morphisms=0)


# factorization_category


def test_factorization_of_terminal():
    F = factorization_category(terminal_category())
    assert (F.n_objects, F.n_morphisms) == (1, 1)


def test_factorization_of_arrow():
    I = arrow_category()
    F = factorization_category(I)
    assert F.n_objects == 3
    id0, a = I.mor("id_0"), I.mor("a")
    # (α, id_0): id_0 -> α since α ∘ id_0 ∘ id_0 = α
    k = F.pair_index[(id0, a, id0)]
    assert (F.src[k], F.dst[k]) == (id0, a)
    # exhaustive count of commuting squares α∘f∘β = g
    squares = sum(
        1
        for f, al, be in itertools.product(range(3), repeat=3)
        if I.src[al] == I.dst[f] and I.dst[be] == I.src[f]
    )
    assert F.n_morphisms == squares


def test_factorization_of_monoid_has_one_object_per_element():
    Mo = ps.truncated_power_monoid(2, 3, 2)
    assert factorization_category(Mo.category()).n_objects == len(Mo.elements)


@given(seeds)
def test_factorization_category_is_valid(seed):
    I = random_category(np.random.default_rng(seed), 5)
    F = factorization_category(I)
    assert F.n_objects == I.n_morphisms
    # validation happens on construction; identities map to themselves
    assert all(F.src[F.identity[f]] == f == F.dst[F.identity[f]] for f in range(F.n_objects))


# chains


def test_terminal_chains():
    ch = chains(terminal_category(), 2)
    assert len(ch) == 1 and ch[0].arrows == (0, 0)


def test_arrow_one_chains():
    assert len(chains(arrow_category(), 1)) == 3


def test_c2_two_chains():
    assert len(chains(C2, 2)) == 4


@given(seeds, st.integers(0, 4))
def test_chain_count_matches_matrix_powers(seed, p):
    I = random_category(np.random.default_rng(seed), 6)
    ch = chains(I, p)
    assert len(ch) == composability_count(I, p)
    for c in ch:
        assert all(I.dst[c.arrows[k + 1]] == I.src[c.arrows[k]] for k in range(p - 1))


# initial / terminal objects


def test_initial_objects():
    assert initial_object(arrow_category()) == 0
    assert initial_object(C2) is None
    assert initial_object(discrete_category(2)) is None
    assert terminal_object(arrow_category()) == 1


def test_opposite_swaps_initial_and_terminal():
    I = arrow_category()
    assert initial_object(opposite(I)) == terminal_object(I)


# under_category


def test_under_terminal():
    U = under_category(terminal_category(), 0)
    assert (U.n_objects, U.n_morphisms) == (1, 1)


def test_under_arrow_at_source():
    U = under_category(arrow_category(), "0")
    assert U.objects == ("id_0", "a")
    assert U.n_morphisms == 3
    assert initial_object(U) == 0 and terminal_object(U) == 1


@given(seeds)
def test_under_category_has_identity_as_initial_object(seed):
    I = random_category(np.random.default_rng(seed), 6)
    for y in range(I.n_objects):
        U = under_category(I, y)
        assert initial_object(U) == U.obj(I.morphisms[I.identity[y]])
