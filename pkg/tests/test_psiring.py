import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bwcoh import natsys as ns
from bwcoh import psiring as ps

seeds = st.integers(0, 2**32 - 1)
CATALOGUE = ps.psi_catalogue()
IDS = [name for name, _ in CATALOGUE]


def brute_derivations(P):
    """Every set map R -> M that is additive, Leibniz and ψ-equivariant."""
    R, M = P.R.ring, P.module
    out = set()
    for d in itertools.product(range(M.size), repeat=R.size):
        d = np.array(d)
        if np.any(d[R.add] != M.add[d[:, None], d[None, :]]):
            continue
        leib = M.add[M.act[np.arange(R.size)[:, None], d[None, :]], M.act[np.arange(R.size)[None, :], d[:, None]]]
        if np.any(d[R.mul] != leib):
            continue
        if all(np.array_equal(d[P.R.psi[m]], P.psi[m][d]) for m in range(P.R.monoid.order)):
            out.add(tuple(int(v) for v in d))
    return out


def brute_sections(P):
    """Set maps R -> R⋊M that are ψ-ring maps and split the projection."""
    S = ps.semidirect_product(P)
    R, msize = P.R.ring, P.module.size
    out = set()
    for tail in itertools.product(range(msize), repeat=R.size):
        s = np.array([x * msize + a for x, a in enumerate(tail)])
        if s[R.one] != S.ring.one:
            continue
        if np.any(s[R.add] != S.ring.add[s[:, None], s[None, :]]):
            continue
        if np.any(s[R.mul] != S.ring.mul[s[:, None], s[None, :]]):
            continue
        if all(np.array_equal(s[P.R.psi[m]], S.psi[m][s]) for m in range(P.R.monoid.order)):
            out.add(tuple(int(v) for v in s))
    return out


def f2_regular():
    return ps.regular_module(ps.trivial_psi(ps.zmod(2)))


def dual_projection():
    """F_2[ε] with Ψ^t(a + bε) = a, acting on itself."""
    return dict(CATALOGUE)["F2[ε], Ψ^t kills ε, M=regular"]


# monoids


def test_monoid_axioms_checked():
    with pytest.raises(ps.MonoidAxiomFailure):
        ps.ActionMonoid(["1", "x"], [[0, 1], [1, 0]], 1)
    with pytest.raises(ps.MonoidAxiomFailure):
        # x·x = 1 but x·1 = 1 breaks the unit law
        ps.ActionMonoid(["1", "x"], [[0, 1], [0, 0]], 0)


@given(seeds)
def test_random_monoids_are_commutative_monoids(seed):
    Mo = ps.random_commutative_monoid(np.random.default_rng(seed), 5)
    assert 1 <= Mo.order <= 5
    T = Mo.table
    assert np.array_equal(T, T.T)
    r = range(Mo.order)
    assert all(T[T[a, b], c] == T[a, T[b, c]] for a in r for b in r for c in r)


# rings and ψ-rings


def test_ring_from_json_forms():
    assert ps.ring_from_json({"zmod": 6}).size == 6
    assert ps.ring_from_json({"dual": 3}).size == 9
    assert ps.ring_from_json({"f4": True}).size == 4


def test_planted_composition_failure_names_witness(data_dir):
    data = json.loads((data_dir / "bad_psi.json").read_text())
    P = ps.psi_ring_from_json(data, check=False)
    res = {r.axiom: r for r in P.check_axioms()}
    assert not res["composition"].passed
    assert "(n, m, x) = (t, t, v)" in res["composition"].witness
    with pytest.raises(ps.PsiAxiomFailure):
        ps.psi_ring_from_json(data)


@pytest.mark.parametrize("name, P", CATALOGUE, ids=IDS)
def test_catalogue_axioms(name, P):
    assert all(r.passed for r in P.R.check_axioms())
    assert all(r.passed for r in P.check_axioms())


# semidirect_product


def test_semidirect_f2_square():
    P = f2_regular()
    S = ps.semidirect_product(P)
    pair = lambda x, a: x * P.module.size + a
    assert S.ring.mul[pair(1, 1), pair(1, 1)] == pair(1, 0)


def test_semidirect_with_zero_module_is_r():
    R = dual_projection().R
    S = ps.semidirect_product(ps.zero_module(R))
    assert S.size == R.size
    assert np.array_equal(S.ring.mul, R.ring.mul)
    assert all(np.array_equal(a, b) for a, b in zip(S.psi, R.psi))


TINY = [c for c in CATALOGUE if c[1].R.size * c[1].size <= 16]


@pytest.mark.parametrize("name, P", TINY, ids=[n for n, _ in TINY])
def test_semidirect_multiplicativity_exhaustive(name, P):
    S = ps.semidirect_product(P)
    for m in range(S.monoid.order):
        f = S.psi[m]
        assert np.array_equal(f[S.ring.mul], S.ring.mul[f[:, None], f[None, :]])


# derivations and sections


def test_f2_only_zero_derivation():
    P = f2_regular()
    assert ps.psi_derivations(P) == [(0, 0)]
    assert brute_derivations(P) == {(0, 0)}


def test_zero_module_one_derivation_one_section():
    P = ps.zero_module(dual_projection().R)
    assert len(ps.psi_derivations(P)) == 1
    assert len(ps.sections_of_projection(P)) == 1


def test_f2_one_section_paired_with_zero():
    P = f2_regular()
    rep = ps.pair_sections_with_derivations(P)
    assert rep.ok and len(rep.sections) == 1
    assert rep.derivations[rep.pairing[0][1]] == (0, 0)
    assert set(rep.sections) == brute_sections(P)


SMALL = [c for c in CATALOGUE if c[1].size ** c[1].R.size <= 2**16]


@pytest.mark.parametrize("name, P", SMALL, ids=[n for n, _ in SMALL])
def test_derivations_and_sections_against_brute_force(name, P):
    assert set(ps.psi_derivations(P)) == brute_derivations(P)
    assert set(ps.sections_of_projection(P)) == brute_sections(P)
    assert ps.pair_sections_with_derivations(P).ok


def test_enumeration_bound():
    P = dict(CATALOGUE)["F4 with Frobenius, M=F4"]
    with pytest.raises(ps.TooLarge):
        ps.psi_derivations(P, bound=2)


# twist_module


def test_twist_by_unit_is_original():
    P = dual_projection()
    M1 = ps.twist_module(P, P.R.monoid.unit)
    assert np.array_equal(M1.action_mats, P.module.action_mats)


def test_trivial_psi_gives_equal_twists():
    P = ps.regular_module(ps.trivial_psi(ps.dual_numbers(2), ps.idempotent_monoid()))
    a, b = (ps.twist_module(P, m).action_mats for m in range(2))
    assert np.array_equal(a, b)


def test_projection_twist_kills_complement():
    P = dual_projection()
    t = P.R.monoid.el("t")
    # restriction: ε acts through Ψ^t(ε) = 0
    Mt = ps.twist_module(P, t)
    assert not Mt.action_mats[1].any()
    # literal: everything acting on ker Ψ^t = span(ε) is zero, so 1 no longer acts as 1
    lit = ps.twisted_action(P, t, "literal")
    assert not lit[:, :, 1].any()
    with pytest.raises(ps.ModuleAxiomFailure):
        ps.twist_module(P, t, "literal")


# derivation natural system


def test_derivation_system_trivial_monoid():
    P = f2_regular()
    D = ps.psi_derivation_system(P)
    assert D.dims == (0,)


def test_derivation_system_constant_when_psi_trivial():
    P = ps.regular_module(ps.trivial_psi(ps.dual_numbers(2), ps.cyclic_monoid(2)))
    D = ps.psi_derivation_system(P)
    # d(ε) is free since ε·d(ε) + d(ε)·ε = 0 in characteristic 2
    assert D.dims == (2, 2)
    for u in range(2):
        assert D.push(u, 0).a.tolist() == D.pull(u, 0).a.tolist() == [[1, 0], [0, 1]]


PRIME_EXPONENT = [
    c for c in CATALOGUE
    if len(set(c[1].module.carrier.moduli)) <= 1 and all(ps._is_prime(q) for q in c[1].module.carrier.moduli)
]


@pytest.mark.parametrize("name, P", PRIME_EXPONENT, ids=[n for n, _ in PRIME_EXPONENT])
def test_derivation_system_h0_counts_psi_derivations(name, P):
    D = ps.psi_derivation_system(P)
    p = P.module.carrier.moduli[0] if P.module.carrier.k else 2
    assert p ** ns.bw_cohomology(D, 0)[0].rank == len(ps.psi_derivations(P))


# free ψ-rings


def test_free_on_trivial_monoid():
    F = ps.free_psi_ring(["a"], ps.trivial_monoid())
    assert len(F.variables) == 1
    a = F.var("a")
    assert F.psi(F.monoid.unit, a) == a


def test_free_on_idempotent():
    Mo = ps.idempotent_monoid()
    F = ps.free_psi_ring(["a"], Mo)
    a, at = F.var("a"), F.var("a", "t")
    assert F.psi("t", a) == at
    assert F.psi("t", at) == at
    assert F.fmt(at) == "a^(t)"


@given(seeds)
def test_free_laws_on_random_monoids(seed):
    rng = np.random.default_rng(seed)
    Mo = ps.random_commutative_monoid(rng, 3)
    F = ps.free_psi_ring(["a", "b"], Mo)
    for v in range(len(F.variables)):
        x = {((v, 1),): 1}
        assert F.psi(Mo.unit, x) == x
        for n, m in itertools.product(range(Mo.order), repeat=2):
            assert F.psi(n, F.psi(m, x)) == F.psi(Mo.mul(n, m), x)
    assert all(r.passed for r in F.check_axioms())


def test_degree_cap():
    F = ps.free_psi_ring(["a"], ps.trivial_monoid(), degree_cap=2)
    a = F.var("a")
    with pytest.raises(ps.DegreeCapExceeded):
        F.mul(F.mul(a, a), a)


def test_free_derivations_biject_with_module_elements():
    P = dual_projection()
    S = P.R
    F = ps.free_psi_ring(["a"], S.monoid)
    for val in range(S.size):
        phi = ps.FreeExtension(F, S, [val])
        assert phi.check()
        assert ps.extensions_by_search(F, S, [val]) == [tuple(phi.on_vars)]
        assigns = ps.free_derivation_assignments(phi, P)
        assert len(assigns) == P.size
        gen = F.var_index(0, S.monoid.unit)
        assert sorted(a[gen] for a in assigns) == list(range(P.size))


def test_free_from_json(data_dir):
    F = ps.free_psi_ring_from_json(json.loads((data_dir / "free_idempotent.json").read_text()))
    assert [F.var_name(v) for v in range(len(F.variables))] == ["a", "a^(t)"]
