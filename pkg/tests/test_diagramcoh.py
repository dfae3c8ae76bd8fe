import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bwcoh import diagramcoh as dg
from bwcoh import groupcoh as gc
from bwcoh import natsys as ns
from bwcoh import oracles
from bwcoh.exactlinalg import GF, Matrix
from bwcoh.fincat import arrow_category, discrete_category, terminal_category
from bwcoh.randgen import random_category_with_initial, random_diagram, random_diagram_module

F2, F3 = GF(2), GF(3)
seeds = st.integers(0, 2**32 - 1)


def ranks(H):
    return [h.rank for h in H]


def constant(I, G, Mg):
    A = dg.GroupDiagram.constant(I, G)
    return A, dg.DiagramModule.constant(A, Mg)


def sum_over_objects(groups, mods, n, convention):
    parts = []
    for G, Mg in zip(groups, mods):
        parts.append(ranks(dg.diagram_cohomology(*constant(terminal_category(), G, Mg), n, convention)))
    return [sum(x) for x in zip(*parts)]


# diagram_bicomplex / diagram_cohomology


@pytest.mark.parametrize("ring", [F2, F3])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_terminal_index_is_group_cohomology(ring, n):
    G = gc.cyclic_group(n)
    Mg = gc.sign_module(G, ring)
    A, M = constant(terminal_category(), G, Mg)
    grp = ranks(gc.group_cohomology(G, Mg, 4))
    assert ranks(dg.diagram_cohomology(A, M, 3, "plain")) == grp[:4]
    # comonad convention: derivations, then a shift by one
    assert ranks(dg.diagram_cohomology(A, M, 3, "cegarra")) == [gc.derivations(G, Mg).cols] + grp[2:5]


def test_terminal_index_bicomplex_has_one_column_of_interest():
    G = gc.cyclic_group(3)
    A, M = constant(terminal_category(), G, gc.trivial_module(G, F3))
    D = dg.diagram_bicomplex(A, M, 2, 2)
    bar = gc.bar_complex(G, gc.trivial_module(G, F3), 2)
    assert [D.dim(0, q) for q in range(3)] == list(bar.dims)
    assert all(D.v(0, q) == bar.d[q] for q in range(2))


@pytest.mark.parametrize("convention", dg.CONVENTIONS)
def test_discrete_index_is_direct_sum(data_dir, convention):
    A, M = dg.diagram_from_json(json.loads((data_dir / "discrete_c2_c3.json").read_text()), F2)
    got = ranks(dg.diagram_cohomology(A, M, 3, convention))
    assert got == sum_over_objects(A.groups, M.modules, 3, convention)


def test_arrow_constant_c2_against_local_systems(golden_dir):
    A, M = dg.diagram_from_json(json.loads((golden_dir / "arrow_c2.bundle.json").read_text()), F2)
    assert A.index.n_morphisms == 3
    for convention in dg.CONVENTIONS:
        shift = int(convention == "cegarra")
        # hand-assembled E_2 from BW cohomology of each local system
        e2 = [[0] * (4 - p) for p in range(4)]
        for q in range(4):
            H = ns.bw_cohomology(dg.local_system(A, M, q + shift, convention), 3 - q)
            for p in range(4 - q):
                e2[p][q] = H[p].rank
        rep = dg.local_to_global(A, M, 3, convention)
        assert rep.e2 == e2
        # the arrow has an initial object, so only column 0 survives
        assert all(v == 0 for col in e2[1:] for v in col)
        assert rep.total == [1, 1, 1, 1]
    golden = json.loads((golden_dir / "arrow_c2.plain.json").read_text())
    assert [c["group"] for c in golden["cohomology"]] == [{"base": "F2", "rank": 1, "torsion": []}] * 4


@settings(max_examples=15)
@given(seeds)
def test_h0_matches_compatibility_systems(seed):
    rng = np.random.default_rng(seed)
    A, M = random_diagram(rng, F2, 1, budget=2000)
    assert dg.diagram_cohomology(A, M, 0, "cegarra")[0].rank == oracles.compatible_derivations_dim(M)
    assert dg.diagram_cohomology(A, M, 0, "plain")[0].rank == oracles.compatible_invariants_dim(M)


def test_convention_required_to_be_known():
    A, M = constant(terminal_category(), gc.cyclic_group(2), gc.trivial_module(gc.cyclic_group(2), F2))
    with pytest.raises(dg.ConventionMismatch):
        dg.diagram_cohomology(A, M, 1, "eilenberg")


def test_cap_on_total_dimension():
    G = gc.symmetric_group(3)
    A, M = constant(arrow_category(), G, gc.trivial_module(G, F2))
    with pytest.raises(dg.CapExceeded):
        dg.diagram_cohomology(A, M, 3, "plain", caps={"tot_dim": 50})


def test_non_equivariant_module_map_rejected():
    I = arrow_category()
    G = gc.cyclic_group(2)
    A = dg.GroupDiagram.constant(I, G)
    triv, sign = gc.trivial_module(G, F3), gc.sign_module(G, F3)
    e = Matrix.identity(F3, 1)
    with pytest.raises(dg.DiagramError):
        dg.DiagramModule(A, F3, [triv, sign], [e, e, e])


# local_system


def test_plain_degree_zero_is_fixed_points():
    rng = np.random.default_rng(5)
    A, M = random_diagram(rng, F3, 2)
    D = dg.local_system(A, M, 0, "plain")
    assert list(D.dims) == [oracles.fixed_point_dim(M.pulled_back(f)) for f in range(A.index.n_morphisms)]


def test_cegarra_degree_zero_is_zero_system():
    A, M = random_diagram(np.random.default_rng(6), F2, 2)
    assert set(dg.local_system(A, M, 0, "cegarra").dims) == {0}


def test_cegarra_degree_one_is_derivations():
    A, M = random_diagram(np.random.default_rng(7), F2, 2)
    D = dg.local_system(A, M, 1, "cegarra")
    I = A.index
    want = [gc.derivations(A.groups[I.src[f]], M.pulled_back(f)).cols for f in range(I.n_morphisms)]
    assert list(D.dims) == want
    D.validate()


@settings(max_examples=10)
@given(seeds, st.sampled_from(dg.CONVENTIONS), st.integers(0, 3))
def test_local_systems_are_natural(seed, convention, q):
    A, M = random_diagram(np.random.default_rng(seed), F2, 3, budget=1500)
    dg.local_system(A, M, q, convention).validate()


# local_to_global


@settings(max_examples=8)
@given(seeds)
def test_initial_object_with_constant_groups_concentrates_e2(seed):
    rng = np.random.default_rng(seed)
    I = random_category_with_initial(rng, 4)
    G = gc.cyclic_group(int(rng.integers(2, 4)))
    A = dg.GroupDiagram.constant(I, G)
    M = random_diagram_module(rng, A, F2, 1)
    rep = dg.local_to_global(A, M, 2, "plain")
    assert rep.ok
    assert all(v == 0 for col in rep.e2[1:] for v in col)


@pytest.mark.parametrize("convention", dg.CONVENTIONS)
def test_discrete_index_collapses(data_dir, convention):
    A, M = dg.diagram_from_json(json.loads((data_dir / "discrete_c2_c3.json").read_text()), F2)
    rep = dg.local_to_global(A, M, 3, convention)
    assert rep.e2 == rep.einf
    assert all(v == 0 for col in rep.e2[1:] for v in col)
    assert rep.e2[0] == sum_over_objects(A.groups, M.modules, 3, convention)


@settings(max_examples=10)
@given(seeds, st.sampled_from(dg.CONVENTIONS))
def test_random_diagrams_converge(seed, convention):
    A, M = random_diagram(np.random.default_rng(seed), F2, 3, budget=1500, convention=convention)
    rep = dg.local_to_global(A, M, 3, convention)
    assert rep.e2_matches and rep.converges
    assert rep.total == ranks(dg.diagram_cohomology(A, M, 3, convention))


# file format


def test_bundle_identity_defaults():
    data = {"index": "arrow", "groups": {"constant": {"cyclic": 2}}, "module": {"modules": {"constant": {"dim": 1}}}}
    A, M = dg.diagram_from_json(data, F2)
    assert all(m == Matrix.identity(F2, 1) for m in M.maps)


def test_bundle_missing_map_between_different_groups():
    data = {
        "index": "arrow",
        "groups": {"0": {"cyclic": 2}, "1": {"cyclic": 4}},
        "module": {"modules": {"constant": {"dim": 1}}},
    }
    with pytest.raises(dg.DiagramError):
        dg.diagram_from_json(data, F2)
