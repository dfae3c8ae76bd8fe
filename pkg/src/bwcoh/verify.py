"""Deterministic property suite behind ``bwcoh verify``.

Every property draws its instances from a generator seeded by the suite seed
and the property name, so reports are reproducible bit for bit.  Each
property function returns one or more :class:`PropertyResult`.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import chaincomplex as cc
from . import diagramcoh as dg
from . import fincat as fc
from . import groupcoh as gc
from . import natsys as ns
from . import oracles
from . import psiring as ps
from . import randgen as rg
from .exactlinalg import GF, QQ, ZZ, Matrix, kernel_basis, rank, smith_normal_form

MODULES = ("exactlinalg", "chaincomplex", "fincat", "natsys", "groupcoh", "diagramcoh", "psiring")
MAX_LISTED_FAILURES = 5


@dataclass
class PropertyResult:
    module: str
    name: str
    cases: int
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "module": self.module,
            "name": self.name,
            "cases": self.cases,
            "failures": len(self.failures),
            "examples": self.failures[:MAX_LISTED_FAILURES],
            "verdict": "PASS" if self.passed else "FAIL",
        }


@dataclass
class VerifyReport:
    scope: str
    seed: int
    results: list[PropertyResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {
            "scope": self.scope,
            "seed": self.seed,
            "properties": [r.to_json() for r in self.results],
            "verdict": "PASS" if self.passed else "FAIL",
        }

    def to_text(self) -> str:
        lines = [
            f"{'PASS' if r.passed else 'FAIL'}  {r.module}.{r.name}  ({r.cases} cases"
            + (f", {len(r.failures)} failing: {r.failures[0]}" if r.failures else "")
            + ")"
            for r in self.results
        ]
        lines.append(f"verdict: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def rng_for(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


# ---------------------------------------------------------------------------
# exactlinalg


def prop_rank_nullity(seed: int, count: int = 40) -> list[PropertyResult]:
    rng = rng_for(seed, "rank_nullity")
    fails = []
    for k in range(count):
        R = rg.random_field(rng, ("f2", "f3", "f5", "q"))
        r, c = (int(x) for x in rng.integers(0, 7, size=2))
        A = rg.random_matrix(rng, R, r, c)
        K = kernel_basis(A)
        if rank(A) + K.cols != c or not (A @ K).is_zero() or rank(A) != rank(A.T):
            fails.append(f"case {k}: {r}x{c} over {R}")
    return [PropertyResult("exactlinalg", "rank_nullity", count, fails)]


def prop_smith_form(seed: int, count: int = 30) -> list[PropertyResult]:
    rng = rng_for(seed, "smith_form")
    fails = []
    for k in range(count):
        r, c = (int(x) for x in rng.integers(1, 6, size=2))
        A = rg.random_matrix(rng, ZZ, r, c, -4, 4)
        S = smith_normal_form(A)
        D = (S.U @ A @ S.V).a
        diag = [int(D[i, i]) for i in range(min(r, c))]
        off = D.copy()
        for i in range(min(r, c)):
            off[i, i] = 0
        nz = [d for d in diag if d]
        ok = (
            not np.any(off != 0)
            and all(d > 0 for d in nz)
            and all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
            and len(nz) == rank(Matrix(QQ, A.a.tolist(), (r, c)))
        )
        if not ok:
            fails.append(f"case {k}: {A.a.tolist()}")
    return [PropertyResult("exactlinalg", "smith_form", count, fails)]


# ---------------------------------------------------------------------------
# chaincomplex


def prop_spectral_sequences(seed: int, count: int = 30) -> list[PropertyResult]:
    """Ranks and explicit subquotients give the same pages, E_2 matches
    iterated cohomology, and E_∞ sums to the total cohomology."""
    rng = rng_for(seed, "spectral_sequences")
    agree, e2, conv = [], [], []
    for k in range(count):
        D = rg.random_double_complex(rng, rg.random_field(rng))
        a = cc.spectral_sequence(D)
        b = cc.spectral_sequence(D, method="subquotient")
        if a.pages != b.pages or a.einf != b.einf:
            agree.append(f"case {k}")
        if a.page(2) != oracles.e2_by_iterated_cohomology(D):
            e2.append(f"case {k}")
        if not a.converges():
            conv.append(f"case {k}: total {a.total}")
    return [
        PropertyResult("chaincomplex", "ranks_match_subquotients", count, agree),
        PropertyResult("chaincomplex", "e2_is_iterated_cohomology", count, e2),
        PropertyResult("chaincomplex", "double_complex_convergence", count, conv),
    ]


# ---------------------------------------------------------------------------
# fincat


def prop_categories(seed: int, count: int = 20) -> list[PropertyResult]:
    rng = rng_for(seed, "categories")
    fact, chains, under = [], [], []
    for k in range(count):
        I = rg.random_category(rng, 6)
        try:
            F = fc.factorization_category(I)
            fc.category_from_json(F.to_json(), max_morphisms=None)
        except fc.CategoryError as e:
            fact.append(f"case {k}: {e}")
        for p in range(5):
            if len(I.chains(p)) != fc.composability_count(I, p):
                chains.append(f"case {k}, p={p}")
        for y in range(I.n_objects):
            U = fc.under_category(I, y)
            i0 = fc.initial_object(U)
            if i0 is None or U.objects[i0] != I.morphisms[I.identity[y]]:
                under.append(f"case {k}, y={I.objects[y]}")
    return [
        PropertyResult("fincat", "factorization_category_is_category", count, fact),
        PropertyResult("fincat", "chain_count_matches_matrix_powers", count, chains),
        PropertyResult("fincat", "under_category_has_initial_identity", count, under),
    ]


# ---------------------------------------------------------------------------
# natsys


def prop_bw_is_complex(seed: int, count: int = 50, n_max: int = 4) -> list[PropertyResult]:
    """``d^n ∘ d^{n-1} = 0`` for ``1 ≤ n ≤ n_max`` on random natural systems."""
    rng = rng_for(seed, "bw_is_complex")
    fails = []
    for k in range(count):
        R = rg.random_field(rng)
        I = rg.random_category(rng, 6)
        D = rg.random_natural_system(rng, I, R, 3)
        prev = ns.bw_differential(D, 0)
        for n in range(1, n_max + 1):
            cur = ns.bw_differential(D, n)
            if not (cur @ prev).is_zero():
                fails.append(f"case {k}: d{n}∘d{n - 1} != 0 over {R} on {I.n_morphisms} morphisms")
                break
            prev = cur
    return [PropertyResult("natsys", "bw_is_complex", count, fails)]


def prop_initial_object_vanishing(seed: int, count: int = 20, n_max: int = 3) -> list[PropertyResult]:
    """With an initial object i_0 and a functor-induced system:
    H^0 = F(i_0) and H^n = 0 for 1 ≤ n ≤ n_max."""
    rng = rng_for(seed, "initial_object_vanishing")
    fails = []
    for k in range(count):
        R = rg.random_field(rng, ("f2", "f3", "q", "z"))
        I = rg.random_category_with_initial(rng, 6)
        F = rg.random_functor(rng, I, R, 3)
        H = ns.bw_cohomology(ns.natural_system_from_functor(F), n_max)
        i0 = fc.initial_object(I)
        if H[0].rank != F.dims[i0] or H[0].torsion or not all(h.is_zero for h in H[1:]):
            fails.append(f"case {k}: {[str(h) for h in H]} with F(i0) of rank {F.dims[i0]}")
    return [PropertyResult("natsys", "initial_object_vanishing", count, fails)]


def _group_modules(R):
    out = []
    for n in (2, 3, 4):
        G = gc.cyclic_group(n)
        out += [(f"C{n} trivial", G, gc.trivial_module(G, R)), (f"C{n} sign", G, gc.sign_module(G, R))]
    S3 = gc.symmetric_group(3)
    out.append(("S3 trivial", S3, gc.trivial_module(S3, R)))
    return out


def prop_one_object_matches_group(seed: int) -> list[PropertyResult]:
    """BW cohomology of a group viewed as a one-object category, with the
    functor system of a module, equals group cohomology."""
    fails = []
    cases = 0
    for R in (GF(2), GF(3)):
        for name, G, M in _group_modules(R):
            I = fc.monoid_category(G.elements, G.table.tolist(), G.unit)
            F = ns.LinearFunctor(I, R, [M.dim], list(M.action))
            bw = [h.rank for h in ns.bw_cohomology(ns.natural_system_from_functor(F), 3)]
            grp = [h.rank for h in gc.group_cohomology(G, M, 3)]
            cases += 1
            if bw != grp:
                fails.append(f"{name} over {R}: {bw} vs {grp}")
    return [PropertyResult("natsys", "one_object_category_matches_group_cohomology", cases, fails)]


# ---------------------------------------------------------------------------
# groupcoh


def prop_periodic_oracle(seed: int, q_max: int = 4) -> list[PropertyResult]:
    """Bar complex against the 2-periodic resolution for C_2, C_3, C_4 with
    trivial and sign modules over F_2 and F_3."""
    fails = []
    cases = 0
    for R in (GF(2), GF(3)):
        for n in (2, 3, 4):
            G = gc.cyclic_group(n)
            for kind, M in (("trivial", gc.trivial_module(G, R)), ("sign", gc.sign_module(G, R))):
                bar = [h.rank for h in gc.group_cohomology(G, M, q_max)]
                per = oracles.periodic_cyclic_cohomology(G, 1, M, q_max)
                cases += 1
                if bar != per:
                    fails.append(f"C{n} {kind} over {R}: bar {bar} vs periodic {per}")
    return [PropertyResult("groupcoh", "bar_matches_periodic_resolution", cases, fails)]


def prop_derivation_count(seed: int) -> list[PropertyResult]:
    """Linear-algebra derivations against brute-force enumeration, and
    against 1-cocycles of the bar complex."""
    fails = []
    cases = 0
    for R in (GF(2), GF(3)):
        for name, G, M in _group_modules(R):
            d = gc.derivations(G, M).cols
            C = gc.bar_complex(G, M, 2)
            z1 = C.dims[1] - rank(C.differential(1))
            brute = oracles.brute_force_derivations(G, M)
            cases += 1
            if R.p**d != brute or d != z1:
                fails.append(f"{name} over {R}: solve {d}, cocycles {z1}, enumeration {brute}")
    return [PropertyResult("groupcoh", "derivations_match_enumeration", cases, fails)]


# ---------------------------------------------------------------------------
# diagramcoh


def prop_h0_derivations(seed: int, count: int = 20) -> list[PropertyResult]:
    """H^0 of the total complex equals the directly solved compatibility
    system (derivations for the comonad convention, invariants for the
    Eilenberg-MacLane one)."""
    rng = rng_for(seed, "h0_derivations")
    der, inv = [], []
    for k in range(count):
        R = GF(int(rng.choice([2, 3])))
        A, M = rg.random_diagram(rng, R, 1, budget=3000)
        h = dg.diagram_cohomology(A, M, 0, "cegarra")[0].rank
        want = oracles.compatible_derivations_dim(M)
        if h != want:
            der.append(f"case {k}: H^0 {h} vs {want}")
        h = dg.diagram_cohomology(A, M, 0, "plain")[0].rank
        want = oracles.compatible_invariants_dim(M)
        if h != want:
            inv.append(f"case {k}: H^0 {h} vs {want}")
    return [
        PropertyResult("diagramcoh", "h0_equals_compatible_derivations", count, der),
        PropertyResult("diagramcoh", "h0_plain_equals_compatible_invariants", count, inv),
    ]


def prop_local_to_global(seed: int, count: int = 25, n_max: int = 4) -> list[PropertyResult]:
    """E_2 of the bicomplex equals BW cohomology of the local systems, and
    E_∞ sums to the cohomology of the total complex; conventions alternate."""
    rng = rng_for(seed, "local_to_global")
    e2, conv = [], []
    for k in range(count):
        convention = dg.CONVENTIONS[k % 2]
        R = GF(int(rng.choice([2, 3])))
        A, M = rg.random_diagram(rng, R, n_max, budget=3000, convention=convention)
        rep = dg.local_to_global(A, M, n_max, convention)
        if not rep.e2_matches:
            e2.append(f"case {k} ({convention}): {rep.e2} vs {rep.e2_bw}")
        if not rep.converges:
            conv.append(f"case {k} ({convention}): E_inf {rep.einf} vs total {rep.total}")
    return [
        PropertyResult("diagramcoh", "e2_equals_bw_of_local_systems", count, e2),
        PropertyResult("diagramcoh", "einf_converges_to_total", count, conv),
    ]


def prop_degenerate_index(seed: int, n_max: int = 3) -> list[PropertyResult]:
    """Terminal index gives group cohomology (shifted by one above degree 0
    in the comonad convention, with H^0 the derivations); a discrete index
    gives the direct sum over objects."""
    term, disc = [], []
    n_term = n_disc = 0
    for R in (GF(2), GF(3)):
        mods = _group_modules(R)
        for name, G, Mg in mods:
            top = n_max if G.order <= 4 else 2
            A = dg.GroupDiagram.constant(fc.terminal_category(), G)
            M = dg.DiagramModule.constant(A, Mg)
            grp = [h.rank for h in gc.group_cohomology(G, Mg, top + 1)]
            plain = [h.rank for h in dg.diagram_cohomology(A, M, top, "plain")]
            ceg = [h.rank for h in dg.diagram_cohomology(A, M, top, "cegarra")]
            want_ceg = [gc.derivations(G, Mg).cols] + grp[2 : top + 2]
            n_term += 1
            if plain != grp[: top + 1] or ceg != want_ceg:
                term.append(f"{name} over {R}: plain {plain} vs {grp[: top + 1]}, comonad {ceg} vs {want_ceg}")
        small = [m for m in mods if m[1].order <= 4]
        for (n1, G1, M1), (n2, G2, M2) in zip(small, small[1:]):
            I = fc.discrete_category(2)
            A = dg.GroupDiagram(I, [G1, G2], [gc.GroupHom.identity(G1), gc.GroupHom.identity(G2)])
            M = dg.DiagramModule(A, R, [M1, M2], [Matrix.identity(R, M1.dim), Matrix.identity(R, M2.dim)])
            for convention in dg.CONVENTIONS:
                got = [h.rank for h in dg.diagram_cohomology(A, M, n_max, convention)]
                parts = []
                for G, Mg in ((G1, M1), (G2, M2)):
                    A1 = dg.GroupDiagram.constant(fc.terminal_category(), G)
                    M1_ = dg.DiagramModule.constant(A1, Mg)
                    parts.append([h.rank for h in dg.diagram_cohomology(A1, M1_, n_max, convention)])
                want = [a + b for a, b in zip(*parts)]
                n_disc += 1
                if got != want:
                    disc.append(f"{n1} ⊔ {n2} over {R} ({convention}): {got} vs {want}")
    return [
        PropertyResult("diagramcoh", "terminal_index_is_group_cohomology", n_term, term),
        PropertyResult("diagramcoh", "discrete_index_is_direct_sum", n_disc, disc),
    ]


# ---------------------------------------------------------------------------
# psiring


def prop_sections_biject(seed: int) -> list[PropertyResult]:
    """Sections of ``R ⋊ M -> R`` pair with ψ-derivations via ``σ(x) = (x, d(x))``."""
    fails = []
    cat = ps.psi_catalogue()
    for name, P in cat:
        rep = ps.pair_sections_with_derivations(P)
        if not rep.ok:
            fails.append(f"{name}: {len(rep.sections)} sections, {len(rep.derivations)} derivations")
    return [PropertyResult("psiring", "sections_biject_with_derivations", len(cat), fails)]


def prop_semidirect_product(seed: int) -> list[PropertyResult]:
    fails = []
    cat = ps.psi_catalogue()
    for name, P in cat:
        try:
            S = ps.semidirect_product(P)
        except ps.PsiError as e:
            fails.append(f"{name}: {e}")
            continue
        msize = P.module.size
        zeros = np.arange(msize)  # indices (0, m)
        if np.any(S.ring.mul[zeros[:, None], zeros[None, :]] != 0):
            fails.append(f"{name}: module part does not square to zero")
    return [PropertyResult("psiring", "semidirect_product_is_psi_ring", len(cat), fails)]


def prop_derivation_system(seed: int) -> list[PropertyResult]:
    """The natural system ``f ↦ Der(R, M^f)`` validates, and its BW H^0 has
    ``p^dim`` elements, one per ψ-derivation."""
    fails = []
    cases = 0
    for name, P in ps.psi_catalogue():
        mods = set(P.module.carrier.moduli)
        if len(mods) > 1 or any(not ps._is_prime(q) for q in mods):
            continue
        p = mods.pop() if mods else 2
        cases += 1
        try:
            D = ps.psi_derivation_system(P)
        except ns.NaturalityViolation as e:
            fails.append(f"{name}: {e}")
            continue
        h0 = ns.bw_cohomology(D, 0)[0].rank
        n = len(ps.psi_derivations(P))
        if p**h0 != n:
            fails.append(f"{name}: H^0 of dimension {h0} but {n} ψ-derivations")
    return [PropertyResult("psiring", "derivation_system_h0_counts_psi_derivations", cases, fails)]


def prop_free_laws(seed: int, count: int = 30) -> list[PropertyResult]:
    """Ψ^1 = id and Ψ^nΨ^m = Ψ^{nm} on all variables of free ψ-rings over
    random monoids with at most five elements and at most three generators."""
    rng = rng_for(seed, "free_laws")
    fails = []
    for k in range(count):
        Mo = ps.random_commutative_monoid(rng, 5)
        ng = int(rng.integers(1, 4))
        F = ps.free_psi_ring(["a", "b", "c"][:ng], Mo)
        bad = [r for r in F.check_axioms() if not r.passed]
        if bad:
            fails.append(f"case {k}: {bad[0].axiom} {bad[0].witness}")
    return [PropertyResult("psiring", "free_psi_ring_laws", count, fails)]


def prop_free_universal(seed: int, count: int = 10) -> list[PropertyResult]:
    """Generator values extend to exactly one ψ-ring map, and ψ-derivations
    out of the free object biject with assignments on generators."""
    rng = rng_for(seed, "free_universal")
    ext_f, der_f = [], []
    cat = ps.psi_catalogue()
    for k in range(count):
        name, P = cat[k % len(cat)]
        S = P.R
        ng = 1 + k % 2
        F = ps.free_psi_ring(["a", "b"][:ng], S.monoid)
        vals = [int(v) for v in rng.integers(S.size, size=ng)]
        phi = ps.FreeExtension(F, S, vals)
        found = ps.extensions_by_search(F, S, vals)
        if not phi.check() or found != [tuple(phi.on_vars)]:
            ext_f.append(f"case {k} ({name}): {len(found)} extensions")
        assigns = ps.free_derivation_assignments(phi, P)
        gens = [F.var_index(g, S.monoid.unit) for g in range(ng)]
        restricted = {tuple(a[v] for v in gens) for a in assigns}
        ok = len(assigns) == P.size**ng and len(restricted) == len(assigns)
        for a in assigns:
            d = ps.FreeDerivation(phi, P, [a[v] for v in gens])
            if list(d.on_vars) != list(a) or not d.check():
                ok = False
                break
        if not ok:
            der_f.append(f"case {k} ({name}): {len(assigns)} derivations for {P.size}^{ng} assignments")
    return [
        PropertyResult("psiring", "free_extension_exists_and_is_unique", count, ext_f),
        PropertyResult("psiring", "free_derivations_biject_with_assignments", count, der_f),
    ]


PROPERTIES: dict[str, list[Callable[[int], list[PropertyResult]]]] = {
    "exactlinalg": [prop_rank_nullity, prop_smith_form],
    "chaincomplex": [prop_spectral_sequences],
    "fincat": [prop_categories],
    "natsys": [prop_bw_is_complex, prop_initial_object_vanishing, prop_one_object_matches_group],
    "groupcoh": [prop_periodic_oracle, prop_derivation_count],
    "diagramcoh": [prop_h0_derivations, prop_local_to_global, prop_degenerate_index],
    "psiring": [prop_sections_biject, prop_semidirect_product, prop_derivation_system, prop_free_laws, prop_free_universal],
}


def run_verify(scope: str = "all", seed: int = 0, progress: Callable[[str], None] | None = None) -> VerifyReport:
    if scope == "all":
        modules = MODULES
    elif scope in PROPERTIES:
        modules = (scope,)
    else:
        raise ValueError(f"unknown verify scope {scope!r}; choose all or one of {', '.join(MODULES)}")
    results = []
    for mod in modules:
        for fn in PROPERTIES[mod]:
            if progress:
                progress(f"{mod}.{fn.__name__[5:]}")
            try:
                results.extend(fn(seed))
            except Exception as e:  # a crashing property is a failing one
                results.append(PropertyResult(mod, fn.__name__[5:], 0, [f"raised {type(e).__name__}: {e}"]))
    return VerifyReport(scope, seed, results)
