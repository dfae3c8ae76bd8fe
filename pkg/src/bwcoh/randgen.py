"""Random instances for property tests and the verification suite.

Every generator takes a ``numpy.random.Generator`` so results depend only on
the seed.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .chaincomplex import DoubleComplex
from .diagramcoh import DiagramModule, GroupDiagram, _estimate_block, bar_degree
from .exactlinalg import (
    Matrix,
    PrimeField,
    QuotientSpace,
    Ring,
    ZZ,
    _zeros_array,
    rank,
    solve,
)
from .fincat import (
    FiniteCategory,
    arrow_category,
    cone,
    discrete_category,
    disjoint_union,
    factorization_category,
    monoid_category,
    opposite,
    poset_category,
    product_category,
    terminal_category,
)
from .groupcoh import (
    FiniteGroup,
    GModule,
    GroupHom,
    all_homs,
    cyclic_group,
    direct_product,
    general_linear_group,
    module_from_hom,
    trivial_module,
)
from .natsys import LinearFunctor, NaturalSystem, natural_system_from_factorization_functor, natural_system_from_functor


class GenerationFailed(RuntimeError):
    pass


# --------------------------------------------------------------------------
# Scalars and matrices
# --------------------------------------------------------------------------


def random_matrix(rng: np.random.Generator, ring: Ring, rows: int, cols: int, lo: int = -2, hi: int = 2) -> Matrix:
    if isinstance(ring, PrimeField):
        a = rng.integers(0, ring.p, size=(rows, cols))
        return Matrix(ring, a.astype(np.int64))
    a = rng.integers(lo, hi + 1, size=(rows, cols))
    return Matrix(ring, a.tolist(), (rows, cols))


def random_invertible(rng: np.random.Generator, ring: Ring, n: int) -> tuple[Matrix, Matrix]:
    """Random invertible matrix and its inverse.  Over ZZ a product of
    elementary unimodular operations."""
    if n == 0:
        z = Matrix.zeros(ring, 0, 0)
        return z, z
    if ring is ZZ:
        P = np.eye(n, dtype=np.int64)
        for _ in range(2 * n):
            i, j = rng.choice(n, size=2, replace=n < 2) if n > 1 else (0, 0)
            if i != j:
                P[i] += int(rng.integers(-1, 2)) * P[j]
        perm = rng.permutation(n)
        P = P[perm]
        Pm = Matrix(ZZ, P.tolist(), (n, n))
        # inverse via solving over QQ is exact for unimodular P
        from .exactlinalg import QQ

        inv = solve(Matrix(QQ, P.tolist(), (n, n)), Matrix.identity(QQ, n))
        return Pm, Matrix(ZZ, [[int(x) for x in row] for row in inv.tolist()], (n, n))
    while True:
        P = random_matrix(rng, ring, n, n)
        if rank(P) == n:
            return P, solve(P, Matrix.identity(ring, n))


def random_field(rng: np.random.Generator, choices=("f2", "f3", "q")):
    from .exactlinalg import ring_from_tag

    return ring_from_tag(str(rng.choice(list(choices))))


# --------------------------------------------------------------------------
# Categories
# --------------------------------------------------------------------------


def _monoid(elements, table, unit=0) -> FiniteCategory:
    return monoid_category(elements, table, unit)


MONOID_CATALOGUE = {
    "C1": (["1"], [[0]]),
    "C2": (["1", "g"], [[0, 1], [1, 0]]),
    "C3": (["1", "g", "g2"], [[0, 1, 2], [1, 2, 0], [2, 0, 1]]),
    "idem": (["1", "t"], [[0, 1], [1, 1]]),
    "nil2": (["1", "a", "0"], [[0, 1, 2], [1, 2, 2], [2, 2, 2]]),
    "trunc": (["1", "a", "a2"], [[0, 1, 2], [1, 2, 2], [2, 2, 2]]),
    "cyc3to1": (["1", "a", "a2"], [[0, 1, 2], [1, 2, 1], [2, 1, 2]]),
    # left-zero band with a unit: ab = a
    "leftzero": (["1", "a", "b"], [[0, 1, 2], [1, 1, 1], [2, 2, 2]]),
    # all self-maps of {0, 1}: id, swap, const0, const1; composition g∘f
    "T2": (["id", "sw", "c0", "c1"], [[0, 1, 2, 3], [1, 0, 3, 2], [2, 2, 2, 2], [3, 3, 3, 3]]),
}


def catalogue_monoid(name: str) -> FiniteCategory:
    el, tab = MONOID_CATALOGUE[name]
    return _monoid(el, tab)


def random_poset(rng: np.random.Generator, n: int, density: float = 0.5) -> FiniteCategory:
    rel = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < density]
    perm = rng.permutation(n)
    return poset_category(n, [(int(perm[a]), int(perm[b])) for a, b in rel])


def random_category(rng: np.random.Generator, max_morphisms: int = 6, kinds: Sequence[str] | None = None) -> FiniteCategory:
    """A small category from a mix of posets, monoids, cones, disjoint
    unions and products, with at most ``max_morphisms`` morphisms."""
    kinds = list(kinds or ["poset", "monoid", "cone", "union", "product"])
    for _ in range(200):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "poset":
            C = random_poset(rng, int(rng.integers(1, 4)))
        elif kind == "monoid":
            C = catalogue_monoid(str(rng.choice(sorted(MONOID_CATALOGUE))))
        elif kind == "cone":
            base = random_category(rng, max(max_morphisms - 2, 1), ["poset", "monoid"])
            C = cone(base)
        elif kind == "union":
            a = random_category(rng, max(max_morphisms // 2, 1), ["poset", "monoid"])
            b = random_category(rng, max(max_morphisms // 2, 1), ["poset", "monoid"])
            C = disjoint_union([a, b])
        elif kind == "product":
            C = product_category(arrow_category(), catalogue_monoid(str(rng.choice(["C1", "C2", "idem"]))))
        else:
            raise ValueError(kind)
        if C.n_morphisms <= max_morphisms:
            return C
    raise GenerationFailed("no category within the morphism bound")


def random_category_with_initial(rng: np.random.Generator, max_morphisms: int = 6) -> FiniteCategory:
    """Categories with an initial object: cones, posets with a least element,
    and products of the arrow category with a thin category."""
    for _ in range(200):
        kind = int(rng.integers(3))
        if kind == 0:
            base = random_category(rng, max(max_morphisms - 2, 1), ["poset", "monoid", "union"])
            C = cone(base)
        elif kind == 1:
            n = int(rng.integers(1, 4))
            rel = [(0, b) for b in range(1, n)] + [
                (a, b) for a in range(1, n) for b in range(a + 1, n) if rng.random() < 0.5
            ]
            C = poset_category(n, rel)
        else:
            C = product_category(arrow_category(), random_poset(rng, 2, 1.0))
        if C.n_morphisms <= max_morphisms:
            return C
    raise GenerationFailed("no category with an initial object within the bound")


# --------------------------------------------------------------------------
# Functors and natural systems
# --------------------------------------------------------------------------


def representable(I: FiniteCategory, ring: Ring, x: int) -> LinearFunctor:
    """``y -> ring^{Hom(x, y)}`` with α acting by postcomposition."""
    homs = [I.hom(x, y) for y in range(I.n_objects)]
    pos = [{h: k for k, h in enumerate(hs)} for hs in homs]
    maps = []
    for a in range(I.n_morphisms):
        y, z = I.src[a], I.dst[a]
        m = _zeros_array(ring, len(homs[z]), len(homs[y]))
        for k, h in enumerate(homs[y]):
            m[pos[z][int(I.table[a, h])], k] = 1
        maps.append(Matrix(ring, m))
    return LinearFunctor(I, ring, [len(h) for h in homs], maps, check=False)


def direct_sum(funcs: Sequence[LinearFunctor]) -> LinearFunctor:
    from .exactlinalg import block_diag

    I, ring = funcs[0].base, funcs[0].ring
    dims = [sum(F.dims[x] for F in funcs) for x in range(I.n_objects)]
    maps = [block_diag(ring, [F.maps[a] for F in funcs]) for a in range(I.n_morphisms)]
    return LinearFunctor(I, ring, dims, maps, check=False)


def quotient_functor(F: LinearFunctor, gens: Sequence[tuple[int, np.ndarray]]) -> LinearFunctor:
    """Quotient by the subfunctor generated by vectors ``v`` at objects ``x``."""
    I, ring = F.base, F.ring
    span = [[] for _ in range(I.n_objects)]
    for x, v in gens:
        vm = Matrix(ring, np.asarray(v).reshape(-1, 1), (F.dims[x], 1))
        for b in range(I.n_morphisms):
            if I.src[b] == x:
                span[I.dst[b]].append(F.maps[b] @ vm)
    quots = []
    for y in range(I.n_objects):
        Z = Matrix.identity(ring, F.dims[y])
        if span[y]:
            from .exactlinalg import hstack

            B = hstack(ring, span[y])
        else:
            B = Matrix.zeros(ring, F.dims[y], 0)
        quots.append(QuotientSpace(Z, B))
    dims = [Q.dim for Q in quots]
    maps = []
    for a in range(I.n_morphisms):
        y, z = I.src[a], I.dst[a]
        maps.append(quots[z].coords(F.maps[a] @ quots[y].reps))
    return LinearFunctor(I, ring, dims, maps, check=False)


def change_basis(rng: np.random.Generator, F: LinearFunctor) -> LinearFunctor:
    I, ring = F.base, F.ring
    P = [random_invertible(rng, ring, d) for d in F.dims]
    maps = [P[I.dst[a]][0] @ F.maps[a] @ P[I.src[a]][1] for a in range(I.n_morphisms)]
    return LinearFunctor(I, ring, F.dims, maps, check=False)


def random_functor(rng: np.random.Generator, I: FiniteCategory, ring: Ring, max_dim: int = 3) -> LinearFunctor:
    """Random functor ``I -> free modules`` with values of rank ``<= max_dim``.

    Built as a direct sum of representables, cut down by the subfunctor
    generated by random vectors (fields only), then conjugated by random
    invertible matrices.  Falls back to a constant functor."""
    for _ in range(60):
        k = int(rng.integers(1, 3))
        parts = [representable(I, ring, int(rng.integers(I.n_objects))) for _ in range(k)]
        if rng.random() < 0.3:
            parts.append(LinearFunctor.constant(I, ring, 1))
        F = direct_sum(parts)
        if ring.is_field and rng.random() < 0.7:
            gens = []
            for _ in range(int(rng.integers(0, 3))):
                x = int(rng.integers(I.n_objects))
                if F.dims[x]:
                    gens.append((x, random_matrix(rng, ring, F.dims[x], 1).a.ravel()))
            F = quotient_functor(F, gens)
        if max(F.dims) <= max_dim:
            F = change_basis(rng, F)
            F.validate()
            return F
    return LinearFunctor.constant(I, ring, int(rng.integers(1, max_dim + 1)))


def random_natural_system(rng: np.random.Generator, I: FiniteCategory, ring: Ring, max_dim: int = 3) -> NaturalSystem:
    """Functor-induced, bifunctor-like, or a general representation of the
    factorization category."""
    kind = int(rng.integers(3))
    if kind == 0:
        return natural_system_from_functor(random_functor(rng, I, ring, max_dim))
    if kind == 1:
        # B(a, b) = G(a) ⊗ F(b) with G contravariant
        F = random_functor(rng, I, ring, max_dim)
        G = random_functor(rng, opposite(I), ring, max_dim)
        from .exactlinalg import kron

        dims = [G.dims[I.src[f]] * F.dims[I.dst[f]] for f in range(I.n_morphisms)]
        if max(dims) > max_dim:
            return natural_system_from_functor(F)
        return NaturalSystem(
            I,
            ring,
            dims,
            lambda a, f: kron(Matrix.identity(ring, G.dims[I.src[f]]), F.maps[a]),
            lambda b, f: kron(G.maps[b], Matrix.identity(ring, F.dims[I.dst[f]])),
        )
    FI = factorization_category(I)
    R = random_functor(rng, FI, ring, max_dim)
    return natural_system_from_factorization_functor(I, ring, FI, R.dims, R.maps)


# --------------------------------------------------------------------------
# Double complexes
# --------------------------------------------------------------------------


def random_double_complex(
    rng: np.random.Generator, ring: Ring, pmax: int = 3, qmax: int = 3, pieces: int = 6, conjugate: bool = True
) -> DoubleComplex:
    """Direct sum of dots, squares and zigzags placed at random, then
    conjugated cell by cell with random invertible matrices."""
    cells: dict[tuple[int, int], int] = {}
    gens = []  # position of each generator
    h_edges, v_edges = [], []

    def inside(p, q):
        return 0 <= p <= pmax and 0 <= q <= qmax

    def new(p, q):
        gens.append((p, q))
        return len(gens) - 1

    for _ in range(pieces):
        kind = int(rng.integers(3))
        p0, q0 = int(rng.integers(pmax + 1)), int(rng.integers(qmax + 1))
        if kind == 0:
            new(p0, q0)
        elif kind == 1:
            if not (inside(p0 + 1, q0 + 1)):
                new(p0, q0)
                continue
            a, b, c, d = new(p0, q0), new(p0 + 1, q0), new(p0, q0 + 1), new(p0 + 1, q0 + 1)
            h_edges += [(a, b), (c, d)]
            v_edges += [(a, c), (b, d)]
        else:
            # s_k at (p0+k, q0-k), t_k at (p0+k+1, q0-k); s_k ->h t_k, s_{k+1} ->v t_k
            length = int(rng.integers(1, 4))
            verts = []
            if rng.random() < 0.5 and inside(p0, q0 + 1):
                verts.append(("t", -1))
            for k in range(length):
                if not inside(p0 + k, q0 - k):
                    break
                verts.append(("s", k))
                if not inside(p0 + k + 1, q0 - k):
                    break
                verts.append(("t", k))
            if not verts or verts[0][0] == "t" and len(verts) == 1:
                continue
            ids = {}
            for kind_v, k in verts:
                pos = (p0 + k, q0 - k) if kind_v == "s" else (p0 + k + 1, q0 - k)
                ids[(kind_v, k)] = new(*pos)
            for kind_v, k in verts:
                if kind_v != "s":
                    continue
                if ("t", k) in ids:
                    h_edges.append((ids[("s", k)], ids[("t", k)]))
                if ("t", k - 1) in ids:
                    v_edges.append((ids[("s", k)], ids[("t", k - 1)]))
    for g in gens:
        cells[g] = cells.get(g, 0) + 1
    order = {}
    counter: dict[tuple[int, int], int] = {}
    for k, g in enumerate(gens):
        order[k] = counter.get(g, 0)
        counter[g] = order[k] + 1
    dims = [[cells.get((p, q), 0) for q in range(qmax + 1)] for p in range(pmax + 1)]
    dh_a = {}
    dv_a = {}
    for (a, b) in h_edges:
        p, q = gens[a]
        m = dh_a.setdefault((p, q), _zeros_array(ring, dims[p + 1][q], dims[p][q]))
        m[order[b], order[a]] = 1
    for (a, b) in v_edges:
        p, q = gens[a]
        m = dv_a.setdefault((p, q), _zeros_array(ring, dims[p][q + 1], dims[p][q]))
        m[order[b], order[a]] = 1
    dh = {k: Matrix(ring, v) for k, v in dh_a.items()}
    dv = {k: Matrix(ring, v) for k, v in dv_a.items()}
    if conjugate:
        P = {(p, q): random_invertible(rng, ring, dims[p][q]) for p in range(pmax + 1) for q in range(qmax + 1)}
        dh = {(p, q): P[(p + 1, q)][0] @ m @ P[(p, q)][1] for (p, q), m in dh.items()}
        dv = {(p, q): P[(p, q + 1)][0] @ m @ P[(p, q)][1] for (p, q), m in dv.items()}
    return DoubleComplex(ring, dims, dh, dv)


# --------------------------------------------------------------------------
# Group diagrams
# --------------------------------------------------------------------------

_GROUPS = {
    1: [lambda: cyclic_group(1)],
    2: [lambda: cyclic_group(2)],
    3: [lambda: cyclic_group(3)],
    4: [lambda: cyclic_group(4), lambda: direct_product(cyclic_group(2), cyclic_group(2))],
}


def random_group(rng: np.random.Generator, max_order: int = 4) -> FiniteGroup:
    orders = [k for k in _GROUPS if k <= max_order]
    n = int(rng.choice(orders))
    makers = _GROUPS[n]
    return makers[int(rng.integers(len(makers)))]()


_hom_cache: dict[tuple, list] = {}


def _homs(G: FiniteGroup, H: FiniteGroup) -> list[GroupHom]:
    key = (G.elements, G.table.tobytes(), H.elements, H.table.tobytes())
    if key not in _hom_cache:
        _hom_cache[key] = all_homs(G, H)
    return [GroupHom(G, H, h.images, check=False) for h in _hom_cache[key]]


def _backtrack_functor(rng, I: FiniteCategory, candidates, compose, identity):
    """Pick one candidate per morphism so that composition is preserved.

    ``candidates[m]`` lists options, ``compose(x, y)`` composes chosen values
    (x after y) and ``identity[m]`` is the forced value for identities."""
    M = I.n_morphisms
    order = [m for m in range(M) if not I.is_identity(m)]
    choice: dict[int, object] = {m: identity[m] for m in range(M) if I.is_identity(m)}

    def ok(m):
        for g in range(M):
            for f in range(M):
                h = int(I.table[g, f])
                if h < 0 or m not in (g, f, h):
                    continue
                if g in choice and f in choice and h in choice:
                    if not _equal(compose(choice[g], choice[f]), choice[h]):
                        return False
        return True

    def go(k):
        if k == len(order):
            return True
        m = order[k]
        opts = list(candidates[m])
        for j in rng.permutation(len(opts)):
            choice[m] = opts[int(j)]
            if ok(m) and go(k + 1):
                return True
        del choice[m]
        return False

    if not go(0):
        return None
    return [choice[m] for m in range(M)]


def _equal(a, b) -> bool:
    if isinstance(a, GroupHom):
        return bool(np.array_equal(a.images, b.images))
    return a == b


def random_group_diagram(rng: np.random.Generator, I: FiniteCategory, max_order: int = 4) -> GroupDiagram:
    for _ in range(50):
        groups = [random_group(rng, max_order) for _ in range(I.n_objects)]
        cands = [_homs(groups[I.src[m]], groups[I.dst[m]]) for m in range(I.n_morphisms)]
        ident = {I.identity[x]: GroupHom.identity(groups[x]) for x in range(I.n_objects)}
        maps = _backtrack_functor(rng, I, cands, lambda g, f: g @ f, ident)
        if maps is not None:
            return GroupDiagram(I, groups, maps)
    raise GenerationFailed("no functorial choice of homomorphisms")


_gl_cache: dict[tuple[int, int], tuple] = {}


def random_module(rng: np.random.Generator, G: FiniteGroup, ring: PrimeField, dim: int) -> GModule:
    """Module of the given rank through a random homomorphism ``G -> GL_dim``."""
    if dim == 0:
        return trivial_module(G, ring, 0)
    key = (ring.p, dim)
    if key not in _gl_cache:
        _gl_cache[key] = general_linear_group(ring, dim)
    GL, mats = _gl_cache[key]
    homs = _homs(G, GL)
    rho = homs[int(rng.integers(len(homs)))]
    return module_from_hom(G, rho, mats)


def equivariant_maps(A: GModule, B: GModule, along: GroupHom) -> list[Matrix]:
    """Every linear map ``f: A -> B`` with ``f(g·a) = φ(g)·f(a)``, by enumeration."""
    ring = A.ring
    p = ring.p
    out = []
    for entries in itertools.product(range(p), repeat=A.dim * B.dim):
        f = Matrix(ring, np.array(entries, dtype=np.int64).reshape(B.dim, A.dim) if A.dim * B.dim else _zeros_array(ring, B.dim, A.dim))
        if all(f @ A.action[g] == B.action[along(g)] @ f for g in range(A.group.order)):
            out.append(f)
    return out


def random_diagram_module(
    rng: np.random.Generator, A: GroupDiagram, ring: PrimeField, max_dim: int = 2, trivial_bias: float = 0.3
) -> DiagramModule:
    I = A.index
    for _ in range(50):
        mods = []
        for x in range(I.n_objects):
            d = int(rng.integers(1, max_dim + 1))
            if rng.random() < trivial_bias:
                mods.append(trivial_module(A.groups[x], ring, d))
            else:
                mods.append(random_module(rng, A.groups[x], ring, d))
        cands = [
            equivariant_maps(mods[I.src[m]], mods[I.dst[m]], A.maps[m]) if not I.is_identity(m) else []
            for m in range(I.n_morphisms)
        ]
        # prefer nonzero maps so the diagram is not split
        for m in range(I.n_morphisms):
            nz = [c for c in cands[m] if not c.is_zero()]
            if nz and rng.random() < 0.8:
                cands[m] = nz
        ident = {I.identity[x]: Matrix.identity(ring, mods[x].dim) for x in range(I.n_objects)}
        maps = _backtrack_functor(rng, I, cands, lambda g, f: g @ f, ident)
        if maps is not None:
            return DiagramModule(A, ring, mods, maps)
    raise GenerationFailed("no functorial choice of equivariant maps")


def diagram_size(A: GroupDiagram, M: DiagramModule, n_max: int, convention: str = "plain") -> int:
    """Largest total-complex dimension in degrees ``<= n_max + 1``."""
    T = n_max + 1
    best = 0
    for n in range(T + 1):
        tot = sum(_estimate_block(A, M, p, bar_degree(n - p, convention)) for p in range(n + 1))
        best = max(best, tot)
    return best


def random_diagram(
    rng: np.random.Generator,
    ring: PrimeField,
    n_max: int = 4,
    budget: int = 3000,
    max_objects: int = 3,
    max_order: int = 4,
    max_dim: int = 2,
    convention: str = "plain",
) -> tuple[GroupDiagram, DiagramModule]:
    """Random diagram of groups and module whose truncated bicomplex stays
    below ``budget`` in every total degree."""
    for _ in range(200):
        I = random_category(rng, 5)
        if I.n_objects > max_objects:
            continue
        A = random_group_diagram(rng, I, max_order)
        M = random_diagram_module(rng, A, ring, max_dim)
        if diagram_size(A, M, n_max, convention) <= budget:
            return A, M
    raise GenerationFailed("no diagram within the size budget")
