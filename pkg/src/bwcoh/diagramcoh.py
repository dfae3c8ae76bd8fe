"""Cohomology of diagrams of finite groups and the local-to-global spectral sequence.

For a diagram ``A: I -> groups`` and a diagram module M, the bicomplex has

    C^{p,q} = ⊕_{p-chains c, composite f: s -> t} C^e(A(s), f^*M(t))

where ``C^e`` are bar cochains and ``e`` is the bar degree of row q.  The
horizontal differential is the Baues-Wirsching coboundary of the natural
system ``f -> C^e(A(s), f^*M(t))`` (push = postcompose with M(α), pull =
precompose with A(β)); the vertical one is the bar differential blockwise.

Two degree conventions are supported:

* ``"plain"``: row q holds ``C^q``; the local systems are ``H^q(A(s), f^*M(t))``.
* ``"cegarra"``: row q holds ``C^{q+1}``, so the column complexes start with
  ``C^1`` and compute derivations in degree 0.  The local systems are
  ``0, Der, H^2, H^3, ...`` in degrees ``0, 1, 2, 3, ...`` and the E_2 term
  in position (p, q) is BW cohomology with values in the degree ``q+1`` system.

Only blocks with ``p + q <= n_max + 1`` are built; the quotient by the
omitted blocks agrees with the full bicomplex on every page in total degree
``<= n_max``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .chaincomplex import DoubleComplex, SpectralPages, spectral_sequence, total_complex, complex_cohomology
from .exactlinalg import (
    FgAbelianGroup,
    LinAlgError,
    Matrix,
    QuotientSpace,
    Ring,
    _zeros_array,
    kernel_basis,
    kron,
)
from .fincat import FiniteCategory, arrow_category, category_from_json, discrete_category, terminal_category
from .groupcoh import (
    FiniteGroup,
    GModule,
    GroupHom,
    bar_differential,
    group_from_json,
    hom_from_json,
    module_from_json,
    restrict_module,
)
from .natsys import NaturalityViolation, NaturalSystem, bw_cohomology

CONVENTIONS = ("plain", "cegarra")

DEFAULT_CAPS = {
    "objects": 4,
    "morphisms": 16,
    "group_order": 8,
    "module_dim": 4,
    "total_degree": 6,
    "tot_dim": 20000,
}


class DiagramError(ValueError):
    pass


class ConventionMismatch(ValueError):
    pass


class CapExceeded(ValueError):
    pass


def _check_convention(convention: str) -> str:
    if convention not in CONVENTIONS:
        raise ConventionMismatch(f"unknown degree convention {convention!r}; use 'plain' or 'cegarra'")
    return convention


def bar_degree(q: int, convention: str) -> int:
    """Bar-cochain degree held in row q."""
    return q + 1 if _check_convention(convention) == "cegarra" else q


class GroupDiagram:
    """Functor from ``index`` to finite groups: ``groups[i]`` per object and a
    homomorphism ``maps[m]`` per morphism."""

    def __init__(self, index: FiniteCategory, groups: Sequence[FiniteGroup], maps: Sequence[GroupHom], check: bool = True):
        self.index = index
        self.groups = tuple(groups)
        self.maps = tuple(maps)
        self._composite_cache: dict[int, GroupHom] = {}
        if check:
            self.validate()

    def validate(self):
        I = self.index
        if len(self.groups) != I.n_objects or len(self.maps) != I.n_morphisms:
            raise DiagramError("need one group per object and one homomorphism per morphism")
        for m in range(I.n_morphisms):
            h = self.maps[m]
            if h.src is not self.groups[I.src[m]] or h.dst is not self.groups[I.dst[m]]:
                if h.src.order != self.groups[I.src[m]].order or h.dst.order != self.groups[I.dst[m]].order:
                    raise DiagramError(f"A({I.morphisms[m]}) has the wrong source or target group")
            h._validate()
        for x in range(I.n_objects):
            if not np.array_equal(self.maps[I.identity[x]].images, np.arange(self.groups[x].order)):
                raise DiagramError(f"A(id_{I.objects[x]}) is not the identity")
        for g, f in itertools.product(range(I.n_morphisms), repeat=2):
            h = I.table[g, f]
            if h >= 0 and not np.array_equal(self.maps[g].images[self.maps[f].images], self.maps[h].images):
                raise DiagramError(f"A does not preserve {I.morphisms[g]}∘{I.morphisms[f]}")

    @classmethod
    def constant(cls, I: FiniteCategory, G: FiniteGroup) -> "GroupDiagram":
        e = GroupHom.identity(G)
        return cls(I, [G] * I.n_objects, [e] * I.n_morphisms)


class DiagramModule:
    """``modules[i]`` is an ``A(i)``-module; ``maps[m]`` is the linear map
    ``M(src m) -> M(dst m)``, required to be functorial and equivariant."""

    def __init__(self, diagram: GroupDiagram, ring: Ring, modules: Sequence[GModule], maps: Sequence[Matrix], check: bool = True):
        self.diagram = diagram
        self.ring = ring
        self.modules = tuple(modules)
        self.maps = tuple(maps)
        if check:
            self.validate()

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(M.dim for M in self.modules)

    def validate(self):
        A = self.diagram
        I = A.index
        if len(self.modules) != I.n_objects or len(self.maps) != I.n_morphisms:
            raise DiagramError("need one module per object and one map per morphism")
        for x, M in enumerate(self.modules):
            if M.group.order != A.groups[x].order or M.ring != self.ring:
                raise DiagramError(f"module at {I.objects[x]} is over the wrong group or ring")
        for m in range(I.n_morphisms):
            s, t = I.src[m], I.dst[m]
            if self.maps[m].shape != (self.modules[t].dim, self.modules[s].dim):
                raise DiagramError(f"M({I.morphisms[m]}) has the wrong shape")
        for x in range(I.n_objects):
            if self.maps[I.identity[x]] != Matrix.identity(self.ring, self.modules[x].dim):
                raise DiagramError(f"M(id_{I.objects[x]}) is not the identity")
        for g, f in itertools.product(range(I.n_morphisms), repeat=2):
            h = I.table[g, f]
            if h >= 0 and self.maps[g] @ self.maps[f] != self.maps[h]:
                raise DiagramError(f"M does not preserve {I.morphisms[g]}∘{I.morphisms[f]}")
        for m in range(I.n_morphisms):
            s, t = I.src[m], I.dst[m]
            phi = A.maps[m]
            for g in range(A.groups[s].order):
                lhs = self.maps[m] @ self.modules[s].action[g]
                rhs = self.modules[t].action[phi(g)] @ self.maps[m]
                if lhs != rhs:
                    raise DiagramError(
                        f"M({I.morphisms[m]}) is not equivariant at {A.groups[s].elements[g]}"
                    )

    @classmethod
    def constant(cls, A: GroupDiagram, M: GModule) -> "DiagramModule":
        I = A.index
        e = Matrix.identity(M.ring, M.dim)
        return cls(A, M.ring, [M] * I.n_objects, [e] * I.n_morphisms)

    def pulled_back(self, f: int) -> GModule:
        """``f^*M(t)`` as a module over ``A(s)`` for ``f: s -> t``."""
        I = self.diagram.index
        return restrict_module(self.diagram.maps[f], self.modules[I.dst[f]])


# --------------------------------------------------------------------------
# Cochain-level natural systems
# --------------------------------------------------------------------------


def _precompose_matrix(ring: Ring, phi: GroupHom, e: int) -> np.ndarray:
    """Matrix of ``c -> c∘φ^e`` from functions on ``dst^e`` to ``src^e``."""
    n_src, n_dst = phi.src.order, phi.dst.order
    if e == 0:
        out = _zeros_array(ring, 1, 1)
        out[0, 0] = 1
        return out
    tuples = np.array(list(itertools.product(range(n_src), repeat=e)), dtype=np.int64)
    img = phi.images[tuples]
    col = np.zeros(len(tuples), dtype=np.int64)
    for j in range(e):
        col = col * n_dst + img[:, j]
    out = _zeros_array(ring, n_src**e, n_dst**e)
    out[np.arange(len(tuples)), col] = 1
    return out


class _CochainSystem:
    """Natural system ``f -> C^e(A(s), f^*M(t))`` at the cochain level."""

    def __init__(self, M: DiagramModule, e: int):
        self.M = M
        self.e = e
        A = M.diagram
        I = A.index
        ring = M.ring
        self.dims = [A.groups[I.src[f]].order ** e * M.modules[I.dst[f]].dim for f in range(I.n_morphisms)]
        self._pre: dict[int, np.ndarray] = {}

        def push(a, f):
            n = A.groups[I.src[f]].order ** e
            return kron(Matrix.identity(ring, n), M.maps[a])

        def pull(b, f):
            S = self._pre.get(b)
            if S is None:
                S = _precompose_matrix(ring, A.maps[b], e)
                self._pre[b] = S
            m = M.modules[I.dst[f]].dim
            return kron(Matrix(ring, S, _trusted=True), Matrix.identity(ring, m))

        self.system = NaturalSystem(I, ring, self.dims, push, pull, check=False)
        self._bar: dict[int, Matrix] = {}

    def bar(self, f: int) -> Matrix:
        """Bar differential ``C^e -> C^{e+1}`` at the composite f."""
        d = self._bar.get(f)
        if d is None:
            A = self.M.diagram
            I = A.index
            d = bar_differential(A.groups[I.src[f]], self.M.pulled_back(f), self.e)
            self._bar[f] = d
        return d


def _estimate_block(A: GroupDiagram, M: DiagramModule, p: int, e: int) -> int:
    I = A.index
    return sum(A.groups[c.head].order ** e * M.modules[c.tail].dim for c in I.chains(p))


def diagram_bicomplex(
    A: GroupDiagram,
    M: DiagramModule,
    pmax: int,
    qmax: int,
    convention: str = "plain",
    total_max: int | None = None,
    caps: Mapping[str, int] | None = None,
    check: bool = True,
) -> DoubleComplex:
    """Bicomplex with blocks ``p <= pmax``, ``q <= qmax`` and, if given,
    ``p + q <= total_max``; omitted blocks are zero."""
    _check_convention(convention)
    caps = {**DEFAULT_CAPS, **(caps or {})}
    I = A.index
    ring = M.ring
    T = pmax + qmax if total_max is None else total_max

    def keep(p, q):
        return p <= pmax and q <= qmax and p + q <= T

    dims = [[0] * (qmax + 1) for _ in range(pmax + 1)]
    for p in range(pmax + 1):
        for q in range(qmax + 1):
            if keep(p, q):
                dims[p][q] = _estimate_block(A, M, p, bar_degree(q, convention))
    for n in range(T + 1):
        tot = sum(dims[p][n - p] for p in range(pmax + 1) if 0 <= n - p <= qmax)
        if tot > caps["tot_dim"]:
            raise CapExceeded(f"total degree {n} has dimension {tot}, above the cap of {caps['tot_dim']}")

    systems: dict[int, _CochainSystem] = {}

    def system(e):
        if e not in systems:
            systems[e] = _CochainSystem(M, e)
        return systems[e]

    from .natsys import bw_differential, bw_offsets

    dh, dv = {}, {}
    for p in range(pmax + 1):
        for q in range(qmax + 1):
            if not keep(p, q) or dims[p][q] == 0:
                continue
            e = bar_degree(q, convention)
            S = system(e)
            if keep(p + 1, q):
                dh[(p, q)] = bw_differential(S.system, p)
            if keep(p, q + 1):
                off_src = bw_offsets(S.system, p)
                off_dst = bw_offsets(system(e + 1).system, p)
                out = _zeros_array(ring, int(off_dst[-1]), int(off_src[-1]))
                for k, c in enumerate(I.chains(p)):
                    blk = S.bar(c.composite)
                    out[off_dst[k] : off_dst[k + 1], off_src[k] : off_src[k + 1]] = blk.a
                dv[(p, q)] = Matrix(ring, out, _trusted=True)
    return DoubleComplex(ring, dims, dh, dv, check=check)


def diagram_cohomology(A: GroupDiagram, M: DiagramModule, n_max: int, convention: str = "plain", caps=None) -> list[FgAbelianGroup]:
    """``H^0 .. H^{n_max}`` of the total complex."""
    T = n_max + 1
    D = diagram_bicomplex(A, M, T, T, convention, total_max=T, caps=caps)
    return complex_cohomology(total_complex(D))[: n_max + 1]


# --------------------------------------------------------------------------
# Local cohomology systems
# --------------------------------------------------------------------------


class LocalCohomologySystem(NaturalSystem):
    """``f: s -> t  |->  ℋ^q(A(s), f^*M(t))`` in the chosen convention.

    ``quotients[f]`` holds the chosen basis of the value at f as a quotient of
    cocycles by coboundaries in the bar complex of degree ``bar_degree``.
    """

    q: int
    convention: str
    bar_degree: int
    quotients: list


def _cocycles_and_boundaries(G: FiniteGroup, Mf: GModule, e: int, with_boundaries: bool) -> tuple[Matrix, Matrix]:
    ring = Mf.ring
    d = bar_differential(G, Mf, e)
    Z = kernel_basis(d)
    if with_boundaries and e >= 1:
        B = bar_differential(G, Mf, e - 1)
    else:
        B = Matrix.zeros(ring, Z.rows, 0)
    return Z, B


def local_system(A: GroupDiagram, M: DiagramModule, q: int, convention: str) -> LocalCohomologySystem:
    """Natural system of local cohomologies with push and pull induced on
    cohomology classes; each induced map is checked to send coboundaries to
    coboundaries."""
    _check_convention(convention)
    if q < 0:
        raise ValueError("degree must be nonnegative")
    I = A.index
    ring = M.ring
    zero_system = convention == "cegarra" and q == 0
    e = q
    quotients = []
    boundaries = []
    for f in range(I.n_morphisms):
        s = I.src[f]
        G = A.groups[s]
        Mf = M.pulled_back(f)
        if zero_system:
            n = G.order**e * Mf.dim
            Z = Matrix.zeros(ring, n, 0)
            B = Matrix.zeros(ring, n, 0)
        else:
            # degree 1 in the cegarra convention is Der = Z^1, not H^1
            Z, B = _cocycles_and_boundaries(G, Mf, e, with_boundaries=not (convention == "cegarra" and q == 1))
        quotients.append(QuotientSpace(Z, B))
        boundaries.append(B)
    dims = [Q.dim for Q in quotients]
    cochains = _CochainSystem(M, e)

    def induced(P: Matrix, f: int, g: int) -> Matrix:
        Qs, Qd = quotients[f], quotients[g]
        Bs = boundaries[f]
        if Bs.cols:
            killed = Qd.coords(P @ Bs)
            if not killed.is_zero():
                raise NaturalityViolation("induced map does not preserve coboundaries")
        return Qd.coords(P @ Qs.reps)

    def push(a, f):
        return induced(cochains.system.push(a, f), f, I.compose(a, f))

    def pull(b, f):
        return induced(cochains.system.pull(b, f), f, I.compose(f, b))

    D = NaturalSystem(I, ring, dims, push, pull, check=False)
    D.__class__ = LocalCohomologySystem
    D.q = q
    D.convention = convention
    D.bar_degree = e
    D.quotients = quotients
    return D


def e2_from_local_systems(systems: Mapping[int, LocalCohomologySystem], n_max: int, convention: str) -> list[list[int]]:
    """``table[p][q] = dim H^p_BW(I, system for row q)`` for ``p + q <= n_max``.

    Row q uses the degree-q system in the plain convention and the
    degree-(q+1) system in the cegarra convention."""
    _check_convention(convention)
    shift = 1 if convention == "cegarra" else 0
    table = [[0] * (n_max + 1 - p) for p in range(n_max + 1)]
    for q in range(n_max + 1):
        D = systems.get(q + shift)
        if D is None:
            raise ValueError(f"no local system for row {q}")
        if getattr(D, "convention", convention) != convention:
            raise ConventionMismatch(
                f"local system in degree {D.q} uses the {D.convention} convention, expected {convention}"
            )
        if D.q != q + shift:
            raise ConventionMismatch(f"row {q} needs the degree {q + shift} system, got degree {D.q}")
        H = bw_cohomology(D, n_max - q)
        for p in range(n_max + 1 - q):
            table[p][q] = H[p].rank
    return table


# --------------------------------------------------------------------------
# Local-to-global comparison
# --------------------------------------------------------------------------


def _triangle(table, n_max: int) -> list[list[int]]:
    return [[int(table[p][q]) for q in range(n_max + 1 - p)] for p in range(n_max + 1)]


@dataclass
class LocalToGlobalReport:
    convention: str
    n_max: int
    pages: dict[int, list[list[int]]]
    e2: list[list[int]]
    e2_bw: list[list[int]]
    einf: list[list[int]]
    total: list[int]
    r_max: int
    extra: dict = field(default_factory=dict)

    @property
    def e2_matches(self) -> bool:
        return self.e2 == self.e2_bw

    @property
    def converges(self) -> bool:
        return all(
            sum(self.einf[p][n - p] for p in range(n + 1)) == self.total[n] for n in range(self.n_max + 1)
        )

    @property
    def ok(self) -> bool:
        return self.e2_matches and self.converges

    def to_json(self) -> dict:
        return {
            "convention": self.convention,
            "n_max": self.n_max,
            "r_max": self.r_max,
            "pages": {str(r): pg for r, pg in sorted(self.pages.items())},
            "e2": self.e2,
            "e2_bw": self.e2_bw,
            "e2_matches": self.e2_matches,
            "einf": self.einf,
            "total": self.total,
            "converges": self.converges,
            "verdict": "PASS" if self.ok else "FAIL",
        }


def local_to_global(
    A: GroupDiagram,
    M: DiagramModule,
    n_max: int,
    convention: str,
    method: str = "ranks",
    caps=None,
    check: bool = True,
) -> LocalToGlobalReport:
    """Spectral sequence of the bicomplex in total degrees ``<= n_max``,
    compared with independently computed BW cohomology of the local systems."""
    _check_convention(convention)
    T = n_max + 1
    D = diagram_bicomplex(A, M, T, T, convention, total_max=T, caps=caps, check=check)
    S: SpectralPages = spectral_sequence(D, method=method)
    shift = 1 if convention == "cegarra" else 0
    systems = {q + shift: local_system(A, M, q + shift, convention) for q in range(n_max + 1)}
    e2_bw = e2_from_local_systems(systems, n_max, convention)
    einf = _triangle(S.einf, n_max)
    # pages beyond total degree n_max are artefacts of the truncation
    r_max = 2
    while _triangle(S.page(r_max), n_max) != einf:
        r_max += 1
    pages = {r: _triangle(S.page(r), n_max) for r in range(r_max + 1)}
    return LocalToGlobalReport(
        convention=convention,
        n_max=n_max,
        pages=pages,
        e2=_triangle(S.page(2), n_max),
        e2_bw=e2_bw,
        einf=einf,
        total=[int(x) for x in S.total[: n_max + 1]],
        r_max=r_max,
    )


# --------------------------------------------------------------------------
# File format
# --------------------------------------------------------------------------


def _index_from_json(data, max_morphisms: int | None = 64) -> FiniteCategory:
    if data == "terminal":
        return terminal_category()
    if data == "arrow":
        return arrow_category()
    if isinstance(data, Mapping) and "discrete" in data:
        return discrete_category(int(data["discrete"]))
    return category_from_json(data, max_morphisms)


def diagram_from_json(data: Mapping, ring: Ring, max_morphisms: int | None = 64) -> tuple[GroupDiagram, DiagramModule]:
    """Read a diagram bundle.

    ``index``: category (or ``"terminal"``, ``"arrow"``, ``{"discrete": n}``);
    ``groups``: one group per object, or ``{"constant": group}``;
    ``maps``: ``{morphism: {"map": {...}}}`` (identities may be omitted, and
    every omitted map between equal groups is the identity);
    ``module``: ``{"modules": {object: module} or {"constant": module},
    "maps": {morphism: matrix}}`` (omitted maps are identities)."""
    for key in ("index", "groups", "module"):
        if key not in data:
            raise DiagramError(f"bundle is missing field {key!r}")
    I = _index_from_json(data["index"], max_morphisms)
    gdata = data["groups"]
    if "constant" in gdata:
        G = group_from_json(gdata["constant"])
        groups = [G] * I.n_objects
    else:
        for o in gdata:
            I.obj(o)
        missing = [o for o in I.objects if o not in gdata]
        if missing:
            raise DiagramError(f"no group given for object {missing[0]!r}")
        groups = [group_from_json(gdata[o]) for o in I.objects]
    hmaps = data.get("maps", {})
    for m in hmaps:
        I.mor(m)
    homs = []
    for m in range(I.n_morphisms):
        name = I.morphisms[m]
        src, dst = groups[I.src[m]], groups[I.dst[m]]
        if name in hmaps:
            homs.append(hom_from_json(hmaps[name], src, dst))
        elif src is dst:
            homs.append(GroupHom.identity(src))
        else:
            raise DiagramError(f"no homomorphism given for morphism {name!r}")
    A = GroupDiagram(I, groups, homs)
    mdata = data["module"]
    mods = mdata.get("modules", {})
    if "constant" in mods:
        modules = [module_from_json(mods["constant"], groups[x], ring) for x in range(I.n_objects)]
    else:
        for o in mods:
            I.obj(o)
        missing = [o for o in I.objects if o not in mods]
        if missing:
            raise DiagramError(f"no module given for object {missing[0]!r}")
        modules = [module_from_json(mods[o], groups[x], ring) for x, o in enumerate(I.objects)]
    given = mdata.get("maps", {})
    for m in given:
        I.mor(m)
    maps = []
    for m in range(I.n_morphisms):
        name = I.morphisms[m]
        s, d = modules[I.src[m]].dim, modules[I.dst[m]].dim
        if name in given:
            maps.append(Matrix(ring, given[name], (d, s)))
        elif s == d:
            maps.append(Matrix.identity(ring, s))
        else:
            raise DiagramError(f"no module map given for morphism {name!r}")
    return A, DiagramModule(A, ring, modules, maps)
