"""Finite categories given by explicit composition tables.

Objects and morphisms are addressed by integer index internally and carry
string names for input/output.  ``table[g, f]`` holds the index of ``g∘f``
or -1 when ``dst(f) != src(g)``.

Chains follow the coboundary convention: a p-chain is ``(α_1, ..., α_p)``
with ``α_k: i_k -> i_{k-1}``, so its objects read ``i_0 <- i_1 <- ... <- i_p``
and its composite ``α_1∘...∘α_p`` runs from ``i_p`` to ``i_0``.  ``α_1`` sits
on the target side of the composite and ``α_p`` on the source side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_MAX_MORPHISMS = 64


class CategoryError(ValueError):
    """Invalid category data; ``violations`` lists every problem found."""

    def __init__(self, message: str, violations: Sequence[str] = ()):
        super().__init__(message)
        self.violations = list(violations) or [message]


class AssocViolation(CategoryError):
    pass


class IdentityViolation(CategoryError):
    pass


class TypeMismatch(CategoryError):
    pass


class UnknownObject(CategoryError):
    pass


class CapExceeded(CategoryError):
    pass


class FunctorError(CategoryError):
    pass


@dataclass(frozen=True)
class Chain:
    """A composable tuple ``(α_1, ..., α_p)``; see the module docstring."""

    arrows: tuple[int, ...]
    objects: tuple[int, ...]
    composite: int

    @property
    def p(self) -> int:
        return len(self.arrows)

    @property
    def head(self) -> int:
        """``i_p``, the source of the composite."""
        return self.objects[-1]

    @property
    def tail(self) -> int:
        """``i_0``, the target of the composite."""
        return self.objects[0]


class FiniteCategory:
    """Validated finite category.  Build through :func:`validate_category`."""

    def __init__(self, objects, morphisms, src, dst, identity, table, _validated=False):
        if not _validated:
            raise TypeError("use validate_category to construct a FiniteCategory")
        self.objects: tuple[str, ...] = tuple(objects)
        self.morphisms: tuple[str, ...] = tuple(morphisms)
        self.src: tuple[int, ...] = tuple(src)
        self.dst: tuple[int, ...] = tuple(dst)
        self.identity: tuple[int, ...] = tuple(identity)
        self.table = np.asarray(table, dtype=np.int64)
        self.table.setflags(write=False)
        self.obj_index = {o: k for k, o in enumerate(self.objects)}
        self.mor_index = {m: k for k, m in enumerate(self.morphisms)}
        self._chains: dict[int, list[Chain]] = {}
        self._chain_pos: dict[int, dict[tuple[int, ...], int]] = {}

    # --- basic queries ---------------------------------------------------
    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphisms)

    def compose(self, g: int, f: int) -> int:
        """Index of ``g∘f``; raises TypeMismatch if not composable."""
        h = int(self.table[g, f])
        if h < 0:
            raise TypeMismatch(f"cannot compose {self.morphisms[g]} after {self.morphisms[f]}")
        return h

    def hom(self, a: int, b: int) -> list[int]:
        return [m for m in range(self.n_morphisms) if self.src[m] == a and self.dst[m] == b]

    def is_identity(self, m: int) -> bool:
        return self.identity[self.src[m]] == m

    def obj(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.obj_index[name]
        except KeyError:
            raise UnknownObject(f"unknown object {name!r}") from None

    def mor(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.mor_index[name]
        except KeyError:
            raise CategoryError(f"unknown morphism {name!r}") from None

    def __repr__(self):
        return f"FiniteCategory({self.n_objects} objects, {self.n_morphisms} morphisms)"

    # --- chains ------------------------------------------------------------
    def chains(self, p: int) -> list[Chain]:
        """All p-chains, identities included, in lexicographic order of
        ``(α_1, ..., α_p)`` by morphism index; 0-chains are the objects."""
        if p < 0:
            raise ValueError("chain length must be nonnegative")
        if p not in self._chains:
            if p == 0:
                out = [Chain((), (i,), self.identity[i]) for i in range(self.n_objects)]
            elif p == 1:
                out = [Chain((a,), (self.dst[a], self.src[a]), a) for a in range(self.n_morphisms)]
            else:
                # extending sorted (p-1)-chains on the right keeps lexicographic order
                into: dict[int, list[int]] = {}
                for a in range(self.n_morphisms):
                    into.setdefault(self.dst[a], []).append(a)
                out = []
                for c in self.chains(p - 1):
                    for a in into.get(c.head, ()):
                        out.append(Chain(c.arrows + (a,), c.objects + (self.src[a],), int(self.table[c.composite, a])))
            self._chains[p] = out
            self._chain_pos[p] = {c.arrows if p else c.objects: k for k, c in enumerate(out)}
        return self._chains[p]

    def chain_position(self, p: int, key: tuple[int, ...]) -> int:
        """Position in :meth:`chains` of the chain with these arrows
        (for p = 0, ``key = (object,)``)."""
        self.chains(p)
        return self._chain_pos[p][key]

    def to_json(self) -> dict:
        comp = []
        for g in range(self.n_morphisms):
            for f in range(self.n_morphisms):
                h = int(self.table[g, f])
                if h >= 0:
                    comp.append([self.morphisms[g], self.morphisms[f], self.morphisms[h]])
        return {
            "objects": list(self.objects),
            "morphisms": [
                {"name": m, "src": self.objects[self.src[k]], "dst": self.objects[self.dst[k]]}
                for k, m in enumerate(self.morphisms)
            ],
            "identities": {o: self.morphisms[self.identity[k]] for k, o in enumerate(self.objects)},
            "compose": comp,
        }


def chains(I: FiniteCategory, p: int) -> list[Chain]:
    return I.chains(p)


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------


def validate_category(
    objects: Sequence[str],
    morphisms: Sequence[Mapping | tuple],
    identities: Mapping[str, str],
    compose: Iterable[Sequence[str]],
    max_morphisms: int | None = DEFAULT_MAX_MORPHISMS,
) -> FiniteCategory:
    """Check the category axioms exhaustively and build the category.

    ``morphisms`` items are ``{"name", "src", "dst"}`` mappings or
    ``(name, src, dst)`` tuples; ``compose`` lists ``[g, f, g∘f]``.  Every
    composable pair must be listed.  All violations of one kind are collected
    before raising.
    """
    objects = [str(o) for o in objects]
    if len(set(objects)) != len(objects):
        raise CategoryError("duplicate object names")
    oidx = {o: k for k, o in enumerate(objects)}
    names, src, dst = [], [], []
    for m in morphisms:
        if isinstance(m, Mapping):
            name, s, d = m["name"], m["src"], m["dst"]
        else:
            name, s, d = m
        for o in (s, d):
            if o not in oidx:
                raise UnknownObject(f"morphism {name!r} refers to unknown object {o!r}")
        names.append(str(name))
        src.append(oidx[s])
        dst.append(oidx[d])
    if len(set(names)) != len(names):
        raise CategoryError("duplicate morphism names")
    if max_morphisms is not None and len(names) > max_morphisms:
        raise CapExceeded(f"{len(names)} morphisms exceed the cap of {max_morphisms}")
    midx = {m: k for k, m in enumerate(names)}
    M = len(names)

    ident = []
    for o in objects:
        if o not in identities:
            raise IdentityViolation(f"object {o!r} has no identity")
        i = identities[o]
        if i not in midx:
            raise IdentityViolation(f"identity {i!r} of {o!r} is not a morphism")
        k = midx[i]
        if src[k] != oidx[o] or dst[k] != oidx[o]:
            raise IdentityViolation(f"identity {i!r} is not an endomorphism of {o!r}")
        ident.append(k)

    table = np.full((M, M), -1, dtype=np.int64)
    problems = []
    for entry in compose:
        g, f, h = (str(x) for x in entry)
        for x in (g, f, h):
            if x not in midx:
                raise CategoryError(f"composition entry {entry!r} names unknown morphism {x!r}")
        gi, fi, hi = midx[g], midx[f], midx[h]
        if dst[fi] != src[gi]:
            problems.append(f"{g}∘{f}: {f} ends at {objects[dst[fi]]} but {g} starts at {objects[src[gi]]}")
            continue
        if src[hi] != src[fi] or dst[hi] != dst[gi]:
            problems.append(f"{g}∘{f} = {h} has the wrong source or target")
            continue
        if table[gi, fi] >= 0 and table[gi, fi] != hi:
            problems.append(f"{g}∘{f} listed twice with different values")
            continue
        table[gi, fi] = hi
    if problems:
        raise TypeMismatch(problems[0], problems)

    src_a = np.array(src, dtype=np.int64)
    dst_a = np.array(dst, dtype=np.int64)
    missing = np.argwhere((dst_a[None, :] == src_a[:, None]) & (table < 0))
    # identities may be left implicit
    for gi, fi in missing:
        if gi == ident[src[gi]]:
            table[gi, fi] = fi
        elif fi == ident[dst[fi]]:
            table[gi, fi] = gi
    missing = np.argwhere((dst_a[None, :] == src_a[:, None]) & (table < 0))
    if len(missing):
        msgs = [f"composite {names[g]}∘{names[f]} is not listed" for g, f in missing]
        raise TypeMismatch(msgs[0], msgs)

    for k, i in enumerate(ident):
        bad = [names[f] for f in range(M) if dst[f] == k and table[i, f] != f]
        bad += [names[g] for g in range(M) if src[g] == k and table[g, i] != g]
        if bad:
            msgs = [f"identity {names[i]} does not act trivially on {b}" for b in bad]
            raise IdentityViolation(msgs[0], msgs)

    # associativity over all composable triples (f, g, h): (h g) f == h (g f)
    G, F = np.nonzero(table >= 0)
    GF = table[G, F]
    H = np.arange(M)
    ok_h = table[:, G] >= 0  # [h, pair]
    hs, ps = np.nonzero(ok_h)
    lhs = table[table[hs, G[ps]], F[ps]]
    rhs = table[hs, GF[ps]]
    bad = np.nonzero(lhs != rhs)[0]
    if len(bad):
        msgs = [
            f"associativity fails on (f, g, h) = ({names[F[ps[b]]]}, {names[G[ps[b]]]}, {names[hs[b]]})"
            for b in bad[:20]
        ]
        raise AssocViolation(msgs[0], msgs)
    del H
    return FiniteCategory(objects, names, src, dst, ident, table, _validated=True)


def category_from_json(data: Mapping, max_morphisms: int | None = DEFAULT_MAX_MORPHISMS) -> FiniteCategory:
    try:
        return validate_category(
            data["objects"], data["morphisms"], data["identities"], data.get("compose", []), max_morphisms
        )
    except KeyError as e:
        raise CategoryError(f"category is missing field {e.args[0]!r}") from None


def _from_table(objects, morphisms, src, dst, identity, table) -> FiniteCategory:
    """Build from index data, running the full validation."""
    comp = []
    M = len(morphisms)
    for g in range(M):
        for f in range(M):
            h = table[g][f]
            if h >= 0:
                comp.append((morphisms[g], morphisms[f], morphisms[h]))
    return validate_category(
        objects,
        [(morphisms[k], objects[src[k]], objects[dst[k]]) for k in range(M)],
        {objects[k]: morphisms[i] for k, i in enumerate(identity)},
        comp,
        max_morphisms=None,
    )


# --------------------------------------------------------------------------
# Constructors
# --------------------------------------------------------------------------


def terminal_category() -> FiniteCategory:
    return validate_category(["*"], [("id_*", "*", "*")], {"*": "id_*"}, [])


def discrete_category(n: int) -> FiniteCategory:
    objs = [str(k) for k in range(n)]
    return validate_category(objs, [(f"id_{o}", o, o) for o in objs], {o: f"id_{o}" for o in objs}, [])


def poset_category(n: int, leq: Iterable[tuple[int, int]]) -> FiniteCategory:
    """Thin category on objects 0..n-1 generated by the relations ``a <= b``
    (transitively and reflexively closed).  The arrow ``a -> b`` is named
    ``a<b``."""
    rel = np.eye(n, dtype=bool)
    for a, b in leq:
        rel[a, b] = True
    for k in range(n):
        rel |= rel[:, [k]] & rel[[k], :]
    if np.any(rel & rel.T & ~np.eye(n, dtype=bool)):
        raise CategoryError("relation has a cycle; not a partial order")
    objs = [str(k) for k in range(n)]
    pairs = [(a, b) for a in range(n) for b in range(n) if rel[a, b]]
    name = {(a, b): (f"id_{a}" if a == b else f"{a}<{b}") for a, b in pairs}
    comp = [
        (name[(b, c)], name[(a, b)], name[(a, c)])
        for (a, b) in pairs
        for (b2, c) in pairs
        if b2 == b
    ]
    return validate_category(
        objs,
        [(name[p], str(p[0]), str(p[1])) for p in pairs],
        {str(k): f"id_{k}" for k in range(n)},
        comp,
        max_morphisms=None,
    )


def arrow_category() -> FiniteCategory:
    """``0 -> 1`` with the non-identity arrow named ``a``."""
    return validate_category(
        ["0", "1"],
        [("id_0", "0", "0"), ("id_1", "1", "1"), ("a", "0", "1")],
        {"0": "id_0", "1": "id_1"},
        [],
    )


def monoid_category(elements: Sequence[str], mult: Sequence[Sequence[int]], unit: int) -> FiniteCategory:
    """One-object category of a finite monoid; ``mult[x][y]`` is the index of
    ``x*y`` and composition is ``g∘f = g*f``."""
    n = len(elements)
    names = [str(e) for e in elements]
    comp = [(names[g], names[f], names[int(mult[g][f])]) for g in range(n) for f in range(n)]
    return validate_category(["*"], [(e, "*", "*") for e in names], {"*": names[unit]}, comp, max_morphisms=None)


def disjoint_union(cats: Sequence[FiniteCategory]) -> FiniteCategory:
    objs, mors, src, dst, ident = [], [], [], [], []
    blocks = []
    for t, C in enumerate(cats):
        o0, m0 = len(objs), len(mors)
        objs += [f"{t}.{o}" for o in C.objects]
        mors += [f"{t}.{m}" for m in C.morphisms]
        src += [o0 + s for s in C.src]
        dst += [o0 + d for d in C.dst]
        ident += [m0 + i for i in C.identity]
        blocks.append((m0, C))
    M = len(mors)
    table = -np.ones((M, M), dtype=np.int64)
    for m0, C in blocks:
        sub = np.where(C.table >= 0, C.table + m0, -1)
        table[m0 : m0 + C.n_morphisms, m0 : m0 + C.n_morphisms] = sub
    return _from_table(objs, mors, src, dst, ident, table.tolist())


def cone(C: FiniteCategory, name: str = "⊥") -> FiniteCategory:
    """Adjoin a new initial object with one arrow ``!x`` to every object x."""
    objs = [name] + list(C.objects)
    mors = [f"id_{name}"] + [f"!{o}" for o in C.objects] + list(C.morphisms)
    no, nm = C.n_objects, C.n_morphisms
    src = [0] * (1 + no) + [s + 1 for s in C.src]
    dst = [0] + list(range(1, no + 1)) + [d + 1 for d in C.dst]
    ident = [0] + [1 + no + i for i in C.identity]
    M = len(mors)
    table = -np.ones((M, M), dtype=np.int64)
    table[0, 0] = 0
    for x in range(no):
        table[1 + x, 0] = 1 + x
    for g in range(nm):
        table[1 + no + g, 1 + C.src[g]] = 1 + C.dst[g]
        for f in range(nm):
            h = C.table[g, f]
            if h >= 0:
                table[1 + no + g, 1 + no + f] = 1 + no + h
    return _from_table(objs, mors, src, dst, ident, table.tolist())


def product_category(A: FiniteCategory, B: FiniteCategory) -> FiniteCategory:
    objs = [f"({a},{b})" for a in A.objects for b in B.objects]
    pairs = [(f, g) for f in range(A.n_morphisms) for g in range(B.n_morphisms)]
    pos = {p: k for k, p in enumerate(pairs)}
    mors = [f"({A.morphisms[f]},{B.morphisms[g]})" for f, g in pairs]
    nb = B.n_objects
    src = [A.src[f] * nb + B.src[g] for f, g in pairs]
    dst = [A.dst[f] * nb + B.dst[g] for f, g in pairs]
    ident = [pos[(A.identity[a], B.identity[b])] for a in range(A.n_objects) for b in range(nb)]
    M = len(pairs)
    table = -np.ones((M, M), dtype=np.int64)
    for k1, (f1, g1) in enumerate(pairs):
        for k2, (f2, g2) in enumerate(pairs):
            a, b = A.table[f1, f2], B.table[g1, g2]
            if a >= 0 and b >= 0:
                table[k1, k2] = pos[(a, b)]
    return _from_table(objs, mors, src, dst, ident, table.tolist())


# --------------------------------------------------------------------------
# Derived categories
# --------------------------------------------------------------------------


class FactorizationCategory(FiniteCategory):
    """Objects are the morphisms of ``base``; a morphism ``f -> g`` is a pair
    ``(α, β)`` with ``α∘f∘β = g``.  ``pair[k] = (f, α, β)`` records the data
    of morphism k, and ``pair_index[(f, α, β)]`` inverts it."""

    base: FiniteCategory
    pair: tuple[tuple[int, int, int], ...]
    pair_index: dict[tuple[int, int, int], int]


def factorization_category(I: FiniteCategory) -> FactorizationCategory:
    B = I
    pairs = []
    for f in range(B.n_morphisms):
        a, b = B.src[f], B.dst[f]
        for al in range(B.n_morphisms):
            if B.src[al] != b:
                continue
            af = int(B.table[al, f])
            for be in range(B.n_morphisms):
                if B.dst[be] != a:
                    continue
                pairs.append((f, al, be, int(B.table[af, be])))
    objs = list(B.morphisms)
    mors = [f"({B.morphisms[al]},{B.morphisms[be]}):{B.morphisms[f]}" for f, al, be, _ in pairs]
    src = [f for f, _, _, _ in pairs]
    dst = [g for _, _, _, g in pairs]
    pos = {(f, al, be): k for k, (f, al, be, _) in enumerate(pairs)}
    ident = [pos[(f, B.identity[B.dst[f]], B.identity[B.src[f]])] for f in range(B.n_morphisms)]
    M = len(pairs)
    table = -np.ones((M, M), dtype=np.int64)
    # (α', β')∘(α, β) = (α'α, ββ')
    by_src: dict[int, list[int]] = {}
    for k, (f, _, _, _) in enumerate(pairs):
        by_src.setdefault(f, []).append(k)
    for k1, (f, al, be, g) in enumerate(pairs):
        for k2 in by_src.get(g, []):
            _, al2, be2, _ = pairs[k2]
            table[k2, k1] = pos[(f, int(B.table[al2, al]), int(B.table[be, be2]))]
    C = _from_table(objs, mors, src, dst, ident, table.tolist())
    C.__class__ = FactorizationCategory
    C.base = B
    C.pair = tuple((f, al, be) for f, al, be, _ in pairs)
    C.pair_index = pos
    return C


def under_category(I: FiniteCategory, y) -> FiniteCategory:
    """Objects are morphisms ``f: y -> x``; a morphism ``f -> g`` is an
    ``h`` with ``h∘f = g``, named ``h:f->g``."""
    y = I.obj(y)
    if not 0 <= y < I.n_objects:
        raise UnknownObject(f"unknown object {y!r}")
    objs_idx = [f for f in range(I.n_morphisms) if I.src[f] == y]
    opos = {f: k for k, f in enumerate(objs_idx)}
    objs = [I.morphisms[f] for f in objs_idx]
    tri = []
    for f in objs_idx:
        for h in range(I.n_morphisms):
            if I.src[h] == I.dst[f]:
                tri.append((f, h, int(I.table[h, f])))
    pos = {(f, h): k for k, (f, h, _) in enumerate(tri)}
    mors = [f"{I.morphisms[h]}:{I.morphisms[f]}->{I.morphisms[g]}" for f, h, g in tri]
    src = [opos[f] for f, _, _ in tri]
    dst = [opos[g] for _, _, g in tri]
    ident = [pos[(f, I.identity[I.dst[f]])] for f in objs_idx]
    M = len(tri)
    table = -np.ones((M, M), dtype=np.int64)
    for k1, (f, h1, g) in enumerate(tri):
        for k2, (f2, h2, _) in enumerate(tri):
            if f2 == g:
                table[k2, k1] = pos[(f, int(I.table[h2, h1]))]
    return _from_table(objs, mors, src, dst, ident, table.tolist())


def initial_object(I: FiniteCategory) -> int | None:
    """Index of an object with exactly one morphism to every object."""
    counts = np.zeros((I.n_objects, I.n_objects), dtype=np.int64)
    for m in range(I.n_morphisms):
        counts[I.src[m], I.dst[m]] += 1
    for x in range(I.n_objects):
        if np.all(counts[x] == 1):
            return x
    return None


def terminal_object(I: FiniteCategory) -> int | None:
    counts = np.zeros((I.n_objects, I.n_objects), dtype=np.int64)
    for m in range(I.n_morphisms):
        counts[I.src[m], I.dst[m]] += 1
    for x in range(I.n_objects):
        if np.all(counts[:, x] == 1):
            return x
    return None


# --------------------------------------------------------------------------
# Functors
# --------------------------------------------------------------------------


class Functor:
    """Functor between finite categories given by index maps; validated."""

    def __init__(self, src: FiniteCategory, dst: FiniteCategory, obj_map: Sequence[int], mor_map: Sequence[int]):
        self.src = src
        self.dst = dst
        self.obj_map = tuple(int(x) for x in obj_map)
        self.mor_map = tuple(int(x) for x in mor_map)
        self._validate()

    def _validate(self):
        S, T = self.src, self.dst
        if len(self.obj_map) != S.n_objects or len(self.mor_map) != S.n_morphisms:
            raise FunctorError("object or morphism map has the wrong length")
        for m in range(S.n_morphisms):
            fm = self.mor_map[m]
            if T.src[fm] != self.obj_map[S.src[m]] or T.dst[fm] != self.obj_map[S.dst[m]]:
                raise FunctorError(f"F({S.morphisms[m]}) has the wrong endpoints")
        for x in range(S.n_objects):
            if self.mor_map[S.identity[x]] != T.identity[self.obj_map[x]]:
                raise FunctorError(f"identity of {S.objects[x]} is not preserved")
        for g, f in itertools.product(range(S.n_morphisms), repeat=2):
            h = S.table[g, f]
            if h >= 0 and T.table[self.mor_map[g], self.mor_map[f]] != self.mor_map[h]:
                raise FunctorError(f"composition {S.morphisms[g]}∘{S.morphisms[f]} is not preserved")

    def __call__(self, m: int) -> int:
        return self.mor_map[m]


def composability_count(I: FiniteCategory, p: int) -> int:
    """Number of p-chains via powers of the composability matrix
    ``K[f, g] = 1`` iff ``f∘g`` is defined."""
    if p == 0:
        return I.n_objects
    K = (np.array(I.dst)[None, :] == np.array(I.src)[:, None]).astype(object)
    v = np.ones(I.n_morphisms, dtype=object)
    for _ in range(p - 1):
        v = K.T @ v
    return int(v.sum())


def opposite(I: FiniteCategory) -> FiniteCategory:
    """Same objects and morphism names with source and target swapped."""
    table = -np.ones_like(I.table)
    M = I.n_morphisms
    for g in range(M):
        for f in range(M):
            h = I.table[g, f]
            if h >= 0:
                table[f, g] = h  # g∘f in I is f∘g in I^op
    return _from_table(I.objects, I.morphisms, I.dst, I.src, I.identity, table.tolist())
