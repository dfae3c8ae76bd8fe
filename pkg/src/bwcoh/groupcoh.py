"""Finite groups, modules over them, and the bar cochain complex.

Cochains ``C^q(G, M)`` are functions ``G^q -> M`` stored as a flat vector:
the tuple ``(g_1, ..., g_q)`` is read as a base-|G| number with ``g_1`` most
significant, and each tuple owns a contiguous block of ``dim M`` entries.
The differential is the unnormalized one,

    (df)(g_1..g_{q+1}) = g_1·f(g_2..g_{q+1})
                         + Σ_{j=1..q} (-1)^j f(.., g_j g_{j+1}, ..)
                         + (-1)^{q+1} f(g_1..g_q).
"""

from __future__ import annotations

import itertools
from typing import Mapping, Sequence

import numpy as np

from .chaincomplex import CochainComplex, complex_cohomology
from .exactlinalg import (
    FgAbelianGroup,
    Matrix,
    PrimeField,
    Ring,
    _zeros_array,
    kernel_basis,
    kron,
)

DEFAULT_MAX_ORDER = 8
DEFAULT_MAX_BAR_TUPLES = 4096


class GroupError(ValueError):
    pass


class ModuleError(ValueError):
    pass


class CapExceeded(ValueError):
    pass


class FiniteGroup:
    """Finite group from a multiplication table ``table[g][h] = index of gh``."""

    def __init__(self, elements: Sequence[str], table, unit: int = 0, check: bool = True):
        self.elements = tuple(str(e) for e in elements)
        self.table = np.asarray(table, dtype=np.int64)
        self.table.setflags(write=False)
        self.unit = int(unit)
        n = len(self.elements)
        if self.table.shape != (n, n):
            raise GroupError("multiplication table must be |G| x |G|")
        if len(set(self.elements)) != n:
            raise GroupError("duplicate element names")
        self.index = {e: k for k, e in enumerate(self.elements)}
        if check:
            self._validate()
        inv = np.zeros(n, dtype=np.int64)
        for g in range(n):
            inv[g] = int(np.nonzero(self.table[g] == self.unit)[0][0])
        self.inverse = inv

    def _validate(self):
        T = self.table
        n = self.order
        if np.any((T < 0) | (T >= n)):
            raise GroupError("table entries out of range")
        e = self.unit
        if not (np.array_equal(T[e], np.arange(n)) and np.array_equal(T[:, e], np.arange(n))):
            raise GroupError(f"{self.elements[e]} is not a two-sided unit")
        for g in range(n):
            if sorted(T[g]) != list(range(n)) or sorted(T[:, g]) != list(range(n)):
                raise GroupError(f"{self.elements[g]} has no inverse (row or column is not a permutation)")
        lhs = T[T[:, :, None], np.arange(n)[None, None, :]]  # (gh)k
        rhs = T[np.arange(n)[:, None, None], T[None, :, :]]  # g(hk)
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            g, h, k = bad[0]
            names = self.elements
            raise GroupError(f"associativity fails on ({names[g]}, {names[h]}, {names[k]})")

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def el(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.index[str(name)]
        except KeyError:
            raise GroupError(f"unknown group element {name!r}") from None

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.unit:
            x = self.mul(x, g)
            k += 1
        return k

    def to_json(self) -> dict:
        E = self.elements
        return {
            "elements": list(E),
            "unit": E[self.unit],
            "table": [[E[g], E[h], E[int(self.table[g, h])]] for g in range(self.order) for h in range(self.order)],
        }

    def __repr__(self):
        return f"FiniteGroup(order {self.order})"


def cyclic_group(n: int) -> FiniteGroup:
    """``C_n`` with elements ``g^0 .. g^{n-1}``; element k is ``g^k``."""
    names = ["e"] + [f"g{k}" if k > 1 else "g" for k in range(1, n)]
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return FiniteGroup(names, table, 0)


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    names = [f"({a},{b})" for a in G.elements for b in H.elements]
    m = H.order
    table = np.zeros((G.order * m, G.order * m), dtype=np.int64)
    for g1, h1, g2, h2 in itertools.product(range(G.order), range(m), range(G.order), range(m)):
        table[g1 * m + h1, g2 * m + h2] = G.table[g1, g2] * m + H.table[h1, h2]
    return FiniteGroup(names, table, G.unit * m + H.unit)


def symmetric_group(n: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(n)))
    pos = {p: k for k, p in enumerate(perms)}
    # (στ)(i) = σ(τ(i))
    table = [[pos[tuple(s[t[i]] for i in range(n))] for t in perms] for s in perms]
    names = ["".join(map(str, p)) for p in perms]
    return FiniteGroup(names, table, pos[tuple(range(n))])


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon: ``r^k`` is element k, ``s r^k`` is element n+k."""
    N = 2 * n
    table = np.zeros((N, N), dtype=np.int64)
    for a in range(N):
        for b in range(N):
            fa, ka = divmod(a, n)
            fb, kb = divmod(b, n)
            # s^fa r^ka s^fb r^kb = s^(fa+fb) r^((-1)^fb ka + kb)
            k = ((-ka if fb else ka) + kb) % n
            table[a, b] = ((fa + fb) % 2) * n + k
    names = [f"r{k}" for k in range(n)] + [f"sr{k}" for k in range(n)]
    return FiniteGroup(names, table, 0)


def group_from_json(data: Mapping) -> FiniteGroup:
    if "cyclic" in data:
        return cyclic_group(int(data["cyclic"]))
    try:
        elements = [str(e) for e in data["elements"]]
        idx = {e: k for k, e in enumerate(elements)}
        n = len(elements)
        table = -np.ones((n, n), dtype=np.int64)
        for g, h, gh in data["table"]:
            for x in (g, h, gh):
                if str(x) not in idx:
                    raise GroupError(f"table names unknown element {x!r}")
            table[idx[str(g)], idx[str(h)]] = idx[str(gh)]
        if np.any(table < 0):
            g, h = np.argwhere(table < 0)[0]
            raise GroupError(f"product {elements[g]}*{elements[h]} is not listed")
        return FiniteGroup(elements, table, idx[str(data["unit"])])
    except KeyError as e:
        raise GroupError(f"group is missing field {e.args[0]!r}") from None


# --------------------------------------------------------------------------
# Homomorphisms and modules
# --------------------------------------------------------------------------


class GroupHom:
    def __init__(self, src: FiniteGroup, dst: FiniteGroup, images: Sequence[int], check: bool = True):
        self.src = src
        self.dst = dst
        self.images = np.asarray(images, dtype=np.int64)
        self.images.setflags(write=False)
        if check:
            self._validate()

    def _validate(self):
        S, T, f = self.src, self.dst, self.images
        if f.shape != (S.order,) or np.any((f < 0) | (f >= T.order)):
            raise GroupError("homomorphism must send every element to an element of the target")
        if f[S.unit] != T.unit:
            raise GroupError("homomorphism does not preserve the unit")
        lhs = f[S.table]
        rhs = T.table[f[:, None], f[None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            g, h = bad[0]
            raise GroupError(f"map is not multiplicative on ({S.elements[g]}, {S.elements[h]})")

    def __call__(self, g: int) -> int:
        return int(self.images[g])

    def __matmul__(self, other: "GroupHom") -> "GroupHom":
        """``self ∘ other``."""
        if other.dst is not self.src and other.dst.elements != self.src.elements:
            raise GroupError("homomorphisms are not composable")
        return GroupHom(other.src, self.dst, self.images[other.images], check=False)

    def __eq__(self, other):
        return isinstance(other, GroupHom) and np.array_equal(self.images, other.images)

    __hash__ = None

    @classmethod
    def identity(cls, G: FiniteGroup) -> "GroupHom":
        return cls(G, G, np.arange(G.order), check=False)

    @classmethod
    def trivial(cls, G: FiniteGroup, H: FiniteGroup) -> "GroupHom":
        return cls(G, H, np.full(G.order, H.unit), check=False)

    def to_json(self) -> dict:
        return {"map": {self.src.elements[g]: self.dst.elements[int(self.images[g])] for g in range(self.src.order)}}


def hom_from_json(data: Mapping, src: FiniteGroup, dst: FiniteGroup) -> GroupHom:
    try:
        mp = data["map"]
    except KeyError:
        raise GroupError("homomorphism is missing field 'map'") from None
    images = []
    for g in src.elements:
        if g not in mp:
            raise GroupError(f"homomorphism does not assign an image to {g!r}")
        images.append(dst.el(mp[g]))
    return GroupHom(src, dst, images)


def all_homs(G: FiniteGroup, H: FiniteGroup) -> list[GroupHom]:
    """Every homomorphism ``G -> H`` by backtracking over images."""
    n = G.order
    out = []
    images = [-1] * n
    images[G.unit] = H.unit
    order = [g for g in range(n) if g != G.unit]

    def consistent() -> bool:
        for g in range(n):
            if images[g] < 0:
                continue
            for h in range(n):
                if images[h] < 0:
                    continue
                gh = int(G.table[g, h])
                if images[gh] >= 0 and images[gh] != H.table[images[g], images[h]]:
                    return False
        return True

    def extend(k):
        if k == len(order):
            out.append(GroupHom(G, H, list(images), check=False))
            return
        g = order[k]
        if images[g] >= 0:
            extend(k + 1)
            return
        for x in range(H.order):
            images[g] = x
            # propagate to products already determined
            if consistent():
                extend(k + 1)
        images[g] = -1

    extend(0)
    return [h for h in out if _is_hom(h)]


def _is_hom(h: GroupHom) -> bool:
    try:
        h._validate()
        return True
    except GroupError:
        return False


class GModule:
    """Free module of rank ``dim`` over ``ring`` with ``G`` acting on the left
    through ``action[g]`` (one invertible matrix per element)."""

    def __init__(self, group: FiniteGroup, ring: Ring, dim: int, action: Sequence[Matrix], check: bool = True):
        self.group = group
        self.ring = ring
        self.dim = int(dim)
        self.action = tuple(action)
        if check:
            self._validate()

    def _validate(self):
        G = self.group
        if len(self.action) != G.order:
            raise ModuleError("need one action matrix per group element")
        for g, m in enumerate(self.action):
            if m.shape != (self.dim, self.dim) or m.ring != self.ring:
                raise ModuleError(f"action of {G.elements[g]} has the wrong shape or ring")
        if self.action[G.unit] != Matrix.identity(self.ring, self.dim):
            raise ModuleError("the unit does not act as the identity")
        for g in range(G.order):
            for h in range(G.order):
                if self.action[g] @ self.action[h] != self.action[G.mul(g, h)]:
                    raise ModuleError(
                        f"action is not multiplicative on ({G.elements[g]}, {G.elements[h]})"
                    )

    def __repr__(self):
        return f"GModule({self.group!r}, {self.ring}, dim={self.dim})"

    def to_json(self) -> dict:
        out = {"dim": self.dim, "action": {self.group.elements[g]: _ints(m) for g, m in enumerate(self.action)}}
        if isinstance(self.ring, PrimeField):
            out["prime"] = self.ring.p
        return out

    def fixed_points(self) -> Matrix:
        """Basis (columns) of ``M^G``, by a direct linear solve."""
        G = self.group
        rows = [self.action[g] - Matrix.identity(self.ring, self.dim) for g in range(G.order)]
        stacked = np.vstack([r.a for r in rows]) if rows else _zeros_array(self.ring, 0, self.dim)
        return kernel_basis(Matrix(self.ring, stacked, _trusted=True))


def _ints(m: Matrix) -> list:
    return [[int(x) for x in row] for row in m.tolist()]


def trivial_module(G: FiniteGroup, ring: Ring, dim: int = 1) -> GModule:
    e = Matrix.identity(ring, dim)
    return GModule(G, ring, dim, [e] * G.order, check=False)


def character_module(G: FiniteGroup, ring: Ring, chi: Sequence[int]) -> GModule:
    """One-dimensional module where g acts by the scalar ``chi[g]``."""
    return GModule(G, ring, 1, [Matrix(ring, [[c]]) for c in chi])


def sign_module(G: FiniteGroup, ring: Ring, generator: int | None = None) -> GModule:
    """Rank-one module on which a generator of a cyclic group acts by -1.

    When the group has odd order the only homomorphism to {±1} is trivial,
    so the module is the trivial one."""
    n = G.order
    if generator is None:
        generator = next((g for g in range(n) if G.element_order(g) == n), None)
        if generator is None:
            raise ModuleError("sign module needs a cyclic group")
    chi = [1] * n
    x = G.unit
    sign = 1
    if n % 2 == 0:
        for _ in range(n):
            chi[x] = sign
            x = G.mul(x, generator)
            sign = -sign
    return character_module(G, ring, chi)


def regular_module(G: FiniteGroup, ring: Ring) -> GModule:
    """Permutation module on the basis ``{e_h}`` with ``g·e_h = e_{gh}``."""
    mats = []
    for g in range(G.order):
        a = _zeros_array(ring, G.order, G.order)
        for h in range(G.order):
            a[G.mul(g, h), h] = 1
        mats.append(Matrix(ring, a))
    return GModule(G, ring, G.order, mats, check=False)


def module_from_generators(G: FiniteGroup, ring: Ring, dim: int, gens: Mapping[int, Matrix]) -> GModule:
    """Extend an action given on some elements to all of G by multiplying
    out; every element must be reachable and the result is validated."""
    act: dict[int, Matrix] = {G.unit: Matrix.identity(ring, dim)}
    for g, m in gens.items():
        if g in act and act[g] != m:
            raise ModuleError(f"conflicting action for {G.elements[g]}")
        act[g] = m
    frontier = list(act)
    while frontier:
        new = []
        for g in frontier:
            for h, mh in gens.items():
                gh = G.mul(h, g)
                m = mh @ act[g]
                if gh in act:
                    if act[gh] != m:
                        raise ModuleError(f"action is inconsistent at {G.elements[gh]}")
                else:
                    act[gh] = m
                    new.append(gh)
        frontier = new
    missing = [G.elements[g] for g in range(G.order) if g not in act]
    if missing:
        raise ModuleError(f"given elements do not generate the group; no action for {missing[0]}")
    return GModule(G, ring, dim, [act[g] for g in range(G.order)])


def module_from_json(data: Mapping, G: FiniteGroup, ring: Ring) -> GModule:
    try:
        dim = int(data["dim"])
        action = data.get("action", {})
    except KeyError as e:
        raise ModuleError(f"module is missing field {e.args[0]!r}") from None
    gens = {G.el(g): Matrix(ring, m, (dim, dim)) for g, m in action.items()}
    if not gens:
        return trivial_module(G, ring, dim)
    return module_from_generators(G, ring, dim, gens)


def restrict_module(phi: GroupHom, M: GModule) -> GModule:
    """``φ^*M``: the same space with ``g`` acting as ``φ(g)``."""
    if phi.dst.order != M.group.order:
        raise ModuleError("homomorphism target is not the module's group")
    return GModule(phi.src, M.ring, M.dim, [M.action[phi(g)] for g in range(phi.src.order)], check=False)


# --------------------------------------------------------------------------
# Bar complex
# --------------------------------------------------------------------------


def _digits(n: int, q: int) -> np.ndarray:
    """``(n^q, q)`` array of all tuples, first coordinate most significant."""
    if q == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(n), repeat=q)), dtype=np.int64)


def _encode(t: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(t.shape[0], dtype=np.int64)
    for j in range(t.shape[1]):
        out = out * n + t[:, j]
    return out


def bar_differential(G: FiniteGroup, M: GModule, q: int) -> Matrix:
    """``d^q: C^q(G, M) -> C^{q+1}(G, M)``."""
    ring = M.ring
    n, m = G.order, M.dim
    rows = n ** (q + 1)
    cols = n**q
    out = _zeros_array(ring, rows * m, cols * m)
    # g_1 acting on f(g_2, ..): block row g_1 is kron(I_{n^q}, M(g_1))
    for g in range(n):
        blk = kron(Matrix.identity(ring, cols), M.action[g]).a
        out[g * cols * m : (g + 1) * cols * m, :] += blk
    if m == 0:
        return Matrix(ring, out, _trusted=True)
    t = _digits(n, q + 1)
    ridx = np.arange(rows)
    eye = np.arange(m)
    for j in range(1, q + 1):
        merged = np.concatenate(
            [t[:, : j - 1], G.table[t[:, j - 1], t[:, j]][:, None], t[:, j + 1 :]], axis=1
        )
        cidx = _encode(merged, n)
        sgn = -1 if j % 2 else 1
        R = (ridx[:, None] * m + eye[None, :]).ravel()
        C = (cidx[:, None] * m + eye[None, :]).ravel()
        np.add.at(out, (R, C), sgn)
    cidx = ridx // n  # drop g_{q+1}
    R = (ridx[:, None] * m + eye[None, :]).ravel()
    C = (cidx[:, None] * m + eye[None, :]).ravel()
    np.add.at(out, (R, C), -1 if (q + 1) % 2 else 1)
    return Matrix(ring, ring.normalize(out), _trusted=True)


def bar_complex(G: FiniteGroup, M: GModule, q_max: int, max_tuples: int | None = DEFAULT_MAX_BAR_TUPLES) -> CochainComplex:
    """Bar cochains ``C^0 .. C^{q_max}`` with ``dim C^q = |G|^q · dim M``."""
    if max_tuples is not None and G.order**q_max > max_tuples:
        raise CapExceeded(f"|G|^{q_max} = {G.order ** q_max} tuples exceeds the cap of {max_tuples}")
    dims = [G.order**q * M.dim for q in range(q_max + 1)]
    diffs = [bar_differential(G, M, q) for q in range(q_max)]
    return CochainComplex(M.ring, dims, diffs)


def group_cohomology(G: FiniteGroup, M: GModule, q_max: int, max_tuples: int | None = DEFAULT_MAX_BAR_TUPLES) -> list[FgAbelianGroup]:
    """``H^0 .. H^{q_max}`` (Eilenberg-MacLane indexing)."""
    if max_tuples is not None and G.order ** (q_max + 1) > max_tuples * G.order:
        raise CapExceeded(f"degree {q_max} needs |G|^{q_max + 1} tuples")
    return complex_cohomology(bar_complex(G, M, q_max + 1, max_tuples=None))[: q_max + 1]


def derivations(G: FiniteGroup, M: GModule) -> Matrix:
    """Basis (columns) of ``Z^1(G, M) = {d : d(gh) = g·d(h) + d(g)}``.

    A column lists ``d(g)`` for g in element order.  Solved directly from the
    cocycle equations, independently of :func:`bar_differential`.
    """
    ring = M.ring
    n, m = G.order, M.dim
    eqs = _zeros_array(ring, n * n * m, n * m)
    row = 0
    for g in range(n):
        for h in range(n):
            gh = G.mul(g, h)
            blk = slice(row, row + m)
            # g·d(h) + d(g) - d(gh) = 0
            eqs[blk, h * m : (h + 1) * m] += M.action[g].a
            eqs[blk, g * m : (g + 1) * m] += np.eye(m, dtype=eqs.dtype) if eqs.dtype != object else _eye_obj(m)
            eqs[blk, gh * m : (gh + 1) * m] -= np.eye(m, dtype=eqs.dtype) if eqs.dtype != object else _eye_obj(m)
            row += m
    return kernel_basis(Matrix(ring, ring.normalize(eqs), _trusted=True))


def _eye_obj(m: int) -> np.ndarray:
    a = np.zeros((m, m), dtype=object)
    for k in range(m):
        a[k, k] = 1
    return a


def general_linear_group(ring: PrimeField, d: int) -> tuple[FiniteGroup, list[Matrix]]:
    """``GL_d(F_p)`` as a finite group, with the matrix of each element."""
    p = ring.p
    mats = []
    for entries in itertools.product(range(p), repeat=d * d):
        a = np.array(entries, dtype=np.int64).reshape(d, d)
        if _det_mod(a, p) % p:
            mats.append(a)
    key = {m.tobytes(): k for k, m in enumerate(mats)}
    unit = key[np.eye(d, dtype=np.int64).tobytes()]
    table = [[key[((a @ b) % p).tobytes()] for b in mats] for a in mats]
    names = ["[" + ";".join(",".join(str(x) for x in row) for row in m) + "]" for m in mats]
    return FiniteGroup(names, table, unit, check=False), [Matrix(ring, m) for m in mats]


def _det_mod(a: np.ndarray, p: int) -> int:
    a = [list(map(int, r)) for r in a]
    n = len(a)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] % p), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c] % p
        inv = pow(a[c][c], -1, p)
        for r in range(c + 1, n):
            f = a[r][c] * inv % p
            a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c])]
    return det % p


def module_from_hom(G: FiniteGroup, rho: GroupHom, mats: Sequence[Matrix]) -> GModule:
    """Module through a homomorphism into a matrix group with element matrices ``mats``."""
    ring = mats[0].ring
    return GModule(G, ring, mats[0].rows, [mats[rho(g)] for g in range(G.order)], check=False)
