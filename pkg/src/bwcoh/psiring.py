"""ψ-rings and ψ-modules acted on by a finite commutative monoid.

Finite carriers are finite abelian groups ``Z/n_1 × ... × Z/n_k`` with
bilinear multiplications given by structure constants; every element is an
integer index into the mixed-radix enumeration of coordinate vectors, and all
operations become lookup tables.  Free ψ-rings are symbolic polynomial rings
over ℤ whose variables are indexed by (generator, monoid element).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .exactlinalg import GF, Matrix, kernel_basis, solve
from .fincat import FiniteCategory, monoid_category
from .natsys import NaturalSystem

DEFAULT_ENUM_BOUND = 1 << 16
DEFAULT_DEGREE_CAP = 6


class PsiError(ValueError):
    pass


class MonoidAxiomFailure(PsiError):
    pass


class RingAxiomFailure(PsiError):
    pass


class ModuleAxiomFailure(PsiError):
    pass


class PsiAxiomFailure(PsiError):
    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness


class TooLarge(PsiError):
    def __init__(self, message: str, bound: int):
        super().__init__(f"{message} (bound {bound})")
        self.bound = bound


# ---------------------------------------------------------------------------
# acting monoids


class ActionMonoid:
    """Finite commutative monoid given by a multiplication table."""

    def __init__(self, elements: Sequence[str], table, unit: int = 0, check: bool = True):
        self.elements = tuple(str(e) for e in elements)
        self.table = np.asarray(table, dtype=np.int64).reshape(len(self.elements), len(self.elements))
        self.table.setflags(write=False)
        self.unit = int(unit)
        if len(set(self.elements)) != len(self.elements):
            raise MonoidAxiomFailure("duplicate monoid element names")
        if check:
            self.validate()

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def el(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.elements.index(str(name))
        except ValueError:
            raise MonoidAxiomFailure(f"unknown monoid element {name!r}") from None

    def validate(self):
        n, T = self.order, self.table
        if n == 0:
            raise MonoidAxiomFailure("empty monoid")
        if T.min() < 0 or T.max() >= n:
            raise MonoidAxiomFailure("table entries out of range")
        E = self.elements
        u = self.unit
        for a in range(n):
            if T[u, a] != a or T[a, u] != a:
                raise MonoidAxiomFailure(f"unit law fails at {E[a]}")
        bad = np.argwhere(T != T.T)
        if len(bad):
            a, b = bad[0]
            raise MonoidAxiomFailure(f"not commutative: {E[a]}*{E[b]} != {E[b]}*{E[a]}")
        # (ab)c against a(bc) for all triples at once
        left = T[T[:, :, None], np.arange(n)[None, None, :]]
        right = T[np.arange(n)[:, None, None], T[None, :, :]]
        bad = np.argwhere(left != right)
        if len(bad):
            a, b, c = bad[0]
            raise MonoidAxiomFailure(f"associativity fails at ({E[a]}, {E[b]}, {E[c]})")

    def category(self) -> FiniteCategory:
        """One-object category whose morphisms are the monoid elements, in order."""
        return monoid_category(self.elements, self.table.tolist(), self.unit)

    def to_json(self) -> dict:
        E = self.elements
        return {"elements": list(E), "table": [[E[v] for v in row] for row in self.table.tolist()], "unit": E[self.unit]}

    def __repr__(self):
        return f"ActionMonoid({list(self.elements)})"


def monoid_from_json(data) -> ActionMonoid:
    if data == "trivial":
        return trivial_monoid()
    if "cyclic" in data:
        return cyclic_monoid(int(data["cyclic"]))
    if "idempotent" in data:
        return idempotent_monoid()
    if "truncated_power" in data:
        t = data["truncated_power"]
        return truncated_power_monoid(int(t["p"]), int(t["k"]), int(t["d"]))
    if "semilattice" in data:
        return semilattice_monoid(int(data["semilattice"]))
    E = [str(e) for e in data["elements"]]
    idx = {e: i for i, e in enumerate(E)}
    try:
        table = [[idx[str(v)] for v in row] for row in data["table"]]
        unit = idx[str(data.get("unit", E[0]))]
    except KeyError as e:
        raise MonoidAxiomFailure(f"unknown monoid element {e.args[0]!r} in table") from None
    return ActionMonoid(E, table, unit)


def trivial_monoid() -> ActionMonoid:
    return ActionMonoid(["1"], [[0]])


def idempotent_monoid(name: str = "t") -> ActionMonoid:
    """``{1, t}`` with ``t² = t``."""
    return ActionMonoid(["1", name], [[0, 1], [1, 1]])


def cyclic_monoid(n: int) -> ActionMonoid:
    """The cyclic group of order n viewed as a monoid: ``1, g, g2, ...``."""
    names = ["1"] + ["g" if k == 1 else f"g{k}" for k in range(1, n)]
    return ActionMonoid(names, [[(a + b) % n for b in range(n)] for a in range(n)])


def truncated_power_monoid(p: int, k: int, d: int) -> ActionMonoid:
    """Powers ``p^0, ..., p^{k+d-1}`` with ``p^{k+d} = p^k``.

    This is the image of ``{1, p, p², ...} ⊂ ℕ^mult`` after imposing
    ``Ψ^{p^k} = Ψ^{p^{k+d}}``; ``k = 0`` gives a cyclic group of order d."""
    if d < 1 or k < 0:
        raise MonoidAxiomFailure("need d >= 1 and k >= 0")
    n = k + d

    def red(e):
        return e if e < n else k + (e - k) % d

    names = ["1"] + [str(p) if e == 1 else f"{p}^{e}" for e in range(1, n)]
    return ActionMonoid(names, [[red(a + b) for b in range(n)] for a in range(n)])


def semilattice_monoid(n: int) -> ActionMonoid:
    """Subsets of an n-element set under union; unit is the empty set."""
    size = 1 << n

    def name(s):
        return "1" if s == 0 else "".join(chr(ord("a") + i) for i in range(n) if s >> i & 1)

    return ActionMonoid([name(s) for s in range(size)], [[a | b for b in range(size)] for a in range(size)])


def nilpotent_monoid() -> ActionMonoid:
    """``{1, x, 0}`` with ``x² = 0``."""
    return ActionMonoid(["1", "x", "0"], [[0, 1, 2], [1, 2, 2], [2, 2, 2]])


def product_monoid(A: ActionMonoid, B: ActionMonoid) -> ActionMonoid:
    nb = B.order
    names = [f"({a},{b})" for a in A.elements for b in B.elements]
    n = len(names)
    T = [[A.mul(x // nb, y // nb) * nb + B.mul(x % nb, y % nb) for y in range(n)] for x in range(n)]
    return ActionMonoid(names, T, A.unit * nb + B.unit)


def random_commutative_monoid(rng: np.random.Generator, max_size: int = 5) -> ActionMonoid:
    """Draw from truncated power monoids, cyclic groups, semilattices, the
    nilpotent monoid and small products, keeping at most ``max_size`` elements."""
    pool = [trivial_monoid(), idempotent_monoid(), nilpotent_monoid()]
    for n in range(2, max_size + 1):
        pool.append(cyclic_monoid(n))
    for k in range(0, max_size):
        for d in range(1, max_size + 1 - k):
            pool.append(truncated_power_monoid(int(rng.choice([2, 3, 5])), k, d))
    if max_size >= 4:
        pool.append(semilattice_monoid(2))
        pool.append(product_monoid(idempotent_monoid(), idempotent_monoid()))
    pool = [m for m in pool if m.order <= max_size]
    return pool[int(rng.integers(len(pool)))]


# ---------------------------------------------------------------------------
# finite abelian carriers


class Carrier:
    """``Z/n_1 × ... × Z/n_k`` with elements numbered in mixed radix."""

    def __init__(self, moduli: Sequence[int]):
        self.moduli = tuple(int(n) for n in moduli)
        if any(n < 2 for n in self.moduli):
            raise ValueError("cyclic factors must have order at least 2")
        self.k = len(self.moduli)
        self.size = int(np.prod(self.moduli, dtype=np.int64)) if self.k else 1
        mod = np.array(self.moduli, dtype=np.int64)
        self._mod = mod
        w = np.ones(self.k, dtype=np.int64)
        for i in range(self.k - 2, -1, -1):
            w[i] = w[i + 1] * mod[i + 1]
        self._w = w
        if self.k:
            grids = np.indices(self.moduli).reshape(self.k, -1).T
        else:
            grids = np.zeros((1, 0), dtype=np.int64)
        self.elems = np.ascontiguousarray(grids, dtype=np.int64)
        self.elems.setflags(write=False)

    def encode(self, vecs: np.ndarray) -> np.ndarray:
        """Indices of coordinate vectors (last axis); reduces modulo first."""
        v = np.asarray(vecs, dtype=np.int64) % self._mod if self.k else np.asarray(vecs, dtype=np.int64)
        return (v * self._w).sum(axis=-1)

    def index(self, coords: Sequence[int]) -> int:
        return int(self.encode(np.asarray(coords, dtype=np.int64)))

    def add_table(self) -> np.ndarray:
        e = self.elems
        return self.encode(e[:, None, :] + e[None, :, :])

    def neg(self) -> np.ndarray:
        return self.encode(-self.elems)

    def linear_map(self, mat: np.ndarray, target: "Carrier") -> np.ndarray:
        """Index table of the additive map with matrix ``mat`` (columns are the
        images of the generators)."""
        mat = np.asarray(mat, dtype=np.int64).reshape(target.k, self.k)
        return target.encode(self.elems @ mat.T)

    def well_defined(self, mat: np.ndarray, target: "Carrier") -> int | None:
        """First generator j with ``n_j · image(e_j) != 0``, or None."""
        mat = np.asarray(mat, dtype=np.int64).reshape(target.k, self.k)
        for j, n in enumerate(self.moduli):
            if target.k and np.any((n * mat[:, j]) % target._mod):
                return j
        return None

    def torsion(self, n: int) -> np.ndarray:
        """Indices of elements killed by n."""
        return np.flatnonzero(np.all((n * self.elems) % self._mod == 0, axis=1)) if self.k else np.array([0])


def _fmt(coords, names: Sequence[str]) -> str:
    terms = []
    for c, nm in zip(coords, names):
        c = int(c)
        if c:
            terms.append(nm if c == 1 else f"{c}{nm}")
    return "+".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# finite commutative rings


class FiniteRing:
    """Finite commutative ring with additive group ``Z/n_1 × ... × Z/n_k``.

    ``struct[i, j]`` is the coordinate vector of ``e_i e_j``; ``one`` is the
    coordinate vector of the unit.  Multiplication is bilinear, so the ring
    axioms are checked on generators."""

    def __init__(self, moduli, struct, one, basis: Sequence[str] | None = None, check: bool = True):
        self.carrier = Carrier(moduli)
        k = self.carrier.k
        self.struct = np.asarray(struct, dtype=np.int64).reshape(k, k, k)
        self.one_coords = np.asarray(one, dtype=np.int64).reshape(k)
        self.basis = tuple(basis) if basis is not None else tuple(f"e{i}" for i in range(k))
        if check:
            self.validate()
        C = self.carrier
        e = C.elems
        self.add = C.add_table()
        self.neg = C.neg()
        self.mul = C.encode(np.einsum("ai,bj,ijl->abl", e, e, self.struct))
        self.zero = 0
        self.one = C.index(self.one_coords)

    @property
    def size(self) -> int:
        return self.carrier.size

    @property
    def moduli(self) -> tuple[int, ...]:
        return self.carrier.moduli

    def validate(self):
        C, S, k = self.carrier, self.struct, self.carrier.k
        mod = C._mod
        for i, n in enumerate(C.moduli):
            if k and np.any((n * S[i]) % mod):
                raise RingAxiomFailure(f"multiplication by {self.basis[i]} is not well defined modulo {n}")
        if np.any((S - S.transpose(1, 0, 2)) % mod if k else False):
            raise RingAxiomFailure("multiplication is not commutative")
        left = np.einsum("ijm,mkl->ijkl", S, S)
        right = np.einsum("jkm,iml->ijkl", S, S)
        if k and np.any((left - right) % mod):
            i, j, l, _ = np.argwhere((left - right) % mod)[0]
            b = self.basis
            raise RingAxiomFailure(f"associativity fails on ({b[i]}, {b[j]}, {b[l]})")
        unit_act = np.einsum("i,ijl->jl", self.one_coords, S)
        if k and np.any((unit_act - np.eye(k, dtype=np.int64)) % mod):
            raise RingAxiomFailure("the given unit does not act as identity")

    def name(self, x: int) -> str:
        return _fmt(self.carrier.elems[x], self.basis)

    def to_json(self) -> dict:
        k = self.carrier.k
        products = {
            f"{self.basis[i]}*{self.basis[j]}": [int(c) for c in self.struct[i, j] % self.carrier._mod]
            for i in range(k)
            for j in range(i, k)
        }
        return {
            "moduli": list(self.moduli),
            "basis": list(self.basis),
            "one": [int(c) for c in self.one_coords],
            "products": products,
        }

    def __repr__(self):
        return f"FiniteRing(moduli={list(self.moduli)}, basis={list(self.basis)})"


def _struct_from_products(basis, moduli, products: Mapping[str, Sequence[int]]):
    k = len(basis)
    S = np.zeros((k, k, k), dtype=np.int64)
    idx = {b: i for i, b in enumerate(basis)}
    for key, val in products.items():
        a, _, b = key.partition("*")
        if a not in idx or b not in idx:
            raise RingAxiomFailure(f"product {key!r} names an unknown basis element")
        S[idx[a], idx[b]] = S[idx[b], idx[a]] = np.asarray(val, dtype=np.int64)
    return S


def ring_from_json(data) -> FiniteRing:
    if "zmod" in data:
        return zmod(int(data["zmod"]))
    if "dual" in data:
        return dual_numbers(int(data["dual"]))
    if "truncated" in data:
        t = data["truncated"]
        return truncated_polynomial(int(t["p"]), int(t["k"]))
    if data.get("f4"):
        return f4()
    basis = [str(b) for b in data["basis"]]
    moduli = [int(n) for n in data["moduli"]]
    if len(basis) != len(moduli):
        raise RingAxiomFailure("basis and moduli differ in length")
    S = _struct_from_products(basis, moduli, data.get("products", {}))
    return FiniteRing(moduli, S, data["one"], basis)


def zmod(n: int) -> FiniteRing:
    return FiniteRing([n], [[[1]]], [1], ["1"])


def dual_numbers(n: int) -> FiniteRing:
    """``Z/n[ε]/(ε²)``."""
    S = np.zeros((2, 2, 2), dtype=np.int64)
    S[0, 0, 0] = S[0, 1, 1] = S[1, 0, 1] = 1
    return FiniteRing([n, n], S, [1, 0], ["1", "ε"])


def truncated_polynomial(p: int, k: int) -> FiniteRing:
    """``F_p[x]/(x^k)`` with basis ``1, x, ..., x^{k-1}``."""
    S = np.zeros((k, k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            if i + j < k:
                S[i, j, i + j] = 1
    names = ["1", "x"] + [f"x^{i}" for i in range(2, k)]
    return FiniteRing([p] * k, S, [1] + [0] * (k - 1), names[:k])


def f4() -> FiniteRing:
    """``F_2[w]/(w² + w + 1)``, the field with four elements."""
    S = np.zeros((2, 2, 2), dtype=np.int64)
    S[0, 0] = [1, 0]
    S[0, 1] = S[1, 0] = [0, 1]
    S[1, 1] = [1, 1]
    return FiniteRing([2, 2], S, [1, 0], ["1", "w"])


def product_ring(R: FiniteRing, S: FiniteRing) -> FiniteRing:
    k, l = R.carrier.k, S.carrier.k
    T = np.zeros((k + l, k + l, k + l), dtype=np.int64)
    T[:k, :k, :k] = R.struct
    T[k:, k:, k:] = S.struct
    basis = [f"{b}_1" for b in R.basis] + [f"{b}_2" for b in S.basis]
    return FiniteRing(R.moduli + S.moduli, T, np.concatenate([R.one_coords, S.one_coords]), basis)


# ---------------------------------------------------------------------------
# ψ-rings


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    passed: bool
    witness: str = ""

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "verdict": "PASS" if self.passed else "FAIL", "witness": self.witness}


def _first(mask: np.ndarray):
    hit = np.argwhere(mask)
    return tuple(int(v) for v in hit[0]) if len(hit) else None


class FinitePsiRing:
    """A finite commutative ring with ring endomorphisms ``Ψ^m`` indexed by an
    :class:`ActionMonoid`.  ``psi[m]`` is the matrix whose column j holds the
    coordinates of ``Ψ^m(e_j)``."""

    def __init__(self, ring: FiniteRing, monoid: ActionMonoid, psi: Sequence, check: bool = True):
        self.ring = ring
        self.monoid = monoid
        k = ring.carrier.k
        if len(psi) != monoid.order:
            raise PsiError("need one Ψ matrix per monoid element")
        self.psi_mats = [np.asarray(P, dtype=np.int64).reshape(k, k) for P in psi]
        bad = [m for m, P in enumerate(self.psi_mats) if ring.carrier.well_defined(P, ring.carrier) is not None]
        if bad:
            raise PsiAxiomFailure(f"Ψ^{monoid.elements[bad[0]]} is not additive on the carrier", (monoid.elements[bad[0]],))
        self.psi = [ring.carrier.linear_map(P, ring.carrier) for P in self.psi_mats]
        if check:
            self.validate()

    @property
    def size(self) -> int:
        return self.ring.size

    def check_axioms(self) -> list[AxiomResult]:
        """Exhaustive verdicts: each Ψ^m preserves 1 and ×, ``Ψ^1 = id`` and
        ``Ψ^n Ψ^m = Ψ^{nm}``."""
        R, Mo = self.ring, self.monoid
        E, name = Mo.elements, R.name
        out = []
        w = next((m for m in range(Mo.order) if self.psi[m][R.one] != R.one), None)
        out.append(AxiomResult("unital", w is None, "" if w is None else f"Ψ^{E[w]}(1) != 1"))
        wit = ""
        for m in range(Mo.order):
            P = self.psi[m]
            hit = _first(P[R.mul] != R.mul[P[:, None], P[None, :]])
            if hit:
                wit = f"Ψ^{E[m]}({name(hit[0])}·{name(hit[1])}) != Ψ^{E[m]}({name(hit[0])})·Ψ^{E[m]}({name(hit[1])})"
                break
        out.append(AxiomResult("multiplicative", not wit, wit))
        ident = np.arange(R.size)
        hit = _first(self.psi[Mo.unit] != ident)
        out.append(AxiomResult("identity", hit is None, "" if hit is None else f"Ψ^1({name(hit[0])}) != {name(hit[0])}"))
        out.append(_composition_result(Mo, self.psi, name))
        return out

    def validate(self):
        for res in self.check_axioms():
            if not res.passed:
                raise PsiAxiomFailure(f"{res.axiom} axiom fails: {res.witness}", (res.witness,))

    def to_json(self) -> dict:
        E = self.monoid.elements
        return {
            "monoid": self.monoid.to_json(),
            "ring": self.ring.to_json(),
            "psi": {E[m]: P.tolist() for m, P in enumerate(self.psi_mats)},
        }

    def __repr__(self):
        return f"FinitePsiRing({self.ring!r}, {self.monoid!r})"


def _composition_result(Mo: ActionMonoid, psi: Sequence[np.ndarray], name: Callable[[int], str]) -> AxiomResult:
    E = Mo.elements
    for n in range(Mo.order):
        for m in range(Mo.order):
            hit = _first(psi[n][psi[m]] != psi[Mo.mul(n, m)])
            if hit:
                x = name(hit[0])
                return AxiomResult(
                    "composition", False, f"(n, m, x) = ({E[n]}, {E[m]}, {x}): Ψ^{E[n]}Ψ^{E[m]}({x}) != Ψ^{E[Mo.mul(n, m)]}({x})"
                )
    return AxiomResult("composition", True)


def trivial_psi(ring: FiniteRing, monoid: ActionMonoid | None = None) -> FinitePsiRing:
    """Every Ψ^m is the identity."""
    monoid = monoid or trivial_monoid()
    k = ring.carrier.k
    return FinitePsiRing(ring, monoid, [np.eye(k, dtype=np.int64)] * monoid.order)


# ---------------------------------------------------------------------------
# modules


class FiniteModule:
    """Module over a :class:`FiniteRing` with additive group ``Z/m_1 × ...``.

    ``action[i]`` is the matrix of multiplication by the ring generator e_i."""

    def __init__(self, ring: FiniteRing, moduli, action, basis: Sequence[str] | None = None, check: bool = True):
        self.ring = ring
        self.carrier = Carrier(moduli)
        k, l = ring.carrier.k, self.carrier.k
        self.action_mats = np.asarray(action, dtype=np.int64).reshape(k, l, l)
        self.basis = tuple(basis) if basis is not None else tuple(f"m{i}" for i in range(l))
        if check:
            self.validate()
        C = self.carrier
        self.add = C.add_table()
        self.neg = C.neg()
        self.act = C.encode(np.einsum("ai,ilj,bj->abl", ring.carrier.elems, self.action_mats, C.elems))

    @property
    def size(self) -> int:
        return self.carrier.size

    def element_action(self, r_coords: np.ndarray) -> np.ndarray:
        return np.einsum("i,ilj->lj", r_coords, self.action_mats)

    def validate(self):
        R, C = self.ring, self.carrier
        k, l = R.carrier.k, C.k
        if l == 0:
            return
        mod = C._mod[:, None]
        A = self.action_mats
        for i, n in enumerate(R.moduli):
            if np.any((n * A[i]) % mod):
                raise ModuleAxiomFailure(f"{n}·{R.basis[i]} = 0 in the ring but does not act as zero")
        for i in range(k):
            if C.well_defined(A[i], C) is not None:
                raise ModuleAxiomFailure(f"action of {R.basis[i]} is not well defined on the carrier")
        if np.any((self.element_action(R.one_coords) - np.eye(l, dtype=np.int64)) % mod):
            raise ModuleAxiomFailure("the unit does not act as identity")
        for i in range(k):
            for j in range(k):
                lhs = self.element_action(R.struct[i, j])
                if np.any((lhs - A[i] @ A[j]) % mod):
                    raise ModuleAxiomFailure(f"({R.basis[i]}·{R.basis[j]})·m != {R.basis[i]}·({R.basis[j]}·m)")

    def name(self, x: int) -> str:
        return _fmt(self.carrier.elems[x], self.basis)

    def to_json(self) -> dict:
        R = self.ring
        return {
            "moduli": list(self.carrier.moduli),
            "basis": list(self.basis),
            "action": {R.basis[i]: self.action_mats[i].tolist() for i in range(R.carrier.k)},
        }


class PsiModule:
    """A module over a :class:`FinitePsiRing` with additive maps ``Ψ^m``."""

    def __init__(self, R: FinitePsiRing, M: FiniteModule, psi: Sequence, check: bool = True):
        if M.ring is not R.ring:
            raise ModuleAxiomFailure("module is over a different ring")
        self.R = R
        self.module = M
        l = M.carrier.k
        if len(psi) != R.monoid.order:
            raise PsiError("need one Ψ matrix per monoid element")
        self.psi_mats = [np.asarray(P, dtype=np.int64).reshape(l, l) for P in psi]
        for m, P in enumerate(self.psi_mats):
            if M.carrier.well_defined(P, M.carrier) is not None:
                raise PsiAxiomFailure(f"Ψ^{R.monoid.elements[m]} is not additive on the module", (R.monoid.elements[m],))
        self.psi = [M.carrier.linear_map(P, M.carrier) for P in self.psi_mats]
        if check:
            self.validate()

    @property
    def size(self) -> int:
        return self.module.size

    def check_axioms(self) -> list[AxiomResult]:
        Mo, M, R = self.R.monoid, self.module, self.R.ring
        E = Mo.elements
        out = []
        hit = _first(self.psi[Mo.unit] != np.arange(M.size))
        out.append(AxiomResult("identity", hit is None, "" if hit is None else f"Ψ^1({M.name(hit[0])}) != {M.name(hit[0])}"))
        wit = ""
        for n in range(Mo.order):
            P, Q = self.R.psi[n], self.psi[n]
            hit = _first(Q[M.act] != M.act[P[:, None], Q[None, :]])
            if hit:
                r, a = hit
                wit = f"Ψ^{E[n]}({R.name(r)}·{M.name(a)}) != Ψ^{E[n]}({R.name(r)})Ψ^{E[n]}({M.name(a)})"
                break
        out.append(AxiomResult("semilinear", not wit, wit))
        out.append(_composition_result(Mo, self.psi, M.name))
        return out

    def validate(self):
        for res in self.check_axioms():
            if not res.passed:
                raise PsiAxiomFailure(f"{res.axiom} axiom fails: {res.witness}", (res.witness,))

    def to_json(self) -> dict:
        E = self.R.monoid.elements
        d = self.module.to_json()
        d["psi"] = {E[m]: P.tolist() for m, P in enumerate(self.psi_mats)}
        return d


def zero_module(R: FinitePsiRing) -> PsiModule:
    k = R.ring.carrier.k
    M = FiniteModule(R.ring, [], np.zeros((k, 0, 0), dtype=np.int64))
    return PsiModule(R, M, [np.zeros((0, 0), dtype=np.int64)] * R.monoid.order)


def regular_module(R: FinitePsiRing, check: bool = True) -> PsiModule:
    """R as a module over itself, with its own Ψ."""
    ring = R.ring
    A = ring.struct.transpose(0, 2, 1)  # A[i][l, j] = coefficient of e_l in e_i e_j
    M = FiniteModule(ring, ring.moduli, A, ring.basis)
    return PsiModule(R, M, R.psi_mats, check=check)


def module_from_json(R: FinitePsiRing, data, check: bool = True) -> PsiModule:
    if data == "regular":
        return regular_module(R, check)
    if data == "zero":
        return zero_module(R)
    ring = R.ring
    moduli = [int(n) for n in data["moduli"]]
    l = len(moduli)
    k = ring.carrier.k
    acts = np.zeros((k, l, l), dtype=np.int64)
    given = data.get("action", {})
    for i, b in enumerate(ring.basis):
        if b in given:
            acts[i] = np.asarray(given[b], dtype=np.int64).reshape(l, l)
        elif np.array_equal(ring.struct[i], np.eye(k, dtype=np.int64)):
            acts[i] = np.eye(l, dtype=np.int64)
    for b in given:
        if b not in ring.basis:
            raise ModuleAxiomFailure(f"action given for unknown ring generator {b!r}")
    M = FiniteModule(ring, moduli, acts, data.get("basis"))
    return PsiModule(R, M, _psi_list(R.monoid, data.get("psi", {}), l, "module"), check=check)


def _psi_list(Mo: ActionMonoid, given: Mapping, k: int, what: str) -> list[np.ndarray]:
    for m in given:
        Mo.el(m)
    out = []
    for m, e in enumerate(Mo.elements):
        if e in given:
            out.append(np.asarray(given[e], dtype=np.int64).reshape(k, k))
        elif m == Mo.unit:
            out.append(np.eye(k, dtype=np.int64))
        else:
            raise PsiError(f"{what}: no Ψ given for monoid element {e!r}")
    return out


def psi_ring_from_json(data, check: bool = True) -> FinitePsiRing:
    """``{"monoid": ..., "ring": ..., "psi": {element: matrix}}``; Ψ of the
    unit defaults to the identity."""
    if "ring" not in data:
        raise PsiError("ψ-ring is missing field 'ring'")
    Mo = monoid_from_json(data.get("monoid", "trivial"))
    ring = ring_from_json(data["ring"])
    return FinitePsiRing(ring, Mo, _psi_list(Mo, data.get("psi", {}), ring.carrier.k, "ring"), check=check)


# ---------------------------------------------------------------------------
# semidirect product, derivations, sections


def semidirect_product(P: PsiModule) -> FinitePsiRing:
    """``R ⋊ M`` with ``(r, m)(r', m') = (rr', rm' + r'm)`` and Ψ componentwise.

    Coordinates are those of R followed by those of M."""
    R, M = P.R.ring, P.module
    k, l = R.carrier.k, M.carrier.k
    T = np.zeros((k + l, k + l, k + l), dtype=np.int64)
    T[:k, :k, :k] = R.struct
    for i in range(k):
        T[i, k:, k:] = M.action_mats[i].T  # e_i · f_a = Σ_b A_i[b, a] f_b
        T[k:, i, k:] = M.action_mats[i].T
    basis = list(R.basis) + [f"({b})" for b in M.basis]
    S = FiniteRing(R.moduli + M.carrier.moduli, T, np.concatenate([R.one_coords, np.zeros(l, np.int64)]), basis)
    psi = []
    for m in range(P.R.monoid.order):
        B = np.zeros((k + l, k + l), dtype=np.int64)
        B[:k, :k] = P.R.psi_mats[m]
        B[k:, k:] = P.psi_mats[m]
        psi.append(B)
    return FinitePsiRing(S, P.R.monoid, psi)


def _pair_index(P: PsiModule):
    """Index in ``R ⋊ M`` of the pair (x, a): R coordinates are the leading
    digits, so the index is ``x * |M| + a``."""
    return lambda x, a: x * P.module.size + a


def psi_derivations(P: PsiModule, bound: int = DEFAULT_ENUM_BOUND) -> list[tuple[int, ...]]:
    """All ψ-derivations ``d: R -> M`` as tuples ``(d(x) for x in R)``.

    Additive maps are enumerated through the images of the generators of the
    additive group of R (each image must be killed by the generator's order);
    the Leibniz rule and ψ-equivariance are then checked on all elements."""
    R, M = P.R.ring, P.module
    cands = [M.carrier.torsion(n) for n in R.moduli]
    total = int(np.prod([len(c) for c in cands], dtype=object)) if cands else 1
    if total > bound:
        raise TooLarge(f"{total} additive maps to enumerate", bound)
    out = []
    e = R.carrier.elems
    for choice in itertools.product(*cands):
        D = M.carrier.elems[list(choice)].T if choice else np.zeros((M.carrier.k, 0), np.int64)
        d = M.carrier.encode(e @ D.T) if M.carrier.k else np.zeros(R.size, np.int64)
        if _is_derivation(P, d):
            out.append(tuple(int(v) for v in d))
    return sorted(out)


def _is_derivation(P: PsiModule, d: np.ndarray) -> bool:
    R, M = P.R.ring, P.module
    lhs = d[R.mul]
    xdy = M.act[:, d]  # [x, y] -> x·d(y)
    rhs = M.add[xdy, xdy.T]
    if not np.array_equal(lhs, rhs):
        return False
    return all(np.array_equal(P.psi[n][d], d[P.R.psi[n]]) for n in range(P.R.monoid.order))


def is_psi_derivation(P: PsiModule, d: Sequence[int]) -> bool:
    d = np.asarray(d, dtype=np.int64)
    R, M = P.R.ring, P.module
    if not np.array_equal(d[R.add], M.add[d[:, None], d[None, :]]):
        return False
    return _is_derivation(P, d)


def sections_of_projection(P: PsiModule, bound: int = DEFAULT_ENUM_BOUND) -> list[tuple[int, ...]]:
    """All ψ-ring homomorphisms ``σ: R -> R ⋊ M`` with ``π σ = id``, as tuples
    of indices into the semidirect product.

    Backtracking over the fibres of π, checking additivity, multiplicativity,
    the unit and ψ-compatibility in the tables of ``R ⋊ M`` as soon as all
    participants are assigned.  ``bound`` limits the number of search nodes."""
    S = semidirect_product(P)
    R = P.R.ring
    n, msize = R.size, P.module.size
    Sr = S.ring
    pair = _pair_index(P)
    psiR, psiS = P.R.psi, S.psi
    order = list(range(n))
    sigma = [-1] * n
    out: list[tuple[int, ...]] = []
    nodes = 0

    def consistent(x: int) -> bool:
        sx = sigma[x]
        if x == R.one and sx != Sr.one:
            return False
        for y in range(n):
            sy = sigma[y]
            if sy < 0:
                continue
            s = sigma[R.add[x, y]]
            if s >= 0 and s != Sr.add[sx, sy]:
                return False
            s = sigma[R.mul[x, y]]
            if s >= 0 and s != Sr.mul[sx, sy]:
                return False
        for m in range(len(psiR)):
            t = sigma[psiR[m][x]]
            if t >= 0 and t != psiS[m][sx]:
                return False
            # x may also be the image Ψ^m(z) of an already assigned z
            for z in np.flatnonzero(psiR[m] == x):
                sz = sigma[int(z)]
                if sz >= 0 and psiS[m][sz] != sx:
                    return False
        return True

    def rec(pos: int):
        nonlocal nodes
        if pos == n:
            out.append(tuple(sigma))
            return
        x = order[pos]
        for a in range(msize):
            nodes += 1
            if nodes > bound:
                raise TooLarge("section search exceeded its node budget", bound)
            sigma[x] = pair(x, a)
            if consistent(x):
                rec(pos + 1)
            sigma[x] = -1

    rec(0)
    return sorted(out)


@dataclass
class SectionReport:
    sections: list[tuple[int, ...]]
    derivations: list[tuple[int, ...]]
    pairing: list[tuple[int, int]]  # (section index, derivation index)
    ok: bool

    def to_json(self, P: PsiModule) -> dict:
        R, M = P.R.ring, P.module
        msize = M.size

        def fmt_sec(s):
            return {R.name(x): f"({R.name(v // msize)}, {M.name(v % msize)})" for x, v in enumerate(s)}

        def fmt_der(d):
            return {R.name(x): M.name(v) for x, v in enumerate(d)}

        return {
            "sections": len(self.sections),
            "derivations": len(self.derivations),
            "pairs": [{"section": fmt_sec(self.sections[i]), "derivation": fmt_der(self.derivations[j])} for i, j in self.pairing],
            "verdict": "PASS" if self.ok else "FAIL",
        }


def pair_sections_with_derivations(P: PsiModule, bound: int = DEFAULT_ENUM_BOUND) -> SectionReport:
    """Match each section σ with ``d(x) = second component of σ(x)`` and check
    that this is a bijection onto the ψ-derivations, with inverse
    ``d ↦ (x ↦ (x, d(x)))``."""
    secs = sections_of_projection(P, bound)
    ders = psi_derivations(P, bound)
    msize = P.module.size
    pair = _pair_index(P)
    where = {d: j for j, d in enumerate(ders)}
    pairing = []
    ok = len(secs) == len(ders)
    for i, s in enumerate(secs):
        if any(v // msize != x for x, v in enumerate(s)):
            ok = False
            continue
        d = tuple(v % msize for v in s)
        j = where.get(d)
        if j is None:
            ok = False
            continue
        if tuple(pair(x, a) for x, a in enumerate(ders[j])) != s:
            ok = False
        pairing.append((i, j))
    if len({j for _, j in pairing}) != len(ders):
        ok = False
    return SectionReport(secs, ders, pairing, ok)


# ---------------------------------------------------------------------------
# twisted modules and the derivation natural system

TWIST_CONVENTIONS = ("restriction", "literal")


def twisted_action(P: PsiModule, f: int, convention: str = "restriction") -> np.ndarray:
    """Matrices of the generators of R acting on ``M^f``, without validation.

    ``restriction``: ``r·a = Ψ^f(r) a``.  ``literal``: ``r·a = Ψ^f(r) Ψ^f(a)``."""
    if convention not in TWIST_CONVENTIONS:
        raise PsiError(f"unknown twist convention {convention!r}")
    M = P.module
    Pf = P.R.psi_mats[f]
    mats = np.stack([M.element_action(Pf[:, i]) for i in range(P.R.ring.carrier.k)]) if P.R.ring.carrier.k else M.action_mats
    if convention == "literal":
        mats = np.einsum("ilj,jm->ilm", mats, P.psi_mats[f])
    return mats


def twist_module(P: PsiModule, f, convention: str = "restriction") -> FiniteModule:
    """The R-module ``M^f`` on the same additive group; module axioms are
    re-verified and failures raise :class:`ModuleAxiomFailure`."""
    f = P.R.monoid.el(f)
    M = P.module
    return FiniteModule(P.R.ring, M.carrier.moduli, twisted_action(P, f, convention), M.basis)


def _derivation_basis(P: PsiModule, f: int, p: int) -> Matrix:
    """Basis (columns) of ring derivations ``R -> M^f`` over F_p.

    Unknowns are ``d(e_i) ∈ M``, stacked generator by generator; Leibniz is
    bilinear so it is imposed on pairs of generators."""
    R, M = P.R.ring, P.module
    k, l = R.carrier.k, M.carrier.k
    F = GF(p)
    A = twisted_action(P, f) % p
    rows = []
    for i, n in enumerate(R.moduli):
        if n % p:
            blk = np.zeros((l, k * l), np.int64)
            blk[:, i * l : (i + 1) * l] = np.eye(l, dtype=np.int64)
            rows.append(blk)
    for i in range(k):
        for j in range(i, k):
            blk = np.zeros((l, k * l), np.int64)
            for t in range(k):
                blk[:, t * l : (t + 1) * l] += R.struct[i, j, t] * np.eye(l, dtype=np.int64)
            blk[:, j * l : (j + 1) * l] -= A[i]
            blk[:, i * l : (i + 1) * l] -= A[j]
            rows.append(blk)
    E = np.vstack(rows) if rows else np.zeros((0, k * l), np.int64)
    return kernel_basis(Matrix(F, E % p, shape=(E.shape[0], k * l)))


def psi_derivation_system(P: PsiModule, check: bool = True) -> NaturalSystem:
    """Natural system on the one-object category of the monoid with
    ``D(f) = Der(R, M^f)`` (restriction twist), ``u_* d = Ψ^u ∘ d`` and
    ``v^* d = d ∘ Ψ^v``.  The module must be an F_p-vector space."""
    M = P.module
    primes = set(M.carrier.moduli)
    if len(primes) > 1 or any(not _is_prime(q) for q in primes):
        raise PsiError("the derivation system needs a module of prime exponent")
    p = primes.pop() if primes else 2
    F = GF(p)
    Mo = P.R.monoid
    I = Mo.category()
    k, l = P.R.ring.carrier.k, M.carrier.k
    # morphism indices of the monoid category follow the element order
    assert [I.morphisms[m] for m in range(Mo.order)] == list(Mo.elements)
    bases = [_derivation_basis(P, f, p) for f in range(Mo.order)]
    eye_k = np.eye(k, dtype=np.int64)
    eye_l = np.eye(l, dtype=np.int64)

    def coords(target: Matrix, V: np.ndarray) -> Matrix:
        if target.cols == 0:
            return Matrix.zeros(F, 0, V.shape[1])
        return solve(target, Matrix(F, V % p, shape=V.shape))

    def push(u, f):
        V = np.kron(eye_k, P.psi_mats[u]) @ bases[f].a.astype(np.int64)
        return coords(bases[Mo.mul(u, f)], V)

    def pull(v, f):
        V = np.kron(P.R.psi_mats[v].T, eye_l) @ bases[f].a.astype(np.int64)
        return coords(bases[Mo.mul(f, v)], V)

    return NaturalSystem(I, F, [b.cols for b in bases], push, pull, check=check)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, int(n**0.5) + 1))


# ---------------------------------------------------------------------------
# catalogue of finite instances


def psi_catalogue() -> list[tuple[str, PsiModule]]:
    """Small ψ-rings with ψ-modules used by the bijection checks."""
    out = []
    I2 = np.eye(2, dtype=np.int64)

    def add(name, R, M):
        out.append((name, M if isinstance(M, PsiModule) else M(R)))

    F2 = trivial_psi(zmod(2))
    add("F2, M=F2, trivial monoid", F2, regular_module)
    add("F2, M=0", F2, zero_module)
    add("Z/4, M=Z/4", trivial_psi(zmod(4)), regular_module)

    t = idempotent_monoid()
    D2 = dual_numbers(2)
    # Ψ^t(a + bε) = a
    D2t = FinitePsiRing(D2, t, [I2, np.array([[1, 0], [0, 0]])])
    eps_zero = FiniteModule(D2, [2], [[[1]], [[0]]], ["m"])
    add("F2[ε], Ψ^t kills ε, M=F2 with Ψ^t=1", D2t, lambda R: PsiModule(R, eps_zero, [np.eye(1, dtype=np.int64)] * 2))
    add("F2[ε], Ψ^t kills ε, M=F2 with Ψ^t=0", D2t, lambda R: PsiModule(R, eps_zero, [np.eye(1, dtype=np.int64), np.zeros((1, 1), np.int64)]))
    add("F2[ε], Ψ^t kills ε, M=regular", D2t, regular_module)
    add("F2[ε], trivial monoid, M=F2", trivial_psi(D2), lambda R: PsiModule(R, eps_zero, [np.eye(1, dtype=np.int64)]))

    D3 = dual_numbers(3)
    C2 = cyclic_monoid(2)
    D3g = FinitePsiRing(D3, C2, [I2, np.array([[1, 0], [0, 2]])])  # Ψ^g(ε) = -ε
    eps3 = FiniteModule(D3, [3], [[[1]], [[0]]], ["m"])
    add("F3[ε], Ψ^g(ε)=-ε, M=F3 with Ψ^g=-1", D3g, lambda R: PsiModule(R, eps3, [np.eye(1, dtype=np.int64), np.array([[2]])]))
    add("F3[ε], Ψ^g(ε)=-ε, M=F3 with Ψ^g=1", D3g, lambda R: PsiModule(R, eps3, [np.eye(1, dtype=np.int64)] * 2))

    F4 = f4()
    frob = np.array([[1, 1], [0, 1]])  # w ↦ w² = w + 1
    add("F4 with Frobenius, M=F4", FinitePsiRing(F4, C2, [I2, frob]), regular_module)

    F2xF2 = product_ring(zmod(2), zmod(2))
    swap = np.array([[0, 1], [1, 0]])
    add("F2×F2 with swap, M=regular", FinitePsiRing(F2xF2, C2, [I2, swap]), regular_module)

    X3 = truncated_polynomial(2, 3)
    tp = truncated_power_monoid(2, 1, 1)  # {1, 2} with 2·2 = 2
    kill = np.array([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    add("F2[x]/x^3, Ψ^2 kills x, M=regular", FinitePsiRing(X3, tp, [np.eye(3, dtype=np.int64), kill]), regular_module)
    x3mod = FiniteModule(X3, [2], [[[1]], [[0]], [[0]]], ["m"])
    add("F2[x]/x^3, trivial monoid, M=F2", trivial_psi(X3), lambda R: PsiModule(R, x3mod, [np.eye(1, dtype=np.int64)]))

    D4 = dual_numbers(4)
    z4mod = FiniteModule(D4, [2], [[[1]], [[0]]], ["m"])
    add("Z/4[ε], M=F2", trivial_psi(D4), lambda R: PsiModule(R, z4mod, [np.eye(1, dtype=np.int64)]))
    return out


# ---------------------------------------------------------------------------
# free ψ-rings (symbolic)

Monomial = tuple  # sorted tuple of (variable index, exponent)


class DegreeCapExceeded(TooLarge):
    pass


class FreePsiRing:
    """Polynomial ring over ℤ on variables ``a_g^{(m)}`` for each generator g
    and monoid element m, with ``Ψ^n(a_g^{(m)}) = a_g^{(nm)}``.

    Polynomials are dicts ``{monomial: coefficient}`` with monomials in sorted
    canonical form; products above ``degree_cap`` raise."""

    def __init__(self, generators: Sequence[str], monoid: ActionMonoid, degree_cap: int = DEFAULT_DEGREE_CAP):
        self.generators = tuple(str(g) for g in generators)
        if len(set(self.generators)) != len(self.generators):
            raise PsiError("duplicate generator names")
        self.monoid = monoid
        self.degree_cap = int(degree_cap)
        self.variables = [(g, m) for g in range(len(self.generators)) for m in range(monoid.order)]
        self._var = {v: i for i, v in enumerate(self.variables)}

    def var(self, g, m=None) -> dict:
        g = self.generators.index(g) if isinstance(g, str) else int(g)
        m = self.monoid.unit if m is None else self.monoid.el(m)
        return {((self._var[(g, m)], 1),): 1}

    def var_index(self, g: int, m: int) -> int:
        return self._var[(g, m)]

    def var_name(self, v: int) -> str:
        g, m = self.variables[v]
        gn = self.generators[g]
        return gn if m == self.monoid.unit else f"{gn}^({self.monoid.elements[m]})"

    @staticmethod
    def const(c: int) -> dict:
        return {(): c} if c else {}

    @staticmethod
    def add(p: dict, q: dict) -> dict:
        out = dict(p)
        for mono, c in q.items():
            v = out.get(mono, 0) + c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
        return out

    @staticmethod
    def scale(p: dict, c: int) -> dict:
        return {m: c * v for m, v in p.items()} if c else {}

    @staticmethod
    def degree(p: dict) -> int:
        return max((sum(e for _, e in mono) for mono in p), default=0)

    def mul(self, p: dict, q: dict) -> dict:
        out: dict = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                mono = _mono_mul(m1, m2)
                if sum(e for _, e in mono) > self.degree_cap:
                    raise DegreeCapExceeded("product exceeds the degree cap", self.degree_cap)
                v = out.get(mono, 0) + c1 * c2
                if v:
                    out[mono] = v
                else:
                    out.pop(mono, None)
        return out

    def psi(self, n, p: dict) -> dict:
        """``Ψ^n``: the ring endomorphism ``a_g^{(m)} ↦ a_g^{(nm)}``."""
        n = self.monoid.el(n)
        out: dict = {}
        for mono, c in p.items():
            new = []
            for v, e in mono:
                g, m = self.variables[v]
                new.append((self._var[(g, self.monoid.mul(n, m))], e))
            mono2 = _canon(new)
            v = out.get(mono2, 0) + c
            if v:
                out[mono2] = v
            else:
                out.pop(mono2, None)
        return out

    def fmt(self, p: dict) -> str:
        if not p:
            return "0"
        terms = []
        for mono in sorted(p):
            c = p[mono]
            body = "*".join(self.var_name(v) if e == 1 else f"{self.var_name(v)}^{e}" for v, e in mono)
            if not body:
                terms.append(str(c))
            else:
                terms.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(terms)

    def monomials(self, max_degree: int) -> list[Monomial]:
        """All monomials of degree at most ``max_degree``, sorted."""
        nv = len(self.variables)
        out = [()]
        for deg in range(1, max_degree + 1):
            for combo in itertools.combinations_with_replacement(range(nv), deg):
                out.append(_canon([(v, 1) for v in combo]))
        return out

    def check_axioms(self) -> list[AxiomResult]:
        """``Ψ^1 = id`` and ``Ψ^nΨ^m = Ψ^{nm}`` on every variable, and Ψ^n
        multiplicative on products of two variables."""
        Mo = self.monoid
        E = Mo.elements
        res = []
        bad = next((v for v in range(len(self.variables)) if self.psi(Mo.unit, self._v(v)) != self._v(v)), None)
        res.append(AxiomResult("identity", bad is None, "" if bad is None else f"Ψ^1({self.var_name(bad)})"))
        wit = ""
        for n in range(Mo.order):
            for m in range(Mo.order):
                for v in range(len(self.variables)):
                    x = self._v(v)
                    if self.psi(n, self.psi(m, x)) != self.psi(Mo.mul(n, m), x):
                        wit = f"(n, m, x) = ({E[n]}, {E[m]}, {self.var_name(v)})"
                        break
                if wit:
                    break
            if wit:
                break
        res.append(AxiomResult("composition", not wit, wit))
        wit = ""
        for n in range(Mo.order):
            for v, w in itertools.combinations_with_replacement(range(len(self.variables)), 2):
                x, y = self._v(v), self._v(w)
                if self.psi(n, self.mul(x, y)) != self.mul(self.psi(n, x), self.psi(n, y)):
                    wit = f"Ψ^{E[n]} on {self.var_name(v)}*{self.var_name(w)}"
                    break
            if wit:
                break
        res.append(AxiomResult("multiplicative", not wit, wit))
        return res

    def _v(self, v: int) -> dict:
        return {((v, 1),): 1}

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "monoid": self.monoid.to_json(),
            "degree_cap": self.degree_cap,
            "variables": [self.var_name(v) for v in range(len(self.variables))],
            "psi": {
                self.monoid.elements[n]: {self.var_name(v): self.fmt(self.psi(n, self._v(v))) for v in range(len(self.variables))}
                for n in range(self.monoid.order)
            },
        }


def _canon(factors) -> Monomial:
    acc: dict = {}
    for v, e in factors:
        acc[v] = acc.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in acc.items() if e))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return _canon(list(a) + list(b))


def free_psi_ring(generators: Sequence[str], monoid: ActionMonoid, degree_cap: int = DEFAULT_DEGREE_CAP) -> FreePsiRing:
    return FreePsiRing(generators, monoid, degree_cap)


class FreeExtension:
    """The ψ-ring map ``F -> S`` determined by generator values in a finite
    ψ-ring S over the same monoid: ``a_g^{(m)} ↦ Ψ^m(s_g)``."""

    def __init__(self, F: FreePsiRing, S: FinitePsiRing, values: Sequence[int]):
        if F.monoid is not S.monoid and F.monoid.to_json() != S.monoid.to_json():
            raise PsiError("free ring and target use different monoids")
        if len(values) != len(F.generators):
            raise PsiError("need one value per generator")
        self.F, self.S = F, S
        self.values = tuple(int(v) for v in values)
        self.on_vars = [int(S.psi[m][self.values[g]]) for g, m in F.variables]

    def eval_monomial(self, mono: Monomial) -> int:
        R = self.S.ring
        acc = R.one
        for v, e in mono:
            for _ in range(e):
                acc = R.mul[acc, self.on_vars[v]]
        return int(acc)

    def __call__(self, p: dict) -> int:
        R = self.S.ring
        acc = R.zero
        for mono, c in p.items():
            x = self.eval_monomial(mono)
            acc = R.add[acc, _int_multiple(R.add, R.neg, x, c, R.zero)]
        return int(acc)

    def check(self, max_degree: int = 3) -> bool:
        """Ψ-compatibility on monomials of degree ≤ max_degree and
        multiplicativity on pairs whose product stays within that degree."""
        F, S, R = self.F, self.S, self.S.ring
        monos = F.monomials(max_degree)
        vals = {m: self.eval_monomial(m) for m in monos}
        for n in range(F.monoid.order):
            for mono in monos:
                if self(F.psi(n, {mono: 1})) != S.psi[n][vals[mono]]:
                    return False
        for a in monos:
            for b in monos:
                ab = _mono_mul(a, b)
                if sum(e for _, e in ab) <= max_degree and vals[ab] != R.mul[vals[a], vals[b]]:
                    return False
        return vals[()] == R.one


def _int_multiple(add: np.ndarray, neg: np.ndarray, x: int, c: int, zero: int) -> int:
    if c < 0:
        x, c = int(neg[x]), -c
    acc, base = zero, x
    while c:
        if c & 1:
            acc = int(add[acc, base])
        base = int(add[base, base])
        c >>= 1
    return acc


def extensions_by_search(F: FreePsiRing, S: FinitePsiRing, values: Sequence[int], bound: int = DEFAULT_ENUM_BOUND) -> list[tuple[int, ...]]:
    """All assignments of the variables of F into S that agree with ``values``
    on the generators and commute with every Ψ^n on variables.

    Uniqueness of the extension is the statement that exactly one survives.
    Generators are independent, so the search runs one generator at a time
    over maps ``monoid -> S``."""
    Mo = F.monoid
    per_gen = []
    for g in range(len(F.generators)):
        found = _equivariant_orbit_maps(Mo, S.size, lambda n, x: int(S.psi[n][x]), int(values[g]), bound)
        per_gen.append(found)
    return [tuple(itertools.chain.from_iterable(c)) for c in itertools.product(*per_gen)]


def _equivariant_orbit_maps(Mo: ActionMonoid, size: int, act, start: int, bound: int) -> list[tuple[int, ...]]:
    """Maps ``φ: monoid -> X`` with ``φ(1) = start`` and ``φ(nm) = n·φ(m)``."""
    k = Mo.order
    if size ** max(k - 1, 0) > bound:
        raise TooLarge(f"{size}^{k - 1} candidate maps", bound)
    out = []
    others = [m for m in range(k) if m != Mo.unit]
    for choice in itertools.product(range(size), repeat=len(others)):
        phi = [0] * k
        phi[Mo.unit] = start
        for m, c in zip(others, choice):
            phi[m] = c
        if all(phi[Mo.mul(n, m)] == act(n, phi[m]) for n in range(k) for m in range(k)):
            out.append(tuple(phi))
    return out


class FreeDerivation:
    """ψ-derivation ``d: F -> M`` out of a free ψ-ring, where M is a ψ-module
    over S and F acts through a :class:`FreeExtension` ``φ``.

    Values on generators are arbitrary; on variables ``d(a_g^{(m)}) =
    Ψ^m(d(a_g))`` and on monomials the Leibniz rule determines the rest."""

    def __init__(self, phi: FreeExtension, P: PsiModule, values: Sequence[int]):
        if P.R is not phi.S:
            raise PsiError("module is not over the target of the extension")
        self.phi, self.P = phi, P
        self.values = tuple(int(v) for v in values)
        self.on_vars = [int(P.psi[m][self.values[g]]) for g, m in phi.F.variables]

    def monomial(self, mono: Monomial) -> int:
        M, phi = self.P.module, self.phi
        acc = M.carrier.index([0] * M.carrier.k)
        for t, (v, e) in enumerate(mono):
            rest = tuple((w, f) for s, (w, f) in enumerate(mono) if s != t)
            if e > 1:
                rest = _canon(list(rest) + [(v, e - 1)])
            coef = phi.eval_monomial(rest)
            term = int(M.act[coef, self.on_vars[v]])
            acc = int(M.add[acc, _int_multiple(M.add, M.neg, term, e, 0)])
        return acc

    def __call__(self, p: dict) -> int:
        M = self.P.module
        acc = 0
        for mono, c in p.items():
            acc = int(M.add[acc, _int_multiple(M.add, M.neg, self.monomial(mono), c, 0)])
        return acc

    def check(self, max_degree: int = 3) -> bool:
        """Leibniz on pairs of monomials and ψ-equivariance on monomials, up to
        ``max_degree``."""
        F, M, R = self.phi.F, self.P.module, self.phi.S.ring
        monos = F.monomials(max_degree)
        dv = {m: self.monomial(m) for m in monos}
        fv = {m: self.phi.eval_monomial(m) for m in monos}
        for a in monos:
            for b in monos:
                ab = _mono_mul(a, b)
                if sum(e for _, e in ab) > max_degree:
                    continue
                rhs = M.add[M.act[fv[a], dv[b]], M.act[fv[b], dv[a]]]
                if dv[ab] != rhs:
                    return False
        for n in range(F.monoid.order):
            for mono in monos:
                if self(F.psi(n, {mono: 1})) != self.P.psi[n][dv[mono]]:
                    return False
        return True


def free_derivation_assignments(phi: FreeExtension, P: PsiModule, bound: int = DEFAULT_ENUM_BOUND) -> list[tuple[int, ...]]:
    """Values of ψ-derivations on the variables of F, found by searching all
    maps ``variables -> M`` that commute with Ψ on variables.

    Leibniz places no constraint on variables of a polynomial ring, so these
    are exactly the ψ-derivations; the count should be ``|M|^{#generators}``."""
    F, Mo = phi.F, phi.F.monoid
    per_gen = []
    for g in range(len(F.generators)):
        maps = []
        for start in range(P.size):
            maps.extend(_equivariant_orbit_maps(Mo, P.size, lambda n, x: int(P.psi[n][x]), start, bound))
        per_gen.append(maps)
    return [tuple(itertools.chain.from_iterable(c)) for c in itertools.product(*per_gen)]


def free_psi_ring_from_json(data) -> FreePsiRing:
    sym = data["symbolic"]
    Mo = monoid_from_json(data.get("monoid", "trivial"))
    return FreePsiRing(sym["generators"], Mo, int(sym.get("degree_cap", DEFAULT_DEGREE_CAP)))
