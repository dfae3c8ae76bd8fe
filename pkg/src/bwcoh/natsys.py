"""Natural systems on finite categories and their Baues-Wirsching complex.

A natural system D assigns a free module ``D(f)`` (given by its rank) to every
morphism f, with ``push(α, f): D(f) -> D(α∘f)`` and
``pull(β, f): D(f) -> D(f∘β)``.  The cochain groups are

    C^n = ⊕_{chains (α_1..α_n)} D(α_1∘...∘α_n)

and the coboundary is

    (df)(α_1..α_{n+1}) = (α_1)_* f(α_2..α_{n+1})
                         + Σ_{j=1..n} (-1)^j f(.., α_j α_{j+1}, ..)
                         + (-1)^{n+1} (α_{n+1})^* f(α_1..α_n).

For n = 0 the 0-chains are objects and ``(df)(α) = α_* f(src α) - α^* f(dst α)``.
"""

from __future__ import annotations

import itertools
from typing import Callable, Mapping, Sequence

import numpy as np

from .chaincomplex import CochainComplex, complex_cohomology
from .exactlinalg import FgAbelianGroup, Matrix, Ring, _zeros_array
from .fincat import FiniteCategory, Functor


class NaturalityViolation(ValueError):
    pass


MatrixFn = Callable[[int, int], Matrix]


class NaturalSystem:
    """Natural system on ``base`` with values free of rank ``dims[f]``.

    ``push`` and ``pull`` are callables ``(arrow, f) -> Matrix``; results are
    cached.  Use :meth:`from_tables` for explicit dictionaries.
    """

    def __init__(self, base: FiniteCategory, ring: Ring, dims: Sequence[int], push: MatrixFn, pull: MatrixFn, check: bool = True):
        if len(dims) != base.n_morphisms:
            raise ValueError("need one dimension per morphism")
        self.base = base
        self.ring = ring
        self.dims = tuple(int(d) for d in dims)
        self._push_fn = push
        self._pull_fn = pull
        self._push: dict[tuple[int, int], Matrix] = {}
        self._pull: dict[tuple[int, int], Matrix] = {}
        if check:
            self.validate()

    def push(self, alpha: int, f: int) -> Matrix:
        """``α_*: D(f) -> D(α∘f)``."""
        key = (alpha, f)
        m = self._push.get(key)
        if m is None:
            I = self.base
            af = I.compose(alpha, f)
            m = self._push_fn(alpha, f)
            if m.shape != (self.dims[af], self.dims[f]):
                raise NaturalityViolation(
                    f"push({I.morphisms[alpha]}, {I.morphisms[f]}) has shape {m.shape}, "
                    f"expected {(self.dims[af], self.dims[f])}"
                )
            self._push[key] = m
        return m

    def pull(self, beta: int, f: int) -> Matrix:
        """``β^*: D(f) -> D(f∘β)``."""
        key = (beta, f)
        m = self._pull.get(key)
        if m is None:
            I = self.base
            fb = I.compose(f, beta)
            m = self._pull_fn(beta, f)
            if m.shape != (self.dims[fb], self.dims[f]):
                raise NaturalityViolation(
                    f"pull({I.morphisms[beta]}, {I.morphisms[f]}) has shape {m.shape}, "
                    f"expected {(self.dims[fb], self.dims[f])}"
                )
            self._pull[key] = m
        return m

    @classmethod
    def from_tables(
        cls,
        base: FiniteCategory,
        ring: Ring,
        dims: Sequence[int],
        push: Mapping[tuple[int, int], Matrix] | None = None,
        pull: Mapping[tuple[int, int], Matrix] | None = None,
        check: bool = True,
    ) -> "NaturalSystem":
        """Missing entries default to the identity, which requires the two
        dimensions to agree."""
        push = dict(push or {})
        pull = dict(pull or {})

        def default(table, key, rows, cols, what):
            if key in table:
                return table[key]
            if rows != cols:
                a, f = key
                raise NaturalityViolation(
                    f"{what}({base.morphisms[a]}, {base.morphisms[f]}) missing and dimensions differ"
                )
            return Matrix.identity(ring, rows)

        def pu(a, f):
            return default(push, (a, f), dims[base.compose(a, f)], dims[f], "push")

        def pl(b, f):
            return default(pull, (b, f), dims[base.compose(f, b)], dims[f], "pull")

        return cls(base, ring, dims, pu, pl, check=check)

    def validate(self):
        """Exhaustive check that D is a functor on the factorization category:
        identities act trivially, pushes and pulls compose, and they commute."""
        I = self.base
        M = I.n_morphisms
        T = I.table
        name = I.morphisms
        for f in range(M):
            d = self.dims[f]
            if self.push(I.identity[I.dst[f]], f) != Matrix.identity(self.ring, d):
                raise NaturalityViolation(f"identity does not push trivially on {name[f]}")
            if self.pull(I.identity[I.src[f]], f) != Matrix.identity(self.ring, d):
                raise NaturalityViolation(f"identity does not pull trivially on {name[f]}")
        for f in range(M):
            posts = [a for a in range(M) if I.src[a] == I.dst[f]]
            pres = [b for b in range(M) if I.dst[b] == I.src[f]]
            for a in posts:
                af = int(T[a, f])
                for a2 in range(M):
                    if I.src[a2] == I.dst[a]:
                        lhs = self.push(a2, af) @ self.push(a, f)
                        if lhs != self.push(int(T[a2, a]), f):
                            raise NaturalityViolation(
                                f"push does not compose: ({name[a2]}, {name[a]}) on {name[f]}"
                            )
                for b in pres:
                    lhs = self.push(a, int(T[f, b])) @ self.pull(b, f)
                    rhs = self.pull(b, af) @ self.push(a, f)
                    if lhs != rhs:
                        raise NaturalityViolation(
                            f"push {name[a]} and pull {name[b]} do not commute on {name[f]}"
                        )
            for b in pres:
                fb = int(T[f, b])
                for b2 in range(M):
                    if I.dst[b2] == I.src[b]:
                        lhs = self.pull(b2, fb) @ self.pull(b, f)
                        if lhs != self.pull(int(T[b, b2]), f):
                            raise NaturalityViolation(
                                f"pull does not compose: ({name[b]}, {name[b2]}) on {name[f]}"
                            )

    def to_json(self) -> dict:
        I = self.base
        out = {"dims": {I.morphisms[f]: self.dims[f] for f in range(I.n_morphisms)}, "push": [], "pull": []}
        for a, f in itertools.product(range(I.n_morphisms), repeat=2):
            if I.src[a] == I.dst[f]:
                out["push"].append(
                    {"along": I.morphisms[a], "at": I.morphisms[f], "matrix": _jsonable(self.push(a, f))}
                )
            if I.dst[a] == I.src[f]:
                out["pull"].append(
                    {"along": I.morphisms[a], "at": I.morphisms[f], "matrix": _jsonable(self.pull(a, f))}
                )
        return out

    def __repr__(self):
        return f"NaturalSystem(on {self.base!r}, over {self.ring}, dims={list(self.dims)})"


def _jsonable(m: Matrix) -> list:
    return [[int(x) if not hasattr(x, "denominator") or x.denominator == 1 else str(x) for x in row] for row in m.tolist()]


# --------------------------------------------------------------------------
# Constructors
# --------------------------------------------------------------------------


class LinearFunctor:
    """Covariant functor from a finite category to free modules: a rank per
    object and a matrix per morphism, checked for functoriality."""

    def __init__(self, base: FiniteCategory, ring: Ring, dims: Sequence[int], maps: Sequence[Matrix], check: bool = True):
        self.base = base
        self.ring = ring
        self.dims = tuple(int(d) for d in dims)
        self.maps = tuple(maps)
        if check:
            self.validate()

    def validate(self):
        I = self.base
        if len(self.dims) != I.n_objects or len(self.maps) != I.n_morphisms:
            raise NaturalityViolation("functor data has the wrong length")
        for m in range(I.n_morphisms):
            if self.maps[m].shape != (self.dims[I.dst[m]], self.dims[I.src[m]]):
                raise NaturalityViolation(f"F({I.morphisms[m]}) has the wrong shape")
        for x in range(I.n_objects):
            if self.maps[I.identity[x]] != Matrix.identity(self.ring, self.dims[x]):
                raise NaturalityViolation(f"F(id_{I.objects[x]}) is not the identity")
        for g, f in itertools.product(range(I.n_morphisms), repeat=2):
            h = I.table[g, f]
            if h >= 0 and self.maps[g] @ self.maps[f] != self.maps[h]:
                raise NaturalityViolation(f"F does not preserve {I.morphisms[g]}∘{I.morphisms[f]}")

    def __call__(self, m: int) -> Matrix:
        return self.maps[m]

    @classmethod
    def constant(cls, base: FiniteCategory, ring: Ring, dim: int) -> "LinearFunctor":
        e = Matrix.identity(ring, dim)
        return cls(base, ring, [dim] * base.n_objects, [e] * base.n_morphisms, check=False)

    def precompose(self, G: Functor) -> "LinearFunctor":
        return LinearFunctor(G.src, self.ring, [self.dims[o] for o in G.obj_map], [self.maps[m] for m in G.mor_map])


def natural_system_from_functor(F: LinearFunctor, check: bool = True) -> NaturalSystem:
    """``D(f) = F(dst f)``, ``α_* = F(α)``, ``β^* = id``."""
    I = F.base
    dims = [F.dims[I.dst[f]] for f in range(I.n_morphisms)]
    ident = {k: Matrix.identity(F.ring, k) for k in set(dims)}
    return NaturalSystem(
        I, F.ring, dims, lambda a, f: F.maps[a], lambda b, f: ident[dims[f]], check=check
    )


class LinearBifunctor:
    """Functor ``I^op × I -> free modules``: a rank per pair of objects,
    ``left(β, b)``: B(y, b) -> B(x, b) for ``β: x -> y`` and
    ``right(α, a)``: B(a, y) -> B(a, z) for ``α: y -> z``."""

    def __init__(self, base: FiniteCategory, ring: Ring, dims: Sequence[Sequence[int]], left: MatrixFn, right: MatrixFn):
        self.base = base
        self.ring = ring
        self.dims = [list(r) for r in dims]
        self.left = left
        self.right = right

    @classmethod
    def constant(cls, base: FiniteCategory, ring: Ring, dim: int) -> "LinearBifunctor":
        n = base.n_objects
        e = Matrix.identity(ring, dim)
        return cls(base, ring, [[dim] * n for _ in range(n)], lambda b, y: e, lambda a, x: e)

    @classmethod
    def hom(cls, base: FiniteCategory, ring: Ring) -> "LinearBifunctor":
        """``B(a, b)`` free on ``Hom(a, b)``, acting by composition."""
        I = base
        homs = [[I.hom(a, b) for b in range(I.n_objects)] for a in range(I.n_objects)]
        pos = [[{m: k for k, m in enumerate(homs[a][b])} for b in range(I.n_objects)] for a in range(I.n_objects)]

        def left(beta, b):  # B(y, b) -> B(x, b), h -> h∘β
            x, y = I.src[beta], I.dst[beta]
            out = _zeros_array(ring, len(homs[x][b]), len(homs[y][b]))
            for k, h in enumerate(homs[y][b]):
                out[pos[x][b][int(I.table[h, beta])], k] = 1
            return Matrix(ring, out)

        def right(alpha, a):  # B(a, y) -> B(a, z), h -> α∘h
            y, z = I.src[alpha], I.dst[alpha]
            out = _zeros_array(ring, len(homs[a][z]), len(homs[a][y]))
            for k, h in enumerate(homs[a][y]):
                out[pos[a][z][int(I.table[alpha, h])], k] = 1
            return Matrix(ring, out)

        dims = [[len(homs[a][b]) for b in range(I.n_objects)] for a in range(I.n_objects)]
        return cls(base, ring, dims, left, right)


def natural_system_from_bifunctor(B: LinearBifunctor, check: bool = True) -> NaturalSystem:
    """``D(f: a -> b) = B(a, b)``, ``α_* = B(id, α)``, ``β^* = B(β, id)``."""
    I = B.base
    dims = [B.dims[I.src[f]][I.dst[f]] for f in range(I.n_morphisms)]
    return NaturalSystem(
        I,
        B.ring,
        dims,
        lambda a, f: B.right(a, I.src[f]),
        lambda b, f: B.left(b, I.dst[f]),
        check=check,
    )


def constant_system(I: FiniteCategory, ring: Ring, dim: int) -> NaturalSystem:
    return natural_system_from_functor(LinearFunctor.constant(I, ring, dim), check=False)


def natural_system_from_factorization_functor(
    I: FiniteCategory, ring: Ring, FI, dims: Sequence[int], maps: Sequence[Matrix], check: bool = True
) -> NaturalSystem:
    """Natural system from a representation of the factorization category
    ``FI = factorization_category(I)``: ``maps[k]`` is the matrix of its
    morphism k.  Push along α is the image of ``(α, id)``, pull along β the
    image of ``(id, β)``."""

    def pu(a, f):
        return maps[FI.pair_index[(f, a, I.identity[I.src[f]])]]

    def pl(b, f):
        return maps[FI.pair_index[(f, I.identity[I.dst[f]], b)]]

    return NaturalSystem(I, ring, dims, pu, pl, check=check)


# --------------------------------------------------------------------------
# Baues-Wirsching complex
# --------------------------------------------------------------------------


def bw_offsets(D: NaturalSystem, n: int) -> np.ndarray:
    """Start of each chain's block in ``C^n``; the last entry is ``dim C^n``."""
    dims = D.dims
    sizes = [dims[c.composite] for c in D.base.chains(n)]
    return np.concatenate([[0], np.cumsum(sizes, dtype=np.int64)]).astype(np.int64)


def _merge_sign(j: int) -> int:
    """Sign of the j-th inner face, ``(-1)^j``."""
    return -1 if j % 2 else 1


def bw_differential(D: NaturalSystem, n: int) -> Matrix:
    """``d^n: C^n -> C^{n+1}``."""
    I = D.base
    ring = D.ring
    src_off = bw_offsets(D, n)
    dst_off = bw_offsets(D, n + 1)
    out = _zeros_array(ring, int(dst_off[-1]), int(src_off[-1]))
    I.chains(n)
    pos_n = I._chain_pos[n]
    for r, c in enumerate(I.chains(n + 1)):
        rows = slice(int(dst_off[r]), int(dst_off[r + 1]))
        if rows.start == rows.stop:
            continue
        arr = c.arrows
        a1, alast = arr[0], arr[-1]
        # (α_1)_* f(α_2, ..)
        if n == 0:
            k = pos_n[(c.objects[1],)]
            fk = I.identity[c.objects[1]]
        else:
            k = pos_n[arr[1:]]
            fk = I.chains(n)[k].composite
        out[rows, src_off[k] : src_off[k + 1]] += D.push(a1, fk).a
        # merges
        for j in range(1, n + 1):
            merged = arr[: j - 1] + (int(I.table[arr[j - 1], arr[j]]),) + arr[j + 1 :]
            k = pos_n[merged]
            blk = out[rows, src_off[k] : src_off[k + 1]]
            d = blk.shape[0]
            idx = np.arange(d)
            blk[idx, idx] += _merge_sign(j)
        # (-1)^{n+1} (α_{n+1})^* f(α_1, .., α_n)
        if n == 0:
            k = pos_n[(c.objects[0],)]
            fk = I.identity[c.objects[0]]
        else:
            k = pos_n[arr[:-1]]
            fk = I.chains(n)[k].composite
        m = D.pull(alast, fk).a
        if n % 2:
            out[rows, src_off[k] : src_off[k + 1]] += m
        else:
            out[rows, src_off[k] : src_off[k + 1]] -= m
    return Matrix(ring, ring.normalize(out), _trusted=True)


def bw_complex(D: NaturalSystem, n_max: int, check: bool = True) -> CochainComplex:
    """Cochain complex ``C^0 -> ... -> C^{n_max}``; ``d∘d = 0`` is verified."""
    dims = [int(bw_offsets(D, n)[-1]) for n in range(n_max + 1)]
    diffs = [bw_differential(D, n) for n in range(n_max)]
    return CochainComplex(D.ring, dims, diffs, check=check)


def bw_cohomology(D: NaturalSystem, n_max: int) -> list[FgAbelianGroup]:
    """``H^0 .. H^{n_max}``; the complex is built one degree higher so the top
    group is exact."""
    return complex_cohomology(bw_complex(D, n_max + 1))[: n_max + 1]


# --------------------------------------------------------------------------
# File format
# --------------------------------------------------------------------------


def natural_system_from_json(I: FiniteCategory, ring: Ring, data: Mapping) -> NaturalSystem:
    """Read a natural system on ``I``.

    Accepted shapes: ``{"constant": d}``; ``{"functor": {"dims": {obj: d},
    "maps": {mor: matrix}}}`` for a covariant functor (omitted maps are
    identities); or ``{"dims": {mor: d}, "push": [...], "pull": [...]}``
    where each action entry is ``{"along", "at", "matrix"}`` and omitted
    actions default to the identity."""
    if "constant" in data:
        return constant_system(I, ring, int(data["constant"]))
    if "functor" in data:
        F = data["functor"]
        odims = F.get("dims", {})
        for o in odims:
            I.obj(o)
        dims = [int(odims.get(o, 0)) for o in I.objects]
        given = F.get("maps", {})
        for m in given:
            I.mor(m)
        maps = []
        for m in range(I.n_morphisms):
            s, d = dims[I.src[m]], dims[I.dst[m]]
            name = I.morphisms[m]
            if name in given:
                maps.append(Matrix(ring, given[name], (d, s)))
            elif s == d:
                maps.append(Matrix.identity(ring, s))
            else:
                raise NaturalityViolation(f"functor: no matrix for morphism {name!r} and dimensions differ")
        return natural_system_from_functor(LinearFunctor(I, ring, dims, maps))
    try:
        mdims = data["dims"]
    except KeyError:
        raise NaturalityViolation("natural system needs 'dims', 'constant' or 'functor'") from None
    for m in mdims:
        I.mor(m)
    dims = [int(mdims.get(m, 0)) for m in I.morphisms]

    def table(key, target):
        out = {}
        for entry in data.get(key, []):
            a, f = I.mor(entry["along"]), I.mor(entry["at"])
            t = target(a, f)
            if t < 0:
                raise NaturalityViolation(f"{key}: {entry['along']!r} and {entry['at']!r} are not composable")
            out[(a, f)] = Matrix(ring, entry["matrix"], (dims[t], dims[f]))
        return out

    push = table("push", lambda a, f: I.compose(a, f) if I.src[a] == I.dst[f] else -1)
    pull = table("pull", lambda b, f: I.compose(f, b) if I.dst[b] == I.src[f] else -1)
    return NaturalSystem.from_tables(I, ring, dims, push, pull)
