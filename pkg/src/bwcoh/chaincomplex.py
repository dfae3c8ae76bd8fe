"""Cochain complexes, first-quadrant double complexes and their spectral sequence.

A :class:`DoubleComplex` stores commuting squares; the sign ``(-1)**p`` on the
vertical differential is only introduced by :func:`total_complex`.  The
spectral sequence is the one of the column filtration
``F^p Tot = sum_{p' >= p} C^{p', *}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exactlinalg import (
    FgAbelianGroup,
    LinAlgError,
    Matrix,
    NotAComplex,
    Ring,
    cohomology_at,
    hstack,
    kernel_basis,
    pivot_columns,
    rank,
    subquotient_dim,
    _base_label,
)


class NotBounded(LinAlgError):
    pass


class NotAField(LinAlgError):
    pass


def _check_zero(prod: Matrix, what: str):
    if not prod.is_zero():
        raise NotAComplex(what)


# --------------------------------------------------------------------------
# Cochain complexes
# --------------------------------------------------------------------------


class CochainComplex:
    """``C^0 -> C^1 -> ... -> C^N`` with ``d[n]: C^n -> C^{n+1}`` for ``n < N``.

    Degrees above N are zero, so the cohomology reported in the top degree is
    that of the truncated complex.
    """

    def __init__(self, ring: Ring, dims: Sequence[int], differentials: Sequence[Matrix], check: bool = True):
        dims = [int(x) for x in dims]
        if len(differentials) != max(len(dims) - 1, 0):
            raise ValueError("need exactly one differential between consecutive degrees")
        for n, d in enumerate(differentials):
            if d.ring != ring:
                raise ValueError(f"d^{n} is over {d.ring}, expected {ring}")
            if d.shape != (dims[n + 1], dims[n]):
                raise ValueError(f"d^{n} has shape {d.shape}, expected {(dims[n + 1], dims[n])}")
        self.ring = ring
        self.dims = tuple(dims)
        self.d = tuple(differentials)
        if check:
            for n in range(len(self.d) - 1):
                if dims[n] and dims[n + 2]:
                    _check_zero(self.d[n + 1] @ self.d[n], f"d^{n + 1} d^{n} != 0")

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def differential(self, n: int) -> Matrix:
        """``d^n`` including the zero maps at the boundary."""
        if 0 <= n < len(self.d):
            return self.d[n]
        rows = self.dims[n + 1] if 0 <= n + 1 < len(self.dims) else 0
        cols = self.dims[n] if 0 <= n < len(self.dims) else 0
        return Matrix.zeros(self.ring, rows, cols)

    def __repr__(self):
        return f"CochainComplex({self.ring}, dims={list(self.dims)})"


def complex_cohomology(C: CochainComplex) -> list[FgAbelianGroup]:
    """Cohomology groups ``H^0 .. H^N`` of ``C``."""
    return [cohomology_at(C.differential(n - 1), C.differential(n)) for n in range(len(C.dims))]


def cohomology_dims(C: CochainComplex) -> list[int]:
    """Dimensions of ``H^n`` over a field, via ranks only."""
    if not C.ring.is_field:
        raise NotAField(str(C.ring))
    ranks = [rank(d) for d in C.d]
    out = []
    for n, dim in enumerate(C.dims):
        r_out = ranks[n] if n < len(ranks) else 0
        r_in = ranks[n - 1] if n >= 1 else 0
        out.append(dim - r_out - r_in)
    return out


# --------------------------------------------------------------------------
# Double complexes
# --------------------------------------------------------------------------


class DoubleComplex:
    """Bounded first-quadrant double complex.

    ``dims[p][q]`` for ``0 <= p <= pmax``, ``0 <= q <= qmax``;
    ``dh[(p, q)]: C^{p,q} -> C^{p+1,q}`` and ``dv[(p, q)]: C^{p,q} -> C^{p,q+1}``.
    Missing blocks are zero.  Squares commute: ``dv dh == dh dv``.
    """

    def __init__(
        self,
        ring: Ring,
        dims: Sequence[Sequence[int]],
        dh: Mapping[tuple[int, int], Matrix],
        dv: Mapping[tuple[int, int], Matrix],
        check: bool = True,
    ):
        self.ring = ring
        self.dims = tuple(tuple(int(x) for x in col) for col in dims)
        self.pmax = len(self.dims) - 1
        self.qmax = len(self.dims[0]) - 1 if self.dims else -1
        if any(len(col) != self.qmax + 1 for col in self.dims):
            raise NotBounded("dims must be a rectangular table")
        self.dh = {}
        self.dv = {}
        for key, m in dh.items():
            p, q = key
            self._put(self.dh, (p, q), (p + 1, q), m, "dh")
        for key, m in dv.items():
            p, q = key
            self._put(self.dv, (p, q), (p, q + 1), m, "dv")
        if check:
            self.validate()

    def _put(self, store, src, dst, m: Matrix, name):
        if m.ring != self.ring:
            raise ValueError(f"{name}{src} is over {m.ring}")
        shape = (self.dim(*dst), self.dim(*src))
        if m.shape != shape:
            raise ValueError(f"{name}{src} has shape {m.shape}, expected {shape}")
        if shape[0] and shape[1] and not m.is_zero():
            store[src] = m

    def dim(self, p: int, q: int) -> int:
        if 0 <= p <= self.pmax and 0 <= q <= self.qmax:
            return self.dims[p][q]
        return 0

    def h(self, p: int, q: int) -> Matrix:
        m = self.dh.get((p, q))
        return m if m is not None else Matrix.zeros(self.ring, self.dim(p + 1, q), self.dim(p, q))

    def v(self, p: int, q: int) -> Matrix:
        m = self.dv.get((p, q))
        return m if m is not None else Matrix.zeros(self.ring, self.dim(p, q + 1), self.dim(p, q))

    def validate(self):
        for p in range(self.pmax + 1):
            for q in range(self.qmax + 1):
                if (p, q) in self.dh and (p + 1, q) in self.dh:
                    _check_zero(self.dh[(p + 1, q)] @ self.dh[(p, q)], f"dh dh != 0 at {(p, q)}")
                if (p, q) in self.dv and (p, q + 1) in self.dv:
                    _check_zero(self.dv[(p, q + 1)] @ self.dv[(p, q)], f"dv dv != 0 at {(p, q)}")
                if self.dim(p + 1, q + 1) and self.dim(p, q):
                    lhs = self.v(p + 1, q) @ self.h(p, q)
                    rhs = self.h(p, q + 1) @ self.v(p, q)
                    _check_zero(lhs - rhs, f"square at {(p, q)} does not commute")

    @property
    def max_total(self) -> int:
        return self.pmax + self.qmax

    def blocks(self, n: int) -> list[tuple[int, int]]:
        """Bidegrees ``(p, n-p)`` of total degree n, in increasing p."""
        return [(p, n - p) for p in range(self.pmax + 1) if 0 <= n - p <= self.qmax]

    def __repr__(self):
        return f"DoubleComplex({self.ring}, pmax={self.pmax}, qmax={self.qmax})"


def _tot_layout(D: DoubleComplex, n: int) -> tuple[list[tuple[int, int]], list[int]]:
    blocks = D.blocks(n)
    offsets = [0]
    for p, q in blocks:
        offsets.append(offsets[-1] + D.dims[p][q])
    return blocks, offsets


def _tot_differential(D: DoubleComplex, n: int) -> Matrix:
    src, so = _tot_layout(D, n)
    dst, do = _tot_layout(D, n + 1)
    out = Matrix.zeros(D.ring, do[-1], so[-1]).a.copy()
    where = {b: k for k, b in enumerate(dst)}
    for k, (p, q) in enumerate(src):
        cols = slice(so[k], so[k + 1])
        if (p, q) in D.dh:
            t = where[(p + 1, q)]
            out[do[t] : do[t + 1], cols] += D.dh[(p, q)].a
        if (p, q) in D.dv:
            t = where[(p, q + 1)]
            block = D.dv[(p, q)].a
            out[do[t] : do[t + 1], cols] += block if p % 2 == 0 else -block
    return Matrix(D.ring, D.ring.normalize(out), _trusted=True)


def total_complex(D: DoubleComplex) -> CochainComplex:
    """``Tot^n = sum_{p+q=n} C^{p,q}`` with differential ``dh + (-1)^p dv``.

    Within each degree the summands are ordered by increasing p.
    """
    N = D.max_total
    dims = [_tot_layout(D, n)[1][-1] for n in range(N + 1)]
    diffs = [_tot_differential(D, n) for n in range(N)]
    return CochainComplex(D.ring, dims, diffs)


# --------------------------------------------------------------------------
# Spectral sequence of the column filtration
# --------------------------------------------------------------------------


@dataclass
class SpectralPages:
    """Page dimensions of the column-filtration spectral sequence.

    ``pages[r][p][q] = dim E_r^{p,q}`` for ``r = 0 .. r_max``; the page
    ``r_max`` already equals ``E_inf``.  ``total[n] = dim H^n(Tot)``.
    """

    r_max: int
    pages: list[list[list[int]]]
    einf: list[list[int]]
    total: list[int]
    meta: dict = field(default_factory=dict)

    def page(self, r: int) -> list[list[int]]:
        return self.pages[min(r, self.r_max)]

    def converges(self) -> bool:
        """``sum_{p+q=n} dim E_inf^{p,q} == dim H^n(Tot)`` for every n."""
        return all(self.diagonal_sum(self.einf, n) == t for n, t in enumerate(self.total))

    @staticmethod
    def diagonal_sum(table: list[list[int]], n: int) -> int:
        return sum(table[p][n - p] for p in range(len(table)) if 0 <= n - p < len(table[p]))

    def to_json(self) -> dict:
        return {
            "r_max": self.r_max,
            "pages": {str(r): pg for r, pg in enumerate(self.pages)},
            "einf": self.einf,
            "total": self.total,
            "converges": self.converges(),
        }


def _filtered_ranks(D: DoubleComplex, dmat: Matrix, n: int) -> dict[tuple[int, int], int]:
    """Pair counts ``mu[(a, b)]`` for the differential ``Tot^n -> Tot^{n+1}``.

    Over a field the filtered total complex splits into single generators and
    pairs ``x -> dx`` with x exactly in filtration a and dx exactly in
    filtration b >= a.  The number of such pairs is read off from ranks of
    the maps ``F^a Tot^n -> Tot^{n+1} / F^{b+1}`` by inclusion-exclusion.
    """
    src, so = _tot_layout(D, n)
    dst, do = _tot_layout(D, n + 1)
    if not src or not dst or so[-1] == 0 or do[-1] == 0:
        return {}
    row_level = []
    for k, (p, _) in enumerate(dst):
        row_level.extend([p] * (do[k + 1] - do[k]))
    row_level = np.array(row_level)
    levels_a = sorted({p for p, _ in src})
    levels_b = sorted({p for p, _ in dst})
    rho: dict[tuple[int, int], int] = {}
    for k, (a, _) in enumerate(src):
        cols = slice(so[k], so[-1])
        sub = dmat.a[:, cols]
        # rank of each row prefix = pivots of the transpose among its first rows
        piv = np.array(pivot_columns(Matrix(D.ring, np.ascontiguousarray(sub.T), _trusted=True)), dtype=int)
        for b in levels_b:
            rho[(a, b)] = int(np.count_nonzero(row_level[piv] <= b)) if piv.size else 0

    def r(a, b):
        if a > levels_a[-1] or b < levels_b[0]:
            return 0
        a2 = min(x for x in levels_a if x >= a)
        b2 = max(x for x in levels_b if x <= b)
        return rho[(a2, b2)]

    mu = {}
    for a in levels_a:
        for b in levels_b:
            m = r(a, b) - r(a + 1, b) - r(a, b - 1) + r(a + 1, b - 1)
            if m:
                mu[(a, b)] = m
    return mu


def spectral_sequence(D: DoubleComplex, method: str = "ranks") -> SpectralPages:
    """All pages ``E_r`` of the column-filtration spectral sequence.

    ``method="ranks"`` reads the pages off the filtered rank invariants of the
    total differential; ``method="subquotient"`` forms every
    ``E_r^p = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1})`` explicitly.  Both
    give identical numbers; the first is much cheaper.
    ``total`` is computed independently from ranks of the total differential.
    """
    if not D.ring.is_field:
        raise NotAField(str(D.ring))
    if method == "subquotient":
        return _spectral_by_subquotients(D)
    if method != "ranks":
        raise ValueError(f"unknown method {method!r}")
    N = D.max_total
    diffs = [_tot_differential(D, n) for n in range(N)]
    pairs = []  # (n, a, b, count): x in Tot^n at level a, dx in Tot^{n+1} at level b
    for n in range(N):
        for (a, b), m in _filtered_ranks(D, diffs[n], n).items():
            pairs.append((n, a, b, m))
    max_gap = max((b - a for _, a, b, _ in pairs), default=0)
    r_max = min(max(2, max_gap + 1), D.pmax + D.qmax + 1) if pairs else 2
    r_max = max(r_max, 2)

    def page(r: int) -> list[list[int]]:
        tab = [list(col) for col in D.dims]
        for n, a, b, m in pairs:
            if b - a < r:
                tab[a][n - a] -= m
                tab[b][n + 1 - b] -= m
        return tab

    pages = [page(r) for r in range(r_max + 1)]
    einf = page(max_gap + 1)
    tot = total_complex_dims(D, diffs)
    return SpectralPages(r_max, pages, einf, tot, {"method": "ranks"})


def total_complex_dims(D: DoubleComplex, diffs: list[Matrix] | None = None) -> list[int]:
    """``dim H^n(Tot)`` from ranks of the total differential."""
    N = D.max_total
    if diffs is None:
        diffs = [_tot_differential(D, n) for n in range(N)]
    dims = [_tot_layout(D, n)[1][-1] for n in range(N + 1)]
    ranks = [rank(d) for d in diffs]
    return [dims[n] - (ranks[n] if n < N else 0) - (ranks[n - 1] if n else 0) for n in range(N + 1)]


def _spectral_by_subquotients(D: DoubleComplex) -> SpectralPages:
    ring = D.ring
    N = D.max_total
    diffs = [_tot_differential(D, n) for n in range(N)]
    lay = [_tot_layout(D, n) for n in range(N + 2)]

    def level_slice(n, p):
        """Coordinates of F^p Tot^n (all blocks with p' >= p)."""
        blocks, off = lay[n]
        start = next((off[k] for k, (pp, _) in enumerate(blocks) if pp >= p), off[-1])
        return start, off[-1]

    def dmat(n):
        if 0 <= n < N:
            return diffs[n]
        rows = lay[n + 1][1][-1] if n + 1 <= N else 0
        return Matrix.zeros(ring, rows, lay[n][1][-1] if n <= N else 0)

    def Z(n, p, r):
        """Basis of {x in F^p Tot^n : dx in F^{p+r} Tot^{n+1}} as columns."""
        dim_n = lay[n][1][-1]
        lo, hi = level_slice(n, max(p, 0))
        d = dmat(n)
        rlo, _ = level_slice(n + 1, max(p + r, 0))
        # rows of dx that must vanish: those of filtration < p + r
        sub = Matrix(ring, np.ascontiguousarray(d.a[:rlo, lo:hi]), _trusted=True)
        K = kernel_basis(sub) if hi > lo else Matrix.zeros(ring, 0, 0)
        full = Matrix.zeros(ring, dim_n, K.cols).a.copy()
        full[lo:hi, :] = K.a
        return Matrix(ring, full, _trusted=True)

    def E(n, p, r):
        dim_n = lay[n][1][-1]
        if dim_n == 0:
            return 0
        top = Z(n, p, r)
        lower = Z(n, p + 1, r - 1)
        if n >= 1:
            src = Z(n - 1, p - r + 1, r - 1)
            bnd = dmat(n - 1) @ src
            denom = hstack(ring, [lower, bnd])
        else:
            denom = lower
        return subquotient_dim(top, denom)

    def table(r):
        tab = [[0] * (D.qmax + 1) for _ in range(D.pmax + 1)]
        for p in range(D.pmax + 1):
            for q in range(D.qmax + 1):
                if D.dims[p][q]:
                    tab[p][q] = E(p + q, p, r)
        return tab

    # d_r shifts the column index by r, so E_{pmax+1} is already E_inf
    pages = [[list(c) for c in D.dims]]
    for r in range(1, max(2, D.pmax + 1) + 1):
        pages.append(table(r))
    einf = pages[-1]
    while len(pages) > 3 and pages[-1] == pages[-2]:
        pages.pop()
    tot = total_complex_dims(D, diffs)
    return SpectralPages(len(pages) - 1, pages, einf, tot, {"method": "subquotient"})


def page_differential_vanishing(pages: SpectralPages, r: int) -> bool:
    """True when ``d_r`` is zero, i.e. ``E_{r+1} == E_r``."""
    return pages.page(r) == pages.page(r + 1)


def double_complex_from_json(data: Mapping, ring: Ring) -> DoubleComplex:
    """``{"dims": [[...] per p], "dh": [{"p", "q", "matrix"}], "dv": [...]}``;
    omitted blocks are zero."""
    try:
        dims = [[int(x) for x in col] for col in data["dims"]]
    except KeyError:
        raise NotBounded("double complex is missing field 'dims'") from None
    P = len(dims) - 1
    Q = len(dims[0]) - 1 if dims else -1

    def dim(p, q):
        return dims[p][q] if 0 <= p <= P and 0 <= q <= Q else 0

    def blocks(key, dp, dq):
        out = {}
        for e in data.get(key, []):
            p, q = int(e["p"]), int(e["q"])
            out[(p, q)] = Matrix(ring, e["matrix"], (dim(p + dp, q + dq), dim(p, q)))
        return out

    return DoubleComplex(ring, dims, blocks("dh", 1, 0), blocks("dv", 0, 1))
