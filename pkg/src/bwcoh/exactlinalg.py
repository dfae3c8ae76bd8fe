"""Exact matrix arithmetic over ZZ, QQ and prime fields GF(p).

Matrices wrap a numpy array together with the coefficient ring the entries
live in.  Prime-field entries are stored as ``int64`` residues in ``[0, p)``;
integer and rational entries use ``object`` arrays of Python ``int`` and
``fractions.Fraction`` so nothing ever overflows or rounds.

Everything cohomological in the package bottoms out in four routines:
:func:`smith_normal_form`, :func:`kernel_basis`, :func:`subquotient_dim` and
:func:`cohomology_at`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import math

import numpy as np


class LinAlgError(Exception):
    """Base class for errors raised by this module."""


class NotAComplex(LinAlgError):
    """Raised when a composite of two differentials is not zero."""


class SubspaceViolation(LinAlgError):
    """Raised when a vector is required to lie in a span and does not."""


class RingMismatch(LinAlgError):
    pass


# --------------------------------------------------------------------------
# Coefficient rings
# --------------------------------------------------------------------------


class Ring:
    name: str = "?"
    is_field: bool = False
    dtype: object = object
    characteristic: int = 0

    def normalize(self, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def coerce(self, x) -> object:
        raise NotImplementedError

    def inverse(self, x):
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.name

    @property
    def tag(self) -> str:
        """Short tag used on the command line and in JSON files."""
        raise NotImplementedError


class IntegerRing(Ring):
    name = "ZZ"
    dtype = object

    def normalize(self, a):
        a = np.asarray(a, dtype=object)
        out = np.empty(a.shape, dtype=object)
        flat_in, flat_out = a.reshape(-1), out.reshape(-1)
        for k, x in enumerate(flat_in):
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"{x} is not an integer")
                x = x.numerator
            flat_out[k] = int(x)
        return out

    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def inverse(self, x):
        if x in (1, -1):
            return x
        raise ZeroDivisionError(f"{x} is not a unit in ZZ")

    @property
    def tag(self):
        return "z"


class RationalField(Ring):
    name = "QQ"
    is_field = True
    dtype = object

    def normalize(self, a):
        a = np.asarray(a, dtype=object)
        out = np.empty(a.shape, dtype=object)
        flat_in, flat_out = a.reshape(-1), out.reshape(-1)
        for k, x in enumerate(flat_in):
            flat_out[k] = x if isinstance(x, Fraction) else Fraction(x)
        return out

    def coerce(self, x):
        return x if isinstance(x, Fraction) else Fraction(x)

    def inverse(self, x):
        return 1 / Fraction(x)

    @property
    def tag(self):
        return "q"


class PrimeField(Ring):
    is_field = True
    dtype = np.int64

    def __init__(self, p: int):
        if p < 2 or any(p % k == 0 for k in range(2, int(p**0.5) + 1)):
            raise ValueError(f"GF(p) needs a prime p, got {p}")
        # keeps every single product below 2**40, so int64 sums stay exact
        if p >= 1 << 20:
            raise ValueError("primes >= 2**20 are not supported")
        self.p = p
        self.characteristic = p
        self.name = f"GF({p})"

    def normalize(self, a):
        a = np.asarray(a)
        if a.dtype == object:
            flat = [int(x) % self.p if not isinstance(x, Fraction) else self.coerce(x) for x in a.reshape(-1)]
            return np.array(flat, dtype=np.int64).reshape(a.shape)
        return np.mod(a.astype(np.int64), self.p)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def inverse(self, x):
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(x, self.p - 2, self.p)

    @property
    def tag(self):
        return f"f{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


ZZ = IntegerRing()
QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def ring_from_tag(tag: str) -> Ring:
    """Parse ``z``, ``q`` or ``f<p>`` (also ``ZZ``, ``QQ``, ``GF(p)``)."""
    t = tag.strip().lower()
    if t in ("z", "zz"):
        return ZZ
    if t in ("q", "qq"):
        return QQ
    if t.startswith("gf(") and t.endswith(")"):
        return GF(int(t[3:-1]))
    if t.startswith("f") and t[1:].isdigit():
        return GF(int(t[1:]))
    raise ValueError(f"unknown coefficient ring {tag!r}")


# --------------------------------------------------------------------------
# Matrices
# --------------------------------------------------------------------------


class Matrix:
    """Dense matrix over a single coefficient ring.

    The underlying array is read-only; arithmetic returns new matrices.
    """

    __slots__ = ("ring", "a")

    def __init__(self, ring: Ring, entries, shape: tuple[int, int] | None = None, *, _trusted=False):
        if _trusted:
            a = entries
        else:
            a = np.asarray(entries, dtype=object if ring.dtype is object else None)
            if a.size == 0 and shape is not None:
                a = np.zeros(shape, dtype=object if ring.dtype is object else np.int64)
            if a.ndim == 1 and shape is None and a.size == 0:
                a = a.reshape(0, 0)
            if shape is not None:
                a = a.reshape(shape)
            if a.ndim != 2:
                raise ValueError("matrix entries must form a 2-d array")
            a = ring.normalize(a)
        a.setflags(write=False)
        self.ring = ring
        self.a = a

    # construction helpers -------------------------------------------------
    @classmethod
    def zeros(cls, ring: Ring, rows: int, cols: int) -> "Matrix":
        if ring.dtype is object:
            a = np.empty((rows, cols), dtype=object)
            a.fill(0 if ring is ZZ else Fraction(0))
        else:
            a = np.zeros((rows, cols), dtype=np.int64)
        return cls(ring, a, _trusted=True)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        if ring.dtype is object:
            one = 1 if ring is ZZ else Fraction(1)
            a = np.empty((n, n), dtype=object)
            a.fill(0 if ring is ZZ else Fraction(0))
            for k in range(n):
                a[k, k] = one
        else:
            a = np.eye(n, dtype=np.int64)
        return cls(ring, a, _trusted=True)

    @classmethod
    def from_array(cls, ring: Ring, a: np.ndarray) -> "Matrix":
        """Wrap an array already normalized for ``ring`` without copying."""
        return cls(ring, a, _trusted=True)

    # basic protocol ---------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __repr__(self):
        return f"Matrix({self.ring.name}, {self.a.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ring == other.ring and self.shape == other.shape and bool(np.all(self.a == other.a))

    __hash__ = None

    def tolist(self) -> list[list]:
        return self.a.tolist()

    def is_zero(self) -> bool:
        return self.a.size == 0 or not np.any(self.a != 0)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.ring, np.ascontiguousarray(self.a.T), _trusted=True)

    def _check(self, other: "Matrix"):
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return _wrap(self.ring, self.a + other.a)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return _wrap(self.ring, self.a - other.a)

    def __neg__(self) -> "Matrix":
        return _wrap(self.ring, -self.a)

    def scale(self, c) -> "Matrix":
        return _wrap(self.ring, self.a * self.ring.coerce(c))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix(self.ring, _matmul(self.ring, self.a, other.a), _trusted=True)

    def __getitem__(self, key) -> "Matrix":
        sub = self.a[key]
        if sub.ndim != 2:
            raise IndexError("matrix slicing must keep two axes")
        return Matrix(self.ring, np.array(sub), _trusted=True)

    def column(self, j: int) -> np.ndarray:
        return self.a[:, j]


def _wrap(ring: Ring, a: np.ndarray) -> Matrix:
    if isinstance(ring, PrimeField):
        a = np.mod(a, ring.p)
    return Matrix(ring, a, _trusted=True)


def _matmul(ring: Ring, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if isinstance(ring, PrimeField):
        p = ring.p
        k = a.shape[1]
        if k == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        # float64 BLAS is exact while every partial sum stays below 2**53
        if k * (p - 1) ** 2 < 2**52:
            out = a.astype(np.float64) @ b.astype(np.float64)
            return np.mod(np.rint(out).astype(np.int64), p)
        return np.mod(a @ b, p)
    if a.shape[1] == 0 or a.size == 0 or b.size == 0:
        out = np.empty((a.shape[0], b.shape[1]), dtype=object)
        out.fill(0 if ring is ZZ else Fraction(0))
        return out
    if ring is ZZ:
        return _int_matmul(a, b)
    # clear denominators, multiply integers, divide once per entry
    da = _common_denominator(a)
    db = _common_denominator(b)
    ia = _scaled_ints(a, da)
    ib = _scaled_ints(b, db)
    prod = _int_matmul(ia, ib)
    den = da * db
    out = np.empty(prod.shape, dtype=object)
    flat_p, flat_o = prod.reshape(-1), out.reshape(-1)
    for k, x in enumerate(flat_p):
        flat_o[k] = Fraction(int(x), den)
    return out


def _common_denominator(a: np.ndarray) -> int:
    d = 1
    for x in set(v.denominator for v in a.reshape(-1)):
        d = d * x // math.gcd(d, x)
    return d


def _scaled_ints(a: np.ndarray, d: int) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    flat_a, flat_o = a.reshape(-1), out.reshape(-1)
    for k, x in enumerate(flat_a):
        flat_o[k] = x.numerator * (d // x.denominator)
    return out


def _int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of integer object arrays; int64 BLAS-free path when no
    partial sum can overflow."""
    ma = max((abs(int(x)) for x in a.reshape(-1)), default=0)
    mb = max((abs(int(x)) for x in b.reshape(-1)), default=0)
    if ma * mb * a.shape[1] < 2**62:
        prod = a.astype(np.int64) @ b.astype(np.int64)
        return prod.astype(object)
    return a.dot(b)


def hstack(ring: Ring, mats: Sequence[Matrix], rows: int | None = None) -> Matrix:
    mats = [m for m in mats]
    if not mats:
        return Matrix.zeros(ring, rows or 0, 0)
    return Matrix(ring, np.hstack([m.a for m in mats]), _trusted=True)


def vstack(ring: Ring, mats: Sequence[Matrix], cols: int | None = None) -> Matrix:
    mats = [m for m in mats]
    if not mats:
        return Matrix.zeros(ring, 0, cols or 0)
    return Matrix(ring, np.vstack([m.a for m in mats]), _trusted=True)


def block_diag(ring: Ring, mats: Sequence[Matrix]) -> Matrix:
    r = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    out = _zeros_array(ring, r, c)
    i = j = 0
    for m in mats:
        out[i : i + m.rows, j : j + m.cols] = m.a
        i += m.rows
        j += m.cols
    return Matrix(ring, out, _trusted=True)


def kron(a: Matrix, b: Matrix) -> Matrix:
    a._check(b)
    if a.ring.dtype is object:
        out = np.kron(a.a, b.a)
    else:
        out = np.mod(np.kron(a.a, b.a), a.ring.p)
    return Matrix(a.ring, out, _trusted=True)


def _zeros_array(ring: Ring, rows: int, cols: int) -> np.ndarray:
    return Matrix.zeros(ring, rows, cols).a.copy()


# --------------------------------------------------------------------------
# Elimination over a field
# --------------------------------------------------------------------------


def _echelon(ring: Ring, a: np.ndarray, reduced: bool) -> tuple[np.ndarray, list[int]]:
    """Row-reduce a copy of ``a``; return the echelon array and pivot columns.

    With ``reduced`` the result is the reduced row echelon form, otherwise
    entries above the pivots are left alone (enough for ranks and pivots).
    """
    if not ring.is_field:
        raise LinAlgError(f"elimination needs a field, got {ring}")
    if isinstance(ring, PrimeField) and ring.p == 2 and a.size:
        return _echelon_gf2(a, reduced)
    a = np.array(a, dtype=a.dtype, copy=True)
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    prime = isinstance(ring, PrimeField)
    p = ring.p if prime else None
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        lead = a[r, c]
        if prime:
            if lead != 1:
                a[r, c:] = (a[r, c:] * pow(int(lead), p - 2, p)) % p
        elif lead != 1:
            a[r, c:] = a[r, c:] / lead
        rows = np.flatnonzero(a[:, c]) if reduced else r + 1 + np.flatnonzero(a[r + 1 :, c])
        rows = rows[rows != r]
        if rows.size:
            support = c + np.flatnonzero(a[r, c:])
            factors = a[rows, c]
            block = np.ix_(rows, support)
            if prime:
                a[block] = (a[block] - np.outer(factors, a[r, support])) % p
            else:
                a[block] = a[block] - np.outer(factors, a[r, support])
        pivots.append(c)
        r += 1
    return a, pivots


def _echelon_gf2(a: np.ndarray, reduced: bool) -> tuple[np.ndarray, list[int]]:
    """Bit-packed elimination over GF(2); rows are XORed a byte at a time."""
    m, n = a.shape
    bits = np.packbits(a.astype(np.uint8), axis=1)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        byte, shift = c >> 3, 7 - (c & 7)
        nz = np.flatnonzero((bits[r:, byte] >> shift) & 1)
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            bits[[r, k]] = bits[[k, r]]
        if reduced:
            rows = np.flatnonzero((bits[:, byte] >> shift) & 1)
            rows = rows[rows != r]
        else:
            rows = r + 1 + np.flatnonzero((bits[r + 1 :, byte] >> shift) & 1)
        if rows.size:
            bits[rows, byte:] ^= bits[r, byte:]
        pivots.append(c)
        r += 1
    return np.unpackbits(bits, axis=1, count=n).astype(np.int64), pivots


def rref(A: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns over a field."""
    R, piv = _echelon(A.ring, A.a, reduced=True)
    return Matrix(A.ring, R, _trusted=True), piv


def pivot_columns(A: Matrix) -> list[int]:
    """Greedy (lexicographically first) maximal independent set of columns."""
    return _echelon(A.ring, A.a, reduced=False)[1]


def rank(A: Matrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    if A.ring is ZZ:
        return len(smith_normal_form(A).d)
    a = A.a
    # eliminating along the shorter side touches fewer entries
    if a.shape[0] > a.shape[1]:
        a = np.ascontiguousarray(a.T)
    return len(_echelon(A.ring, a, reduced=False)[1])


def kernel_basis(A: Matrix) -> Matrix:
    """Columns forming a basis of ``{x : A x = 0}`` over a field."""
    ring = A.ring
    n = A.cols
    R, piv = _echelon(ring, A.a, reduced=True)
    free = [j for j in range(n) if j not in set(piv)]
    K = _zeros_array(ring, n, len(free))
    one = 1 if isinstance(ring, PrimeField) else Fraction(1)
    for t, f in enumerate(free):
        K[f, t] = one
        for i, pc in enumerate(piv):
            K[pc, t] = -R[i, f]
    if isinstance(ring, PrimeField):
        K %= ring.p
    return Matrix(ring, K, _trusted=True)


def image_basis(A: Matrix) -> Matrix:
    """Columns of ``A`` at its pivot positions; a basis of the column span."""
    piv = pivot_columns(A)
    return Matrix(A.ring, np.ascontiguousarray(A.a[:, piv]), _trusted=True)


def row_space_rref(A: Matrix) -> tuple[np.ndarray, list[int]]:
    """Nonzero rows of rref(A) and their pivots."""
    R, piv = _echelon(A.ring, A.a, reduced=True)
    return R[: len(piv)], piv


def solve(A: Matrix, B: Matrix) -> Matrix:
    """Some X with A X = B over a field; raises SubspaceViolation if none."""
    ring = A.ring
    aug = np.hstack([A.a, B.a])
    R, piv = _echelon(ring, aug, reduced=True)
    n = A.cols
    if any(c >= n for c in piv):
        raise SubspaceViolation("right-hand side is not in the column span")
    X = _zeros_array(ring, n, B.cols)
    for i, c in enumerate(piv):
        X[c] = R[i, n:]
    return Matrix(ring, X, _trusted=True)


def subquotient_dim(Z: Matrix, B: Matrix) -> int:
    """``dim span(Z) - dim span(B)``, after checking span(B) lies in span(Z)."""
    if Z.ring != B.ring:
        raise RingMismatch(f"{Z.ring} vs {B.ring}")
    rz = rank(Z)
    if B.cols == 0:
        return rz
    if Z.rows != B.rows:
        raise ValueError("Z and B must live in the same ambient space")
    joint = rank(hstack(Z.ring, [Z, B]))
    if joint != rz:
        raise SubspaceViolation("a column of B lies outside span(Z)")
    return rz - rank(B)


class QuotientSpace:
    """Chosen basis of span(Z)/span(B) with a coordinate map.

    ``reps`` holds representatives (as columns) of a basis of the quotient;
    :meth:`coords` expresses vectors of span(Z) modulo span(B) in that basis.
    Both Z and B are given by spanning columns and B must lie in span(Z).
    """

    def __init__(self, Z: Matrix, B: Matrix):
        ring = Z.ring
        self.ring = ring
        self.ambient = Z.rows
        self._b_rows, self._b_piv = row_space_rref(B.T) if B.cols else (_zeros_array(ring, 0, Z.rows), [])
        zr = self._reduce_b(Z.a.T.copy())
        h = Matrix(ring, zr, _trusted=True)
        self._h_rows, self._h_piv = row_space_rref(h) if zr.shape[0] else (_zeros_array(ring, 0, Z.rows), [])
        # every column of B must reduce to zero against itself, so it suffices
        # to check that the B rows lie in span(Z)
        if B.cols and rank(hstack(ring, [Z, B])) != rank(Z):
            raise SubspaceViolation("B is not contained in span(Z)")
        self.dim = len(self._h_piv)
        self.reps = Matrix(ring, np.ascontiguousarray(self._h_rows.T), _trusted=True)

    def _reduce_b(self, rows: np.ndarray) -> np.ndarray:
        """Reduce row vectors modulo the rref basis of B."""
        if not self._b_piv:
            return rows
        coeff = rows[:, self._b_piv]
        out = rows - _matmul(self.ring, coeff, self._b_rows)
        if isinstance(self.ring, PrimeField):
            out %= self.ring.p
        return out

    def coords(self, V: Matrix, check: bool = True) -> Matrix:
        """Coordinates (one column per column of V) in the quotient basis."""
        rows = self._reduce_b(V.a.T.copy())
        c = rows[:, self._h_piv] if self._h_piv else _zeros_array(self.ring, rows.shape[0], 0)
        if check:
            rest = rows - _matmul(self.ring, c, self._h_rows) if self._h_piv else rows
            if isinstance(self.ring, PrimeField):
                rest %= self.ring.p
            if np.any(rest != 0):
                raise SubspaceViolation("vector does not lie in span(Z)")
        return Matrix(self.ring, np.ascontiguousarray(c.T), _trusted=True)


# --------------------------------------------------------------------------
# Smith normal form over ZZ
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == diag(d)`` padded with zeros; U, V unimodular."""

    d: tuple[int, ...]
    U: Matrix
    V: Matrix
    Vinv: Matrix = field(repr=False)


def _ident(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _snf_lists(A: list[list[int]], m: int, n: int):
    """Smith form on nested lists, tracking U, V and V^{-1}."""
    a = [row[:] for row in A]
    U, V, Vi = _ident(m), _ident(n), _ident(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(src, dst, c):  # row_dst += c * row_src
        if c:
            ra, rs = a[dst], a[src]
            for k in range(n):
                if rs[k]:
                    ra[k] += c * rs[k]
            ua, us = U[dst], U[src]
            for k in range(m):
                if us[k]:
                    ua[k] += c * us[k]

    def add_col(src, dst, c):  # col_dst += c * col_src ; V^{-1}: row_src -= c * row_dst
        if c:
            for row in a:
                if row[src]:
                    row[dst] += c * row[src]
            for row in V:
                if row[src]:
                    row[dst] += c * row[src]
            vs, vd = Vi[src], Vi[dst]
            for k in range(n):
                if vd[k]:
                    vs[k] -= c * vd[k]

    t = 0
    d: list[int] = []
    while t < min(m, n):
        # smallest nonzero entry in the trailing block becomes the pivot
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = a[t][t]
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // piv
                    add_row(t, i, -q)
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // piv
                    add_col(t, j, -q)
                    if a[t][j]:
                        done = False
            if not done:
                # a remainder smaller than the pivot exists; move it into place
                best = None
                for i in range(t, m):
                    if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                        best = (abs(a[i][t]), i, t)
                for j in range(t, n):
                    if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                        best = (abs(a[t][j]), t, j)
                _, i, j = best
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            # row and column are clear; enforce divisibility of the rest
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        d.append(a[t][t])
        t += 1
    return d, U, V, Vi


def smith_normal_form(A: Matrix) -> SmithForm:
    """Smith normal form of an integer matrix with unimodular transforms."""
    if A.ring is not ZZ:
        raise RingMismatch("Smith normal form is computed over ZZ")
    m, n = A.shape
    d, U, V, Vi = _snf_lists([[int(x) for x in row] for row in A.a.tolist()], m, n)
    return SmithForm(
        tuple(d),
        Matrix(ZZ, U if m else np.zeros((0, 0), dtype=object), (m, m)),
        Matrix(ZZ, V if n else np.zeros((0, 0), dtype=object), (n, n)),
        Matrix(ZZ, Vi if n else np.zeros((0, 0), dtype=object), (n, n)),
    )


# --------------------------------------------------------------------------
# Finitely generated abelian groups and cohomology
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FgAbelianGroup:
    """``base^rank`` plus cyclic torsion summands ``Z/t``.

    ``base`` only affects printing: over a field the group is a vector space
    of dimension ``rank`` and torsion is always empty.
    """

    rank: int = 0
    torsion: tuple[int, ...] = ()
    base: str = "Z"

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        t = tuple(int(x) for x in self.torsion)
        if any(x < 2 for x in t):
            raise ValueError("torsion coefficients must be >= 2")
        if any(t[k + 1] % t[k] for k in range(len(t) - 1)):
            raise ValueError("torsion coefficients must form a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        """Number of elements, or None when infinite."""
        if self.rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append(self.base)
        elif self.rank > 1:
            parts.append(f"{self.base}^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion), "base": self.base}


def _base_label(ring: Ring) -> str:
    if ring is ZZ:
        return "Z"
    if ring is QQ:
        return "Q"
    return f"F{ring.p}"


def cohomology_at(d_in: Matrix, d_out: Matrix) -> FgAbelianGroup:
    """``ker(d_out) / im(d_in)`` for ``C' --d_in--> C --d_out--> C''``."""
    if d_in.ring != d_out.ring:
        raise RingMismatch(f"{d_in.ring} vs {d_out.ring}")
    ring = d_in.ring
    if d_in.rows != d_out.cols:
        raise ValueError(f"d_in lands in dim {d_in.rows} but d_out starts at dim {d_out.cols}")
    if d_in.cols and d_out.rows and not (d_out @ d_in).is_zero():
        raise NotAComplex("d_out @ d_in is not zero")
    n = d_out.cols
    if ring.is_field:
        return FgAbelianGroup(n - rank(d_out) - rank(d_in), (), _base_label(ring))
    snf = smith_normal_form(d_out)
    r = len(snf.d)
    if d_in.cols == 0 or n - r == 0:
        return FgAbelianGroup(n - r)
    # coordinates of im(d_in) inside ker(d_out) = span of the last n-r columns of V
    X = (snf.Vinv @ d_in)[r:, :]
    dx = smith_normal_form(X).d
    torsion = tuple(x for x in dx if x > 1)
    return FgAbelianGroup(n - r - len(dx), torsion)


def group_from_invariants(invariants: Iterable[int], base: str = "Z") -> FgAbelianGroup:
    """Build a group from arbitrary cyclic orders (0 meaning infinite)."""
    inv = list(invariants)
    free = sum(1 for x in inv if x == 0)
    tors = [x for x in inv if x > 1]
    if not tors:
        return FgAbelianGroup(free, (), base)
    diag = Matrix(ZZ, [[tors[i] if i == j else 0 for j in range(len(tors))] for i in range(len(tors))])
    d = smith_normal_form(diag).d
    return FgAbelianGroup(free, tuple(x for x in d if x > 1), base)
