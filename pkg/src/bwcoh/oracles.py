"""Independent reference computations used to cross-check the main routes.

Nothing here reuses the bar, Baues-Wirsching or bicomplex assembly code.
"""

from __future__ import annotations

import itertools

import numpy as np

from .chaincomplex import DoubleComplex
from .diagramcoh import DiagramModule
from .exactlinalg import Matrix, PrimeField, QuotientSpace, Ring, _zeros_array, kernel_basis, rank
from .groupcoh import FiniteGroup, GModule


def periodic_cyclic_cohomology(G: FiniteGroup, generator: int, M: GModule, q_max: int) -> list[int]:
    """Dimensions of ``H^q(C_n, M)`` from the 2-periodic resolution.

    With T the action of the generator and N = 1 + T + ... + T^{n-1}:
    ``H^0 = ker(T-1)``, ``H^odd = ker N / im(T-1)``, ``H^even>0 = ker(T-1) / im N``.
    """
    ring = M.ring
    n = G.order
    if G.element_order(generator) != n:
        raise ValueError("element does not generate the group")
    T = M.action[generator]
    one = Matrix.identity(ring, M.dim)
    Tm1 = T - one
    N = Matrix.zeros(ring, M.dim, M.dim)
    P = one
    for _ in range(n):
        N = N + P
        P = T @ P
    k_t = M.dim - rank(Tm1)
    k_n = M.dim - rank(N)
    out = []
    for q in range(q_max + 1):
        if q == 0:
            out.append(k_t)
        elif q % 2:
            out.append(k_n - rank(Tm1))
        else:
            out.append(k_t - rank(N))
    return out


def brute_force_derivations(G: FiniteGroup, M: GModule) -> int:
    """Count maps ``d: G -> M`` with ``d(gh) = g·d(h) + d(g)`` by enumeration
    (prime fields only; tiny sizes)."""
    ring = M.ring
    if not isinstance(ring, PrimeField):
        raise ValueError("enumeration needs a finite field")
    p, m, n = ring.p, M.dim, G.order
    vecs = [np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=m)]
    acts = [M.action[g].a for g in range(n)]
    count = 0
    for choice in itertools.product(range(len(vecs)), repeat=n):
        d = [vecs[c] for c in choice]
        if all(
            np.array_equal(d[G.mul(g, h)], (acts[g] @ d[h] + d[g]) % p) for g in range(n) for h in range(n)
        ):
            count += 1
    return count


def fixed_point_dim(M: GModule) -> int:
    """``dim M^G`` by intersecting the fixed spaces of all elements."""
    ring = M.ring
    rows = [(M.action[g] - Matrix.identity(ring, M.dim)).a for g in range(M.group.order)]
    if not rows or M.dim == 0:
        return M.dim
    return M.dim - rank(Matrix(ring, np.vstack(rows), _trusted=True))


def compatible_derivations_dim(M: DiagramModule) -> int:
    """Dimension of the space of families ``ψ(i) ∈ Der(A(i), M(i))`` with
    ``M(α) ψ(i)(g) = ψ(j)(A(α) g)`` for every ``α: i -> j`` and ``g ∈ A(i)``.

    Unknowns are the values ``ψ(i)(g)``; equations are the cocycle identities
    at every object and the compatibility identities at every morphism."""
    A = M.diagram
    I = A.index
    ring = M.ring
    offs = [0]
    for x in range(I.n_objects):
        offs.append(offs[-1] + A.groups[x].order * M.modules[x].dim)
    nvar = offs[-1]
    eqs = []

    def var(x, g):
        m = M.modules[x].dim
        return offs[x] + g * m, m

    for x in range(I.n_objects):
        G, Mx = A.groups[x], M.modules[x]
        m = Mx.dim
        for g in range(G.order):
            for h in range(G.order):
                row = _zeros_array(ring, m, nvar)
                s, _ = var(x, G.mul(g, h))
                row[:, s : s + m] -= _eye(ring, m)
                s, _ = var(x, h)
                row[:, s : s + m] += Mx.action[g].a
                s, _ = var(x, g)
                row[:, s : s + m] += _eye(ring, m)
                eqs.append(row)
    for a in range(I.n_morphisms):
        x, y = I.src[a], I.dst[a]
        phi = A.maps[a]
        my = M.modules[y].dim
        for g in range(A.groups[x].order):
            row = _zeros_array(ring, my, nvar)
            s, mx = var(x, g)
            row[:, s : s + mx] += M.maps[a].a
            s, _ = var(y, phi(g))
            row[:, s : s + my] -= _eye(ring, my)
            eqs.append(row)
    if nvar == 0:
        return 0
    E = np.vstack(eqs) if eqs else _zeros_array(ring, 0, nvar)
    return nvar - rank(Matrix(ring, ring.normalize(E), _trusted=True))


def compatible_invariants_dim(M: DiagramModule) -> int:
    """Dimension of families ``m(i) ∈ M(i)^{A(i)}`` with ``M(α) m(i) = m(j)``."""
    A = M.diagram
    I = A.index
    ring = M.ring
    offs = [0]
    for x in range(I.n_objects):
        offs.append(offs[-1] + M.modules[x].dim)
    nvar = offs[-1]
    eqs = []
    for x in range(I.n_objects):
        m = M.modules[x].dim
        for g in range(A.groups[x].order):
            row = _zeros_array(ring, m, nvar)
            row[:, offs[x] : offs[x + 1]] += (M.modules[x].action[g] - Matrix.identity(ring, m)).a
            eqs.append(row)
    for a in range(I.n_morphisms):
        x, y = I.src[a], I.dst[a]
        row = _zeros_array(ring, M.modules[y].dim, nvar)
        row[:, offs[x] : offs[x + 1]] += M.maps[a].a
        row[:, offs[y] : offs[y + 1]] -= _eye(ring, M.modules[y].dim)
        eqs.append(row)
    if nvar == 0:
        return 0
    E = np.vstack(eqs)
    return nvar - rank(Matrix(ring, ring.normalize(E), _trusted=True))


def _eye(ring: Ring, m: int) -> np.ndarray:
    a = _zeros_array(ring, m, m)
    for k in range(m):
        a[k, k] = 1
    return a


def e2_by_iterated_cohomology(D: DoubleComplex) -> list[list[int]]:
    """``E_2`` as horizontal cohomology of vertical cohomology.

    Vertical cohomology is realized with explicit quotient bases; the
    horizontal differential is transported to those bases and its ranks give
    the E_2 dimensions."""
    ring = D.ring
    P, Q = D.pmax, D.qmax
    quot = {}
    for p in range(P + 1):
        for q in range(Q + 1):
            n = D.dim(p, q)
            Z = kernel_basis(D.v(p, q)) if n else Matrix.zeros(ring, 0, 0)
            B = D.v(p, q - 1) if q > 0 and n else Matrix.zeros(ring, n, 0)
            quot[(p, q)] = QuotientSpace(Z, B) if n else None
    def e1(p, q):
        Qs = quot.get((p, q))
        return Qs.dim if Qs is not None else 0

    def induced_rank(p, q):
        """Rank of the map ``E_1^{p,q} -> E_1^{p+1,q}``."""
        Qs, Qd = quot.get((p, q)), quot.get((p + 1, q))
        if Qs is None or Qd is None or Qs.dim == 0 or Qd.dim == 0:
            return 0
        return rank(Qd.coords(D.h(p, q) @ Qs.reps))

    table = [[0] * (Q + 1) for _ in range(P + 1)]
    for p in range(P + 1):
        for q in range(Q + 1):
            table[p][q] = e1(p, q) - induced_rank(p, q) - (induced_rank(p - 1, q) if p > 0 else 0)
    return table

