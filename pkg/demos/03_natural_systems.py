"""Finite categories, natural systems and Baues-Wirsching cohomology.

With an initial object and a functor-induced system the cohomology is the
value at the initial object in degree 0 and vanishes above; for a group seen
as a one-object category it is group cohomology."""

# %%
from bwcoh import groupcoh as gc
from bwcoh import natsys as ns
from bwcoh.exactlinalg import ZZ, Matrix
from bwcoh.fincat import arrow_category, factorization_category, initial_object, monoid_category

I = arrow_category()
F = factorization_category(I)
print(f"arrow category: {I.n_morphisms} morphisms; factorization category has {F.n_objects} objects, {F.n_morphisms} morphisms")

# %% F(0) = Z, F(1) = Z, F(a) = multiplication by 2
e = Matrix.identity(ZZ, 1)
D = ns.natural_system_from_functor(ns.LinearFunctor(I, ZZ, [1, 1], [e, e, Matrix(ZZ, [[2]])]))
print("initial object:", I.objects[initial_object(I)])
print("H_BW =", [str(h) for h in ns.bw_cohomology(D, 3)])

# %% C_2 as a one-object category with constant Z coefficients
G = gc.cyclic_group(2)
C2 = monoid_category(G.elements, G.table.tolist(), G.unit)
print("H_BW(C2; Z) =", [str(h) for h in ns.bw_cohomology(ns.constant_system(C2, ZZ, 1), 4)])
print("H(C2; Z)    =", [str(h) for h in gc.group_cohomology(G, gc.trivial_module(G, ZZ), 4)])

# %% the inner face sign matters: flip it and d∘d stops vanishing
D = ns.constant_system(C2, ZZ, 1)
print("d2 d1 = 0:", (ns.bw_differential(D, 2) @ ns.bw_differential(D, 1)).is_zero())
saved = ns._merge_sign
ns._merge_sign = lambda j: 1
print("with the sign flipped, d2 d1 = 0:", (ns.bw_differential(D, 2) @ ns.bw_differential(D, 1)).is_zero())
ns._merge_sign = saved
