"""Group cohomology from the bar complex, checked against the periodic
resolution of cyclic groups and against brute-force derivation counts."""

# %%
from bwcoh import groupcoh as gc
from bwcoh.exactlinalg import GF, ZZ
from bwcoh.oracles import brute_force_derivations, periodic_cyclic_cohomology

for p in (2, 3):
    R = GF(p)
    for n in (2, 3, 4):
        G = gc.cyclic_group(n)
        for kind, M in (("trivial", gc.trivial_module(G, R)), ("sign", gc.sign_module(G, R))):
            bar = [h.rank for h in gc.group_cohomology(G, M, 4)]
            per = periodic_cyclic_cohomology(G, 1, M, 4)
            print(f"C{n} {kind:7s} over F{p}: bar {bar}  periodic {per}")

# %% torsion over Z
G = gc.cyclic_group(4)
print("H(C4; Z_sign) =", [str(h) for h in gc.group_cohomology(G, gc.sign_module(G, ZZ), 4)])

# %% derivations are 1-cocycles
C2, S3 = gc.cyclic_group(2), gc.symmetric_group(3)
for G, M in ((C2, gc.trivial_module(C2, GF(3))), (S3, gc.trivial_module(S3, GF(2)))):
    d = gc.derivations(G, M).cols
    print(f"|G| = {G.order}: dim Der = {d}, enumerated {brute_force_derivations(G, M)} = {M.ring.p}^{d}")
