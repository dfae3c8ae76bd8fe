"""Cohomology of diagrams of groups and the local-to-global spectral sequence.

E_2 is read off the bicomplex and compared with Baues-Wirsching cohomology
of the natural systems of local cohomologies; E_inf is compared with the
cohomology of the total complex."""

# %%
import numpy as np

from bwcoh import diagramcoh as dg
from bwcoh import groupcoh as gc
from bwcoh.exactlinalg import GF
from bwcoh.fincat import arrow_category
from bwcoh.oracles import compatible_derivations_dim
from bwcoh.randgen import random_diagram

F2 = GF(2)
G = gc.cyclic_group(2)
A = dg.GroupDiagram.constant(arrow_category(), G)
M = dg.DiagramModule.constant(A, gc.trivial_module(G, F2))
for convention in dg.CONVENTIONS:
    rep = dg.local_to_global(A, M, 3, convention)
    print(f"{convention}: E_2 {rep.e2}  local systems {rep.e2_bw}  H(Tot) {rep.total}")

# %% H^0 in the comonad convention is the space of compatible derivations
rng = np.random.default_rng(0)
for k in range(5):
    A, M = random_diagram(rng, F2, 3)
    rep = dg.local_to_global(A, M, 3, "cegarra")
    print(
        f"diagram {k}: {A.index.n_objects} objects, groups {[g.order for g in A.groups]}, "
        f"H^0 {rep.total[0]} = Der {compatible_derivations_dim(M)}, E_2 ok {rep.e2_matches}, converges {rep.converges}"
    )
