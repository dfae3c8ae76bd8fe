"""Double complexes and the spectral sequence of the column filtration.

A zigzag carries a nonzero d_2: E_2 has two classes that cancel on E_3."""

# %%
import numpy as np

from bwcoh.chaincomplex import DoubleComplex, cohomology_dims, spectral_sequence, total_complex
from bwcoh.exactlinalg import GF, Matrix
from bwcoh.oracles import e2_by_iterated_cohomology
from bwcoh.randgen import random_double_complex

F2 = GF(2)
one = Matrix(F2, [[1]])
D = DoubleComplex(F2, [[0, 1], [1, 1], [1, 0]], {(0, 1): one, (1, 0): one}, {(1, 0): one})
S = spectral_sequence(D)
for r in range(S.r_max + 1):
    print(f"E_{r} =", S.page(r))
print("H(Tot) =", S.total, " converges:", S.converges())

# %% two independent routes to the pages agree on random bicomplexes
rng = np.random.default_rng(1)
for k in range(5):
    D = random_double_complex(rng, GF(3))
    a, b = spectral_sequence(D), spectral_sequence(D, method="subquotient")
    same = a.pages == b.pages and a.page(2) == e2_by_iterated_cohomology(D)
    print(f"bicomplex {k}: pages agree {same}, H(Tot) {cohomology_dims(total_complex(D))[:4]}")
