"""Exact linear algebra: Smith forms over Z, kernels over F_p and Q, and
cohomology of a two-term sequence with torsion."""

# %%
from bwcoh.exactlinalg import GF, QQ, ZZ, Matrix, cohomology_at, kernel_basis, rank, smith_normal_form, subquotient_dim

A = Matrix(ZZ, [[2, 4], [6, 8]])
S = smith_normal_form(A)
print("Smith invariants of [[2,4],[6,8]]:", S.d)
print("U A V =", (S.U @ A @ S.V).tolist())

# %% kernels depend on the coefficients
B = [[1, 1], [1, 1]]
for R in (GF(2), GF(3), QQ):
    M = Matrix(R, B)
    print(f"over {R}: rank {rank(M)}, kernel basis {kernel_basis(M).tolist()}")

# %% a subquotient: the plane modulo its diagonal
F2 = GF(2)
print("dim F2^2 / diagonal =", subquotient_dim(Matrix.identity(F2, 2), Matrix(F2, [[1], [1]])))

# %% integral cohomology keeps torsion: Z --2--> Z
print("coker(2) =", cohomology_at(Matrix(ZZ, [[2]]), Matrix.zeros(ZZ, 0, 1)))
