"""ψ-rings: sections of the semidirect product pair with ψ-derivations, the
derivation natural system, and free ψ-rings."""

# %%
from bwcoh import natsys as ns
from bwcoh import psiring as ps

for name, P in ps.psi_catalogue():
    rep = ps.pair_sections_with_derivations(P)
    print(f"{name:45s} sections {len(rep.sections):3d}  ψ-derivations {len(rep.derivations):3d}  paired {rep.ok}")

# %% the square-zero extension F_2 ⋊ F_2
P = ps.regular_module(ps.trivial_psi(ps.zmod(2)))
S = ps.semidirect_product(P)
m = P.module.size  # (x, a) has index x·|M| + a
v = S.ring.mul[1 * m + 1, 1 * m + 1]
print(f"(1, 1)·(1, 1) = ({v // m}, {v % m})")

# %% Der(R, M^f) as a natural system on the monoid; its H^0 counts ψ-derivations
P = dict(ps.psi_catalogue())["F2[ε], Ψ^t kills ε, M=regular"]
D = ps.psi_derivation_system(P)
print("dims of Der(R, M^f):", D.dims, " H^0 =", ns.bw_cohomology(D, 0)[0], " ψ-derivations:", len(ps.psi_derivations(P)))

# %% the literal twist r·a = Ψ(r)Ψ(a) is not a module when Ψ is a projection
try:
    ps.twist_module(P, "t", "literal")
except ps.ModuleAxiomFailure as e:
    print("literal twist:", e)

# %% free ψ-ring on one generator over {1, t}, t² = t
F = ps.free_psi_ring(["a"], ps.idempotent_monoid())
a = F.var("a")
print("Ψ^t(a) =", F.fmt(F.psi("t", a)), " Ψ^t(a^(t)) =", F.fmt(F.psi("t", F.psi("t", a))))
print("Ψ^t(a² + a) =", F.fmt(F.psi("t", F.add(F.mul(a, a), a))))
