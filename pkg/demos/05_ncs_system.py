"""The NCS system of differential operators attached to an automorphism."""
import numpy as np

from ncsdiff import (
    RingContext,
    build_omega,
    correspondence_check,
    graded_check,
    is_graded_form,
    random_automorphism,
    specialize,
    verify_ncs,
)
from ncsdiff.nsym import solve_pi

rng = np.random.default_rng(7)
ctx = RingContext(2, commutative=False, nz=5, nt=4)
F = random_automorphism(ctx, 2, "general", rng)
print(F)

system = build_omega(F)
for entry in verify_ncs(system).to_json():
    print(f"  {entry['status']:4}  {entry['check']}")

# The specialization sends Psi_2 to the t^1 coefficient of h(t).
pi = solve_pi(4)
psi2 = specialize(pi.Psi(2), F, system)
print("S(Psi_2) z1 =", psi2(ctx.var(0)))
print("psi_2 z1    =", system.psi(2)(ctx.var(0)))
print("correspondence holds:", correspondence_check(F).passed)

G = random_automorphism(ctx, 2, "graded", rng)
print("graded form:", is_graded_form(G), " graded operators:", graded_check(G))
