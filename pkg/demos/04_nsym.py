"""The five families of noncommutative symmetric functions and the Hopf structure."""
from ncsdiff import abelianize, antipode, coproduct, omega_lambda, solve_pi, to_psi_basis
from ncsdiff.nsym import render_e

pi = solve_pi(4)
for name in ("S", "Phi", "Psi", "Xi"):
    for m in range(1, 4):
        print(f"{name}_{m} = {pi.family(name, m)}")

print()
print("omega(Psi_3) == Xi_3:", omega_lambda(pi.Psi(3)) == pi.Xi(3))
print("Lambda_2 in the Psi basis:", to_psi_basis(pi.Lambda(2)))
print("coproduct(S_2):", coproduct(pi.S(2)))
print("antipode(S_2) =", antipode(pi.S(2)))
print("abelianized Psi_3 (the power sum p_3):", render_e(abelianize(pi.Psi(3))))
