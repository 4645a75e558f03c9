"""Randomized search for an automorphism on which a given NCSF acts nontrivially."""
from ncsdiff import separate
from ncsdiff.nsym import solve_pi

pi = solve_pi(3)
commutator = pi.Lambda(1) * pi.Lambda(2) - pi.Lambda(2) * pi.Lambda(1)
result = separate(commutator, max_n=3, attempts=200, seed=1729)
print("P =", commutator)
print("found at n =", result.n, "after", result.attempts, "attempt(s)")
print(result.F)
print("u =", result.u, "  S_F(P) u =", result.value)
