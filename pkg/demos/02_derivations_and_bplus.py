"""Derivations act by replacing occurrences in place; B+ symmetrizes several of them."""
from ncsdiff import Derivation, DiffOp, RingContext, bplus, op_equal, triangle

ctx = RingContext(2, commutative=False, nz=5, nt=0)
z1, z2 = ctx.var(0), ctx.var(1)

delta = Derivation.single(ctx, 0, z1 * z2)  # [z1 z2 d/dz1]
print("delta(z2 z1)      =", delta(z2 * z1), "  (position of z1 is kept)")

phi = Derivation([z2 * z2, z1 * z1])
print("phi > delta       =", triangle(phi, delta))

# The two evaluation routes of B+ give the same operator.
aux = bplus([delta, phi], route="auxiliary")
rec = bplus([delta, phi], route="recursive")
print("routes agree      :", op_equal(aux, rec))
print("B+(delta, phi) z1 z2 =", aux(z1 * z2))

# One variable: B+(d, d) with d = [z^2 d/dz] sends z^2 to 2 z^4, which is d^2 - [2z^3 d/dz].
c1 = RingContext(1, commutative=True, nz=6, nt=0)
z = c1.var(0)
d = Derivation([z * z])
print("B+(d,d) z^2       =", bplus([d, d])(z * z))
print("(d^2 - [d>d]) z^2 =", (DiffOp.from_word([d, d]) - DiffOp.from_derivation(triangle(d, d)))(z * z))
