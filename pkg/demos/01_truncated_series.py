"""Truncated series in commuting and non-commuting variables, and substitution."""
from ncsdiff import RingContext, SeriesVector, substitute

# Two non-commuting variables, z-degree <= 4, t-degree <= 2.
ctx = RingContext(2, commutative=False, nz=4, nt=2)
z1, z2, t = ctx.var(0), ctx.var(1), ctx.t()

print("z1*z2 == z2*z1 ?", z1 * z2 == z2 * z1)
u = z1 * z2 - t * z1 * z1 * z2
print("u            =", u)
print("orders of u  =", u.orders())

# Substitution replaces every occurrence in place.
F = SeriesVector([z1 - t * z2 * z2, z2], ctx)
print("u(F)         =", substitute(u, F))
print("du/dt        =", u.t_derivative(), "(t bound now", u.t_derivative().ctx.nt, ")")

# The same polynomial abelianized lands in the commutative ring.
print("abelianized  =", u.abelianized())
