"""Formal automorphisms z - H_t(z): inverse, D-Log and exponential."""
from ncsdiff import Automorphism, RingContext, SeriesVector, compose, dlog, exp_derivation, invert

ctx = RingContext(1, commutative=True, nz=9, nt=8)
z, t = ctx.var(0), ctx.t()
F = Automorphism(SeriesVector([t * z * z], ctx))
print(F)

G = invert(F)
print("G_t = z +", -G.H[0])
print("(Catalan numbers appear as coefficients of t^k z^(k+1))")
print("F o G is identity:", compose(F, G).is_identity())

a = dlog(F)
print("D-Log a_t =", a.a[0])
print("exp(D-Log) gives back F:", exp_derivation(a) == F)

# Documents use the JSON wire format shared with the command-line tool.
print(F.dumps())
