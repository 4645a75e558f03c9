"""Formal automorphisms F_t(z) = z - H_t(z) with o(H_t) >= alpha and H_{t=0} = 0.

Composition follows ``(U ∘ V)(z) = U(V(z))``, so that
``(U ∘ V)^{-1} = V^{-1} ∘ U^{-1}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from .diffop import Derivation, apply_derivation
from .series import ContextMismatch, RingContext, SeriesVector, TruncSeries

PROFILES = ("general", "linear_in_t", "strictly_triangular", "graded")


def _check_alpha(v: SeriesVector, alpha: int, what: str) -> None:
    zo, to = v.orders()
    if zo < alpha:
        raise ValueError(f"{what} has z-order {zo} < alpha={alpha}")
    if to < 1:
        raise ValueError(f"{what} has a t^0 term (it must vanish at t=0)")


class Automorphism:
    """An element of the group of automorphisms ``z - H_t(z)``."""

    __slots__ = ("ctx", "alpha", "H")

    def __init__(self, H: SeriesVector, alpha: int = 1):
        if alpha < 1:
            raise ValueError("alpha must be >= 1")
        _check_alpha(H, alpha, "H")
        self.ctx = H.ctx
        self.alpha = alpha
        self.H = H

    @classmethod
    def identity(cls, ctx: RingContext, alpha: int = 1) -> "Automorphism":
        return cls(SeriesVector.zeros(ctx), alpha)

    @classmethod
    def from_map(cls, F: SeriesVector, alpha: int = 1) -> "Automorphism":
        """Build from the coordinate functions ``F_t(z)``."""
        return cls(F.ctx.variables() - F, alpha)

    @property
    def F(self) -> SeriesVector:
        """Coordinate functions ``z - H_t(z)``."""
        return self.ctx.variables() - self.H

    def __call__(self, u: TruncSeries) -> TruncSeries:
        """``u(F_t(z))``."""
        return u.subs(self.F)

    def is_identity(self) -> bool:
        return self.H.is_zero()

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.alpha == other.alpha and self.H == other.H

    def __hash__(self):
        return hash((self.alpha, self.H))

    def __str__(self) -> str:
        return f"F_t = z - {self.H}"

    __repr__ = __str__

    # wire format ----------------------------------------------------------
    def to_json(self) -> dict:
        return _doc(self.ctx, self.alpha, "H", self.H)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, doc: dict) -> "Automorphism":
        ctx, alpha = _read_header(doc)
        if "H" not in doc:
            raise ValueError("automorphism document needs an 'H' field")
        return cls(SeriesVector.from_json(ctx, doc["H"]), alpha)


@dataclass(frozen=True)
class DLog:
    """The D-Log coefficient ``a_t(z)``; the associated derivation is ``[a_t ∂/∂z]``."""

    a: SeriesVector
    alpha: int = 1

    def __post_init__(self):
        _check_alpha(self.a, self.alpha, "D-Log coefficient")

    @property
    def ctx(self) -> RingContext:
        return self.a.ctx

    @property
    def derivation(self) -> Derivation:
        return Derivation(self.a)

    def to_json(self) -> dict:
        return _doc(self.ctx, self.alpha, "a", self.a)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, doc: dict) -> "DLog":
        ctx, alpha = _read_header(doc)
        if "a" not in doc:
            raise ValueError("D-Log document needs an 'a' field")
        return cls(SeriesVector.from_json(ctx, doc["a"]), alpha)


def _doc(ctx: RingContext, alpha: int, key: str, v: SeriesVector) -> dict:
    return {
        "n": ctx.n,
        "commutative": ctx.commutative,
        "alpha": alpha,
        "N_z": ctx.nz,
        "N_t": ctx.nt,
        key: v.to_json(),
    }


def _read_header(doc: dict) -> tuple:
    if not isinstance(doc, dict):
        raise ValueError("expected a JSON object")
    for key, typ in (("n", int), ("commutative", bool), ("alpha", int), ("N_z", int), ("N_t", int)):
        if key not in doc:
            raise ValueError(f"missing field {key!r}")
        if not isinstance(doc[key], typ) or (typ is int and isinstance(doc[key], bool)):
            raise ValueError(f"field {key!r} must be {typ.__name__}")
    ctx = RingContext(doc["n"], doc["commutative"], doc["N_z"], doc["N_t"])
    return ctx, doc["alpha"]


def _same_group(U: Automorphism, V: Automorphism) -> None:
    if U.ctx != V.ctx:
        raise ContextMismatch(f"{U.ctx} vs {V.ctx}")
    if U.alpha != V.alpha:
        raise ValueError(f"alpha mismatch: {U.alpha} vs {V.alpha}")


def compose(U: Automorphism, V: Automorphism) -> Automorphism:
    """``U ∘ V``, i.e. the map ``z ↦ U(V(z))``."""
    _same_group(U, V)
    # z - H_U(V) - H_V = U(V(z)) after expanding U(w) = w - H_U(w) at w = V(z)
    return Automorphism(V.H + U.H.subs(V.F), U.alpha)


def invert(F: Automorphism) -> Automorphism:
    """``G_t = F_t^{-1} = z + M_t`` via ``M ← H(z + M)``.

    Each pass fixes one more power of t, so nt passes reach the exact
    truncated inverse.
    """
    ctx = F.ctx
    z = ctx.variables()
    M = SeriesVector.zeros(ctx)
    for _ in range(ctx.nt):
        M = F.H.subs(z + M)
    return Automorphism(-M, F.alpha)


def _flow_of(a: SeriesVector) -> SeriesVector:
    """``e^{[a ∂/∂z]} z`` for a vector with positive t-order."""
    ctx = a.ctx
    delta = Derivation(a)
    out = []
    for i in range(ctx.n):
        term = ctx.var(i)
        total = term
        for m in range(1, ctx.nt + 1):
            term = apply_derivation(delta, term) * mpq(1, m)
            if term.is_zero():
                break
            total = total + term
        out.append(total)
    return SeriesVector(out, ctx)


def exp_derivation(d: DLog) -> Automorphism:
    """The automorphism ``z ↦ e^{[a_t ∂/∂z]} z``."""
    return Automorphism.from_map(_flow_of(d.a), d.alpha)


def dlog(F: Automorphism) -> DLog:
    """The unique ``a_t`` with ``e^{[a_t ∂/∂z]} z = F_t(z)``, solved one power of t at a time."""
    ctx = F.ctx
    target = F.F
    a = SeriesVector.zeros(ctx)
    for k in range(1, ctx.nt + 1):
        # a_k enters the t^k slice only through the linear term of the exponential
        residual = (target - _flow_of(a)).t_coefficient(k)
        a = a + residual.map(lambda c: c.times_t(k))
    return DLog(a, F.alpha)


def is_graded_form(F: Automorphism) -> bool:
    """Whether each t^m slice of H_t is homogeneous of z-degree m + 1."""
    for comp in F.H:
        for t, w, _ in comp.terms():
            if len(w) != t + 1:
                return False
    return True


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _random_word(rng, ctx: RingContext, degree: int, letters) -> tuple:
    return ctx.canonical(int(rng.choice(letters)) for _ in range(degree))


def _coeff(rng) -> int:
    return int(rng.choice([-2, -1, 1, 2]))


def random_automorphism(
    ctx: RingContext,
    alpha: int,
    profile: str = "general",
    rng=None,
    max_terms: int = 3,
    degree_spread: int = 2,
) -> Automorphism:
    """A sparse random automorphism with coefficients in {±1, ±2}.

    ``general`` draws t-powers in [1, nt] and z-degrees in
    [alpha, alpha + degree_spread]; ``linear_in_t`` uses only t^1 so that
    F = z - tH(z); ``graded`` puts z-degree m + 1 at t^m; and
    ``strictly_triangular`` is t·H(z) with H homogeneous and H_i depending only
    on z_1..z_{i-1}, so the Jacobian is strictly lower triangular.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    rng = _rng(rng)
    if ctx.nt < 1:
        raise ValueError("nt >= 1 is needed for a non-identity automorphism")
    if alpha > ctx.nz:
        raise ValueError("alpha exceeds the z truncation; only the identity fits")
    n = ctx.n
    comps = [dict() for _ in range(n)]

    def add(i, t, word):
        key = (t, word)
        comps[i][key] = comps[i].get(key, 0) + _coeff(rng)

    if profile == "strictly_triangular":
        if n < 2:
            raise ValueError("strictly triangular profile needs n >= 2 (n = 1 only allows the identity)")
        d = int(rng.integers(alpha, min(ctx.nz, alpha + 1) + 1))
        for i in range(1, n):
            for _ in range(int(rng.integers(1, max_terms + 1))):
                add(i, 1, _random_word(rng, ctx, d, list(range(i))))
    elif profile == "graded":
        ms = [m for m in range(max(1, alpha - 1), ctx.nt + 1) if m + 1 <= ctx.nz]
        if not ms:
            raise ValueError("no graded slice fits the truncation")
        for i in range(n):
            for _ in range(int(rng.integers(1, max_terms + 1))):
                m = int(rng.choice(ms))
                add(i, m, _random_word(rng, ctx, m + 1, list(range(n))))
    else:
        hi = min(ctx.nz, alpha + degree_spread)
        for i in range(n):
            for _ in range(int(rng.integers(1, max_terms + 1))):
                t = 1 if profile == "linear_in_t" else int(rng.integers(1, ctx.nt + 1))
                d = int(rng.integers(alpha, hi + 1))
                add(i, t, _random_word(rng, ctx, d, list(range(n))))
    H = SeriesVector([TruncSeries(ctx, c) for c in comps], ctx)
    return Automorphism(H, alpha)
