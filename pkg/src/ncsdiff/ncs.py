"""The NCS system of differential operators attached to an automorphism, its
verification, and the specialization NSym -> differential operators.

For ``F_t = z - H_t`` with inverse ``G_t = z + M_t``:

* ``f(-t)`` is the Taylor operator ``u ↦ u(F_t)`` and ``g(t)`` is ``u ↦ u(G_t)``;
* ``d(t) = -[a_t ∂/∂z]`` with ``a_t`` the D-Log of F, and ``φ_m = m · d_m``;
* ``h(t) = [(∂M_t/∂t)(F_t) ∂/∂z]`` with ``ψ_m`` its t^{m-1} coefficient;
* ``m(t) = [(∂H_t/∂t)(G_t) ∂/∂z]`` with ``ξ_m`` its t^{m-1} coefficient.

``h`` and ``m`` come from a t-derivative, so they are only known up to
t^{N_t - 1} and live in the context with the reduced t bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from . import autgroup
from .autgroup import Automorphism, dlog, invert, random_automorphism
from .diffop import (
    DiffOp,
    Derivation,
    apply_derivation,
    compose,
    exp_tdiffop,
    inverse_tdiffop,
    taylor_operator,
)
from .nsym import NSymElem, solve_pi
from .series import RingContext, SeriesVector, TruncSeries, _render_word, add_into

# reports -------------------------------------------------------------------

@dataclass
class Report:
    """Ordered list of ``{check, status, counterexample?}`` entries."""

    entries: list = field(default_factory=list)

    def add(self, check: str, ok: bool, counterexample=None) -> None:
        entry = {"check": check, "status": "pass" if ok else "fail"}
        if not ok and counterexample is not None:
            entry["counterexample"] = counterexample
        self.entries.append(entry)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for e in other.entries:
            self.entries.append({**e, "check": prefix + e["check"]})

    @property
    def passed(self) -> bool:
        return all(e["status"] == "pass" for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if e["status"] != "pass"]

    def to_json(self) -> list:
        return list(self.entries)

    def __bool__(self) -> bool:
        return self.passed


def _compare(report: Report, check: str, lhs: DiffOp, rhs: DiffOp) -> bool:
    w = lhs.first_difference(rhs)
    if w is None:
        report.add(check, True)
        return True
    report.add(
        check,
        False,
        {"monomial": _render_word(w), "lhs": str(lhs.column(w)), "rhs": str(rhs.column(w))},
    )
    return False


# the system -------------------------------------------------------------------

@dataclass(frozen=True)
class NcsSystem:
    """The five operator-valued t-series ``(f, g, d, h, m)``.

    ``f``, ``g`` and ``d`` live in ``ctx``; ``h`` and ``m`` in ``ctx`` with
    the t bound lowered by one.  The coefficient accessors return t-free
    operators re-homed in ``ctx``.  Note ``d``'s t^m coefficient is ``φ_m / m``.
    """

    ctx: RingContext
    f: DiffOp
    g: DiffOp
    d: DiffOp
    h: DiffOp
    m: DiffOp

    def _coef(self, op: DiffOp, k: int) -> DiffOp:
        return op.t_coefficient(k).with_context(self.ctx)

    def lambda_(self, k: int) -> DiffOp:
        return self._coef(self.f, k)

    def s(self, k: int) -> DiffOp:
        return self._coef(self.g, k)

    def phi(self, k: int) -> DiffOp:
        return self._coef(self.d, k) * k

    def psi(self, k: int) -> DiffOp:
        return self._coef(self.h, k - 1)

    def xi(self, k: int) -> DiffOp:
        return self._coef(self.m, k - 1)

    def family(self, name: str, k: int) -> DiffOp:
        return getattr(self, "lambda_" if name == "lambda" else name)(k)

    def replace(self, **changes) -> "NcsSystem":
        return NcsSystem(**{**self.__dict__, **changes})


def _derivation_op(v: SeriesVector) -> DiffOp:
    return DiffOp.from_derivation(Derivation(v))


def build_omega(F: Automorphism) -> NcsSystem:
    ctx = F.ctx
    G = invert(F)
    M = -G.H
    f = taylor_operator(F.H, -1).t_negated()
    g = taylor_operator(M, 1)
    d = -_derivation_op(dlog(F).a)
    reduced = ctx.with_nt(max(ctx.nt - 1, 0))
    h = _derivation_op(M.t_derivative().subs(F.F.with_t_bound(reduced.nt)))
    m = _derivation_op(F.H.t_derivative().subs(G.F.with_t_bound(reduced.nt)))
    return NcsSystem(ctx, f, g, d, h, m)


def verify_ncs(system: NcsSystem) -> Report:
    """Check the five defining equations of an NCS system on the monomial basis."""
    ctx = system.ctx
    one = DiffOp.identity(ctx)
    f, g = system.f, system.g
    f_neg = f.t_negated()
    rep = Report()
    _compare(rep, "f(0)=1", f.t_coefficient(0), one)
    _compare(rep, "f(-t)g(t)=1", compose(f_neg, g), one)
    _compare(rep, "g(t)f(-t)=1", compose(g, f_neg), one)
    _compare(rep, "exp(d(t))=g(t)", exp_tdiffop(system.d), g)
    dg = g.t_derivative()
    g_low = g.with_context(dg.ctx)
    _compare(rep, "dg/dt=g(t)h(t)", compose(g_low, system.h), dg)
    _compare(rep, "dg/dt=m(t)g(t)", compose(system.m, g_low), dg)
    return rep


def tamper(system: NcsSystem) -> NcsSystem:
    """Negative control: perturb h by the Euler derivation [z_1 ∂/∂z_1]."""
    red = system.h.ctx
    euler = DiffOp.from_derivation(Derivation.single(red, 0, red.var(0)))
    return system.replace(h=system.h + euler)


# specialization ------------------------------------------------------------------

class Specialization:
    """The algebra map NSym -> operators with ``Λ_m ↦ λ_m``."""

    def __init__(self, F: Automorphism, system: NcsSystem | None = None):
        self.F = F
        self.system = system or build_omega(F)
        self.max_weight = F.ctx.nt
        self.images = {m: self.system.lambda_(m) for m in range(1, self.max_weight + 1)}
        self._words: dict = {(): DiffOp.identity(F.ctx)}

    def word(self, w: tuple) -> DiffOp:
        if w not in self._words:
            self._words[w] = compose(self.word(w[:-1]), self.images[w[-1]])
        return self._words[w]

    def __call__(self, P: NSymElem) -> DiffOp:
        if P.weight() > self.max_weight:
            raise ValueError(f"weight {P.weight()} exceeds the t truncation N_t={self.max_weight}")
        out = DiffOp.zero(self.F.ctx)
        for w, c in P.terms():
            out = out + self.word(w) * c
        return out


def specialize(P: NSymElem, F: Automorphism, system: NcsSystem | None = None) -> DiffOp:
    return Specialization(F, system)(P)


def correspondence_check(F: Automorphism, max_m: int | None = None, system: NcsSystem | None = None) -> Report:
    """Images of S_m, Ψ_m, Φ_m, Ξ_m against the coefficients of g, h, d, m."""
    specialization = Specialization(F, system)
    sys_ = specialization.system
    top = F.ctx.nt if max_m is None else min(max_m, F.ctx.nt)
    pi = solve_pi(top)
    rep = Report()
    pairs = (("Lambda", "lambda"), ("S", "s"), ("Psi", "psi"), ("Phi", "phi"), ("Xi", "xi"))
    for m in range(1, top + 1):
        for fam, op_name in pairs:
            _compare(rep, f"S({fam}_{m})={op_name}_{m}", specialization(pi.family(fam, m)), sys_.family(op_name, m))
    return rep


# the linear-in-t special form ----------------------------------------------------------

def _t_free_part(F: Automorphism) -> SeriesVector:
    if any(t != 1 for comp in F.H for t, _, _ in comp.terms()):
        raise ValueError("automorphism is not of the form z - tH(z)")
    return F.H.t_coefficient(1)


def cm_sequence(H: SeriesVector, count: int) -> list:
    """``C_1 = H`` and ``C_m = [C_{m-1} ∂/∂z] H``."""
    if any(comp.t_degree() > 0 for comp in H):
        raise ValueError("H must be t-free")
    seq = [H]
    while len(seq) < count:
        delta = Derivation(seq[-1])
        seq.append(H.map(lambda c: apply_derivation(delta, c)))
    return seq[:count]


def psi_xi_special(F: Automorphism) -> tuple:
    """``ψ_m = [C_m ∂/∂z]`` and ``ξ_m = [N_[m] ∂/∂z]`` for ``F = z - tH(z)``, m = 1..N_t.

    ``N_[m]`` is the t^m coefficient of ``M_t``.
    """
    H = _t_free_part(F)
    nt = F.ctx.nt
    M = -invert(F).H
    psis = [Derivation(C) for C in cm_sequence(H, nt)]
    xis = [Derivation(M.t_coefficient(k)) for k in range(1, nt + 1)]
    return psis, xis


def special_form_check(F: Automorphism, system: NcsSystem | None = None) -> Report:
    system = system or build_omega(F)
    psis, xis = psi_xi_special(F)
    rep = Report()
    for k, (p, x) in enumerate(zip(psis, xis), start=1):
        _compare(rep, f"psi_{k}=[C_{k} d/dz]", DiffOp.from_derivation(p), system.psi(k))
        _compare(rep, f"xi_{k}=[N_{k} d/dz]", DiffOp.from_derivation(x), system.xi(k))
    return rep


def _partial(u: TruncSeries, j: int) -> TruncSeries:
    out: dict = {}
    for (t, w), c in u.raw.items():
        k = w.count(j)
        if k:
            i = w.index(j)
            add_into(out, {(t, w[:i] + w[i + 1:]): c * k})
    return TruncSeries._raw(u.ctx, out)


def jacobian(H: SeriesVector) -> list:
    """Matrix ``[∂H_i/∂z_j]`` of a commutative vector."""
    if not H.ctx.commutative:
        raise ValueError("the Jacobian is only defined in commutative mode")
    return [[_partial(Hi, j) for j in range(H.ctx.n)] for Hi in H]


def _mat_vec(J: list, v: SeriesVector) -> SeriesVector:
    ctx = v.ctx
    return SeriesVector([sum((Jij * vj for Jij, vj in zip(row, v)), ctx.zero()) for row in J], ctx)


def jacobian_power_route(H: SeriesVector, count: int) -> list:
    """``(JH)^{m-1} H`` for m = 1..count."""
    J = jacobian(H)
    seq = [H]
    while len(seq) < count:
        seq.append(_mat_vec(J, seq[-1]))
    return seq[:count]


def is_strictly_lower_triangular(J: list) -> bool:
    return all(J[i][j].is_zero() for i in range(len(J)) for j in range(i, len(J)))


# group and grading ---------------------------------------------------------------------

def group_hom_check(U: Automorphism, V: Automorphism) -> Report:
    """``g^{U∘V} = g^U g^V`` and ``g^{U^{-1}} = (g^U)^{-1}``."""
    gU = build_omega(U).g
    gV = build_omega(V).g
    rep = Report()
    _compare(rep, "g[U o V]=g[U] g[V]", build_omega(autgroup.compose(U, V)).g, compose(gU, gV))
    _compare(rep, "g[U^-1]=g[U]^-1", build_omega(invert(U)).g, inverse_tdiffop(gU))
    return rep


def graded_check(F: Automorphism, system: NcsSystem | None = None) -> bool:
    """Whether every λ_m sends each homogeneous monomial of degree d into degree d + m."""
    if F.alpha < 2:
        raise ValueError("the grading criterion needs alpha >= 2")
    system = system or build_omega(F)
    for m in range(1, F.ctx.nt + 1):
        for w, col in system.lambda_(m).columns().items():
            if any(len(v) != len(w) + m for _, v in col):
                return False
    return True


def _random_series(ctx: RingContext, rng, max_terms: int = 3, min_degree: int = 0) -> TruncSeries:
    terms: dict = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        d = int(rng.integers(min_degree, ctx.nz + 1))
        w = ctx.canonical(int(rng.integers(0, ctx.n)) for _ in range(d))
        add_into(terms, {(0, w): mpq(int(rng.integers(-3, 4)))})
    return TruncSeries(ctx, terms)


def action_hopf_checks(F: Automorphism, rng=None, samples: int = 3, system: NcsSystem | None = None) -> Report:
    """Divided-powers action of the s and λ families and Leibniz for ψ, ξ, φ, on random u, v."""
    rng = autgroup._rng(rng)
    system = system or build_omega(F)
    ctx = F.ctx
    nt = ctx.nt
    fams = {name: [system.family(name, k) if k else DiffOp.identity(ctx) for k in range(nt + 1)] for name in ("s", "lambda")}
    rep = Report()
    for _ in range(samples):
        u = _random_series(ctx, rng)
        v = _random_series(ctx, rng)
        uv = u * v
        for name, ops in fams.items():
            for k in range(nt + 1):
                rhs = sum((ops[i](u) * ops[k - i](v) for i in range(k + 1)), ctx.zero())
                lhs = ops[k](uv)
                rep.add(f"{name}_{k}(uv)=sum {name}_i(u){name}_j(v)", lhs == rhs, None if lhs == rhs else {"u": str(u), "v": str(v)})
        for name in ("psi", "xi", "phi"):
            for k in range(1, nt + 1):
                op = system.family(name, k)
                ok = op(uv) == op(u) * v + u * op(v)
                rep.add(f"Leibniz {name}_{k}", ok, None if ok else {"u": str(u), "v": str(v)})
    return rep


# separation ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationWitness:
    n: int
    F: Automorphism
    u: TruncSeries
    value: TruncSeries
    attempts: int

    def to_json(self) -> dict:
        return {
            "status": "witness",
            "n": self.n,
            "attempts": self.attempts,
            "automorphism": self.F.to_json(),
            "u": self.u.to_json(),
            "value": self.value.to_json(),
        }


@dataclass(frozen=True)
class SeparationInconclusive:
    """No witness within the budget; this is not evidence that P maps to zero."""

    attempts: int
    max_n: int
    seed: int

    def to_json(self) -> dict:
        return {"status": "inconclusive", "attempts": self.attempts, "max_n": self.max_n, "seed": self.seed}


class _LazyLambda:
    """λ_m applied on demand: ``λ_m u = (-1)^m [t^m] u(F_t)`` for t-free u."""

    def __init__(self, F: Automorphism):
        self.F = F
        self.ctx = F.ctx
        self._cache: dict = {}

    def _images(self, w) -> dict:
        if w not in self._cache:
            img = self.ctx.monomial(w).subs(self.F.F)
            per_t: dict = {}
            for (t, v), c in img.raw.items():
                per_t.setdefault(t, {})[(0, v)] = -c if t % 2 else c
            self._cache[w] = per_t
        return self._cache[w]

    def apply(self, m: int, u: dict) -> dict:
        out: dict = {}
        for (_, w), c in u.items():
            img = self._images(w).get(m)
            if img:
                add_into(out, img, c)
        return out

    def word(self, word: tuple, u: dict) -> dict:
        for m in reversed(word):
            u = self.apply(m, u)
            if not u:
                break
        return u


def separate(
    P: NSymElem,
    max_n: int = 3,
    attempts: int = 200,
    seed: int = 0,
    commutative: bool = False,
    alpha: int = 2,
):
    """Random search for an automorphism F and monomial u with ``S_F(P) u != 0``.

    Cycles n through 1..max_n and alternates the general and linear-in-t
    profiles.  Contexts use N_t = weight(P) and N_z = alpha * weight(P) + 1.
    """
    if P.is_zero():
        raise ValueError("P must be nonzero")
    w = max(P.weight(), 1)
    rng = np.random.default_rng(seed)
    profiles = ("general", "linear_in_t")
    for attempt in range(attempts):
        n = 1 + attempt % max_n
        ctx = RingContext(n, commutative, alpha * w + 1, w)
        profile = profiles[(attempt // max_n) % 2]
        F = random_automorphism(ctx, alpha, profile, rng)
        lam = _LazyLambda(F)
        for mono in ctx.basis():
            acc: dict = {}
            base = {(0, mono): mpq(1)}
            for word, c in P.raw.items():
                add_into(acc, lam.word(word, base), c)
            if acc:
                u = ctx.monomial(mono)
                return SeparationWitness(n, F, u, TruncSeries(ctx, acc), attempt + 1)
    return SeparationInconclusive(attempts, max_n, seed)
