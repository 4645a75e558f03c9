"""Derivations and differential operators of a truncated series ring.

A :class:`Derivation` ``[u ∂/∂z]`` acts on a word by replacing each occurrence
of ``z_i`` in place by ``u_i`` (so ``[u ∂/∂z_1](z_2 z_1) = z_2 u``, not
``u z_2``).  A :class:`DiffOp` is stored by its action on the truncated
monomial basis: one sparse image column per monomial of degree <= nz.  When
an operator was assembled from derivations the symbolic composition words are
kept alongside for display and serialization.

Operators may carry powers of t (elements of D[[t]]); those play the role of
operator-valued generating functions and are the same class.

Every derivation here has coefficients without constant z-terms, so no
operator lowers z-degree.  That is what makes composition of truncated basis
actions exact: the image of a degree-d monomial never needs monomials above
the truncation bound to be computed correctly.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

from .series import (
    ContextMismatch,
    RingContext,
    SeriesVector,
    TruncSeries,
    _is_scalar,
    add_into,
    as_rational,
    mul_terms,
    shift_terms,
)

_WORD_CAP = 512


class Derivation:
    """The derivation ``[u ∂/∂z] = Σ_i [u_i ∂/∂z_i]`` with coefficient vector ``u``."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, coeffs: SeriesVector | Sequence[TruncSeries]):
        if not isinstance(coeffs, SeriesVector):
            coeffs = SeriesVector(coeffs)
        for i, c in enumerate(coeffs):
            if any(not w for _, w in c.raw):
                raise ValueError(f"coefficient {i + 1} has a z-free term; derivations must not lower degree")
        self.ctx = coeffs.ctx
        self.coeffs = coeffs
        self._hash = None

    @classmethod
    def zero(cls, ctx: RingContext) -> "Derivation":
        return cls(SeriesVector.zeros(ctx))

    @classmethod
    def single(cls, ctx: RingContext, i: int, u: TruncSeries) -> "Derivation":
        """``[u ∂/∂z_{i+1}]``."""
        comps = [ctx.zero()] * ctx.n
        comps[i] = u
        return cls(SeriesVector(comps, ctx))

    def __call__(self, u: TruncSeries) -> TruncSeries:
        return apply_derivation(self, u)

    def is_zero(self) -> bool:
        return self.coeffs.is_zero()

    def z_order(self):
        return self.coeffs.orders()[0]

    def in_der_alpha(self, alpha: int) -> bool:
        """Whether every coefficient has z-order >= alpha (raises degree by >= alpha-1)."""
        return self.z_order() >= alpha

    def __add__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return Derivation(self.coeffs + other.coeffs)

    def __sub__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return Derivation(self.coeffs - other.coeffs)

    def __neg__(self):
        return Derivation(-self.coeffs)

    def __mul__(self, c):
        if not _is_scalar(c):
            return NotImplemented
        return Derivation(self.coeffs * c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def to_json(self) -> list:
        return self.coeffs.to_json()

    @classmethod
    def from_json(cls, ctx: RingContext, data) -> "Derivation":
        return cls(SeriesVector.from_json(ctx, data))

    def __str__(self) -> str:
        parts = [f"({c}) d/dz{i + 1}" for i, c in enumerate(self.coeffs) if c]
        return "[" + (" + ".join(parts) if parts else "0") + "]"

    __repr__ = __str__


def _derive_terms(coeffs: Sequence[Mapping], terms: Mapping, ctx: RingContext) -> dict:
    out: dict = {}
    if ctx.commutative:
        for (t, w), c in terms.items():
            i, L = 0, len(w)
            while i < L:
                j = i
                while j < L and w[j] == w[i]:
                    j += 1
                v = coeffs[w[i]]
                if v:
                    rest = w[:i] + w[i + 1:]
                    add_into(out, shift_terms(v, t, rest, (), ctx), c * (j - i))
                i = j
    else:
        for (t, w), c in terms.items():
            for p, i in enumerate(w):
                v = coeffs[i]
                if v:
                    add_into(out, shift_terms(v, t, w[:p], w[p + 1:], ctx), c)
    return out


def apply_derivation(delta: Derivation, u: TruncSeries) -> TruncSeries:
    """Occurrence-replacement action of ``delta`` on ``u`` (Leibniz rule, z's kept in place)."""
    if delta.ctx != u.ctx:
        raise ContextMismatch(f"{delta.ctx} vs {u.ctx}")
    return TruncSeries._raw(u.ctx, _derive_terms([c.raw for c in delta.coeffs], u.raw, u.ctx))


def triangle(phi: Derivation, delta: Derivation) -> Derivation:
    """``phi ▷ delta``: the derivation whose coefficients are phi applied to delta's."""
    if phi.ctx != delta.ctx:
        raise ContextMismatch(f"{phi.ctx} vs {delta.ctx}")
    return Derivation(delta.coeffs.map(phi))


def _mul_words(a: dict | None, b: dict | None) -> dict | None:
    if a is None or b is None or len(a) * len(b) > _WORD_CAP:
        return None
    out: dict = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            add_into(out, {wa + wb: ca * cb})
    return out


def _add_words(a: dict | None, b: dict | None, scale=1) -> dict | None:
    if a is None or b is None:
        return None
    out = dict(a)
    add_into(out, b, scale)
    return out if len(out) <= _WORD_CAP else None


class DiffOp:
    """A differential operator, possibly with t-dependent coefficients.

    The canonical content is the basis action (``column(w)`` for every monomial
    ``w`` of degree <= nz).  ``words`` maps tuples of derivations (composition
    words, applied right to left) to scalars, with the empty tuple standing for
    the identity; it is ``None`` for operators built from a raw action.
    """

    __slots__ = ("ctx", "_cols", "words")

    def __init__(self, ctx: RingContext, cols: dict, words: dict | None = None):
        self.ctx = ctx
        self._cols = cols
        self.words = words

    # constructors ---------------------------------------------------------
    @classmethod
    def identity(cls, ctx: RingContext, c=1) -> "DiffOp":
        c = as_rational(c)
        if not c:
            return cls.zero(ctx)
        return cls(ctx, {w: {(0, w): c} for w in ctx.basis()}, {(): c})

    @classmethod
    def zero(cls, ctx: RingContext) -> "DiffOp":
        return cls(ctx, {}, {})

    @classmethod
    def from_derivation(cls, delta: Derivation) -> "DiffOp":
        ctx = delta.ctx
        coeffs = [c.raw for c in delta.coeffs]
        cols = {}
        for w in ctx.basis():
            img = _derive_terms(coeffs, {(0, w): mpq(1)}, ctx)
            if img:
                cols[w] = img
        return cls(ctx, cols, {(delta,): mpq(1)} if not delta.is_zero() else {})

    @classmethod
    def from_word(cls, word: Sequence[Derivation], scalar=1) -> "DiffOp":
        """``scalar * δ_1 ∘ δ_2 ∘ ... ∘ δ_k``."""
        if not word:
            raise ValueError("composition words must be nonempty; use identity()")
        out = cls.from_derivation(word[-1])
        for d in reversed(word[:-1]):
            out = cls.from_derivation(d) * out
        return out * scalar

    @classmethod
    def from_terms(cls, ctx: RingContext, identity=0, terms: Iterable = ()) -> "DiffOp":
        """Linear combination ``identity * 1 + Σ scalar * word``."""
        out = cls.identity(ctx, identity)
        for scalar, word in terms:
            out = out + cls.from_word(tuple(word), scalar)
        return out

    @classmethod
    def from_action(cls, ctx: RingContext, fn: Callable) -> "DiffOp":
        """Operator whose image of each basis monomial is ``fn(w)`` (raw dict or series)."""
        cols = {}
        for w in ctx.basis():
            img = fn(w)
            if isinstance(img, TruncSeries):
                img = dict(img.raw)
            if img:
                cols[w] = img
        return cls(ctx, cols, None)

    @classmethod
    def from_t_coefficients(cls, ctx: RingContext, coeffs: Mapping[int, "DiffOp"]) -> "DiffOp":
        """``Σ_k t^k coeffs[k]`` for t-free operators ``coeffs[k]``."""
        out = cls.zero(ctx)
        for k, op in coeffs.items():
            if k > ctx.nt:
                continue
            out = out + op.with_context(ctx).times_t(k)
        return out

    # inspection ---------------------------------------------------------
    def column(self, w) -> TruncSeries:
        return TruncSeries._raw(self.ctx, dict(self._cols.get(tuple(w), {})))

    def columns(self) -> Mapping:
        return self._cols

    def is_zero(self) -> bool:
        return not self._cols

    def t_order(self):
        ts = [t for col in self._cols.values() for t, _ in col]
        return min(ts, default=math.inf)

    def is_t_free(self) -> bool:
        return all(t == 0 for col in self._cols.values() for t, _ in col)

    def t_coefficient(self, k: int) -> "DiffOp":
        """The t-free operator multiplying t^k."""
        cols = {}
        for w, col in self._cols.items():
            # the operator's t^k part sends w to the t^k slice of its image
            img = {(0, v): c for (t, v), c in col.items() if t == k}
            if img:
                cols[w] = img
        words = None
        if self.words is not None and all(_word_t_free(wd) for wd in self.words):
            words = dict(self.words) if k == 0 else {}
        return DiffOp(self.ctx, cols, words)

    def first_difference(self, other: "DiffOp"):
        """First basis monomial on which the two operators act differently, or None."""
        self._check(other)
        for w in self.ctx.basis():
            if self._cols.get(w, {}) != other._cols.get(w, {}):
                return w
        return None

    # algebra ------------------------------------------------------------
    def _check(self, other: "DiffOp") -> None:
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            if _is_scalar(other):
                other = DiffOp.identity(self.ctx, other)
            else:
                return NotImplemented
        self._check(other)
        cols = {w: dict(c) for w, c in self._cols.items()}
        for w, col in other._cols.items():
            acc = cols.setdefault(w, {})
            add_into(acc, col)
            if not acc:
                del cols[w]
        return DiffOp(self.ctx, cols, _add_words(self.words, other.words))

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if _is_scalar(other):
            other = DiffOp.identity(self.ctx, other)
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c = as_rational(other)
            if not c:
                return DiffOp.zero(self.ctx)
            cols = {w: {k: v * c for k, v in col.items()} for w, col in self._cols.items()}
            words = None if self.words is None else {k: v * c for k, v in self.words.items()}
            return DiffOp(self.ctx, cols, words)
        if isinstance(other, DiffOp):
            return compose(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if _is_scalar(other):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        out = DiffOp.identity(self.ctx)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, u: TruncSeries) -> TruncSeries:
        return apply_op(self, u)

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return op_equal(self, other)

    __hash__ = None

    # t-structure -----------------------------------------------------------
    def times_t(self, k: int = 1) -> "DiffOp":
        nt = self.ctx.nt
        cols = {}
        for w, col in self._cols.items():
            img = {(t + k, v): c for (t, v), c in col.items() if t + k <= nt}
            if img:
                cols[w] = img
        return DiffOp(self.ctx, cols, None if k else self.words)

    def t_negated(self) -> "DiffOp":
        """The operator with t replaced by -t."""
        cols = {w: {(t, v): (-c if t % 2 else c) for (t, v), c in col.items()} for w, col in self._cols.items()}
        words = self.words if self.words is not None and all(_word_t_free(wd) for wd in self.words) else None
        return DiffOp(self.ctx, cols, words)

    def t_derivative(self) -> "DiffOp":
        """d/dt of the operator-valued series; lives in the context with bound nt - 1."""
        ctx = self.ctx.with_nt(max(self.ctx.nt - 1, 0))
        cols = {}
        for w, col in self._cols.items():
            img = {(t - 1, v): c * t for (t, v), c in col.items() if t and t - 1 <= ctx.nt}
            if img:
                cols[w] = img
        return DiffOp(ctx, cols, None)

    def with_context(self, ctx: RingContext) -> "DiffOp":
        """Re-home the operator in a context differing only in the t bound.

        Lowering the bound truncates; raising it is only meaningful for
        t-free operators, whose action is exact at any t bound.
        """
        if not ctx.same_z_ring(self.ctx):
            raise ContextMismatch(f"{self.ctx} vs {ctx}")
        if ctx.nt > self.ctx.nt and not self.is_t_free():
            raise ValueError("cannot raise the t bound of a t-dependent operator")
        cols = {}
        for w, col in self._cols.items():
            img = {k: c for k, c in col.items() if k[0] <= ctx.nt}
            if img:
                cols[w] = img
        return DiffOp(ctx, cols, self.words)

    def with_t_bound(self, nt: int) -> "DiffOp":
        return self.with_context(self.ctx.with_nt(nt))

    # display / serialization -------------------------------------------------
    def to_json(self) -> dict:
        if self.words is not None:
            ident = self.words.get((), mpq(0))
            terms = [
                {"scalar": str(c), "word": [d.to_json() for d in wd]}
                for wd, c in sorted(self.words.items(), key=lambda kv: len(kv[0]))
                if wd
            ]
            return {"identity": str(ident), "terms": terms}
        action = []
        for w in self.ctx.basis():
            col = self._cols.get(w)
            if col:
                action.append({"monomial": list(w), "image": TruncSeries._raw(self.ctx, col).to_json()})
        return {"action": action}

    def __str__(self) -> str:
        if self.words is not None:
            if not self.words:
                return "0"
            parts = []
            for wd, c in sorted(self.words.items(), key=lambda kv: len(kv[0])):
                parts.append(f"{c}" if not wd else f"{c}*" + "∘".join(str(d) for d in wd))
            return " + ".join(parts)
        return f"<DiffOp acting on {len(self._cols)} basis monomials>"

    __repr__ = __str__


def _word_t_free(word) -> bool:
    return all(c.t_order() >= 0 and c.t_degree() <= 0 for d in word for c in d.coeffs)


TDiffOp = DiffOp  # operator-valued t-series share the class


def compose(A: DiffOp, B: DiffOp) -> DiffOp:
    """``A ∘ B`` (apply B first), truncated."""
    A._check(B)
    nt = A.ctx.nt
    acols = A._cols
    cols = {}
    for w, col in B._cols.items():
        acc: dict = {}
        for (t, v), c in col.items():
            img = acols.get(v)
            if not img:
                continue
            for (t2, v2), c2 in img.items():
                tt = t + t2
                if tt > nt:
                    continue
                key = (tt, v2)
                x = acc.get(key)
                acc[key] = c * c2 if x is None else x + c * c2
        acc = {k: x for k, x in acc.items() if x}
        if acc:
            cols[w] = acc
    return DiffOp(A.ctx, cols, _mul_words(A.words, B.words))


def apply_op(op: DiffOp, u: TruncSeries) -> TruncSeries:
    """Apply an operator to a series; powers of t in u are passive scalars."""
    if op.ctx != u.ctx:
        raise ContextMismatch(f"{op.ctx} vs {u.ctx}")
    nt = op.ctx.nt
    out: dict = {}
    for (t, w), c in u.raw.items():
        img = op._cols.get(w)
        if not img:
            continue
        if t:
            img = {(t + t2, v): x for (t2, v), x in img.items() if t + t2 <= nt}
        add_into(out, img, c)
    return TruncSeries._raw(u.ctx, out)


def op_equal(P: DiffOp, Q: DiffOp) -> bool:
    """Equality of truncated actions on every monomial of degree <= nz."""
    P._check(Q)
    return P._cols == Q._cols


# B+ -------------------------------------------------------------------------

def _group(deltas: Sequence[Derivation]) -> list:
    groups: dict = {}
    order = []
    for d in deltas:
        if d not in groups:
            groups[d] = 0
            order.append(d)
        groups[d] += 1
    return [(d, groups[d]) for d in order]


def _bplus_auxiliary(deltas: Sequence[Derivation]) -> DiffOp:
    ctx = deltas[0].ctx
    groups = _group(deltas)
    coeffs = [[c.raw for c in d.coeffs] for d, _ in groups]
    start = tuple(cnt for _, cnt in groups)
    done = tuple(0 for _ in groups)
    total = sum(start)
    mult = math.prod(math.factorial(cnt) for _, cnt in groups)

    def act(w):
        if len(w) < total:
            return {}
        # replaced positions are frozen: their coefficient is never revisited
        states = {start: {(0, ()): mpq(1)}}
        L = len(w)
        for p, letter in enumerate(w):
            left = L - p - 1
            new: dict = {}
            for state, acc in states.items():
                need = sum(state)
                if need <= left:
                    add_into(new.setdefault(state, {}), shift_terms(acc, 0, (), (letter,), ctx))
                for j, cnt in enumerate(state):
                    v = coeffs[j][letter]
                    if cnt and v and need - 1 <= left:
                        s2 = state[:j] + (cnt - 1,) + state[j + 1:]
                        add_into(new.setdefault(s2, {}), mul_terms(acc, v, ctx))
            states = {s: a for s, a in new.items() if a}
            if not states:
                return {}
        res = states.get(done, {})
        return {k: c * mult for k, c in res.items()}

    return DiffOp.from_action(ctx, act)


@lru_cache(maxsize=4096)
def _bplus_recursive(deltas: tuple) -> DiffOp:
    d1 = deltas[0]
    if len(deltas) == 1:
        return DiffOp.from_derivation(d1)
    rest = deltas[1:]
    out = DiffOp.from_derivation(d1) * _bplus_recursive(rest)
    for i in range(len(rest)):
        modified = rest[:i] + (triangle(d1, rest[i]),) + rest[i + 1:]
        out = out - _bplus_recursive(modified)
    return out


def bplus(deltas: Sequence[Derivation], route: str = "auxiliary") -> DiffOp:
    """The symmetric multi-derivation operator ``B+(δ_1, ..., δ_m)``.

    ``route="auxiliary"`` sums, over every way of assigning the δ's to distinct
    occurrences of variables in a monomial, the monomial with those occurrences
    replaced by the assigned coefficients.  ``route="recursive"`` uses
    ``B+(δ_1..δ_m) = δ_1 B+(δ_2..δ_m) - Σ_i B+(δ_2, .., δ_1 ▷ δ_i, .., δ_m)``.
    """
    deltas = tuple(deltas)
    if not deltas:
        raise ValueError("B+ needs at least one derivation")
    ctx = deltas[0].ctx
    for d in deltas:
        if d.ctx != ctx:
            raise ContextMismatch(f"{d.ctx} vs {ctx}")
    if len(deltas) == 1:
        return DiffOp.from_derivation(deltas[0])
    if route == "auxiliary":
        return _bplus_auxiliary(deltas)
    if route == "recursive":
        return _bplus_recursive(deltas)
    raise ValueError(f"unknown route {route!r}")


def taylor_operator(v: SeriesVector, sign: int = 1) -> DiffOp:
    """``Σ_k sign^k / k! · B+([v ∂/∂z]^k)``, i.e. the operator u ↦ u(z + sign·v).

    Evaluated in one pass over each monomial, tracking how many occurrences
    have been replaced; the k! from the symmetric sum cancels the 1/k!.
    ``v`` must have positive t-order so that the sum is finite.
    """
    ctx = v.ctx
    if any(c and c.t_order() < 1 for c in v):
        raise ValueError("Taylor operator needs coefficients of positive t-order")
    Derivation(v)  # validates z-order
    coeffs = [(c * sign).raw for c in v]
    # the basis is closed under prefixes, so each image extends its prefix's by one factor
    images: dict = {(): {(0, ()): mpq(1)}}

    def act(w):
        w = tuple(w)
        if w not in images:
            acc = act(w[:-1])
            letter = w[-1]
            nxt = shift_terms(acc, 0, (), (letter,), ctx)
            if coeffs[letter]:
                add_into(nxt, mul_terms(acc, coeffs[letter], ctx))
            images[w] = nxt
        return images[w]

    return DiffOp.from_action(ctx, act)


def exp_tdiffop(D: DiffOp) -> DiffOp:
    """``Σ_k D^k / k!`` for an operator series with zero t^0 coefficient."""
    if D.t_order() < 1:
        raise ValueError("exp needs an operator series with zero t^0 coefficient")
    term = DiffOp.identity(D.ctx)
    out = term
    for k in range(1, D.ctx.nt + 1):
        term = (term * D) * mpq(1, k)
        if term.is_zero():
            break
        out = out + term
    return out


def log_tdiffop(G: DiffOp) -> DiffOp:
    """Inverse of :func:`exp_tdiffop`; G must have identity t^0 coefficient."""
    X = G - DiffOp.identity(G.ctx)
    if X.t_order() < 1:
        raise ValueError("log needs an operator series whose t^0 coefficient is the identity")
    out = DiffOp.zero(G.ctx)
    power = DiffOp.identity(G.ctx)
    for k in range(1, G.ctx.nt + 1):
        power = power * X
        if power.is_zero():
            break
        out = out + power * mpq((-1) ** (k + 1), k)
    return out


def inverse_tdiffop(G: DiffOp) -> DiffOp:
    """Two-sided inverse in D[[t]] of a series with identity t^0 coefficient."""
    X = G - DiffOp.identity(G.ctx)
    if X.t_order() < 1:
        raise ValueError("inverse needs an operator series whose t^0 coefficient is the identity")
    out = DiffOp.identity(G.ctx)
    power = out
    for _ in range(G.ctx.nt):
        power = power * (-X)
        if power.is_zero():
            break
        out = out + power
    return out
