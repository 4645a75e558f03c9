"""Exact truncated power series in n (non)commutative variables and a central parameter t.

A series lives in a :class:`RingContext` that fixes the number of variables,
whether they commute, and the truncation bounds ``nz`` (total z-degree) and
``nt`` (power of t).  Every operation truncates eagerly, so two series are equal
exactly when all coefficients inside the bounds agree.

Monomials are tuples of variable indices in ``range(n)``.  In commutative mode
the tuple is kept sorted, which makes ``(0, 0, 1)`` the monomial ``z1^2 z2``;
in noncommutative mode the tuple is the word itself.  Storage is a sparse dict
keyed by ``(t_power, monomial)`` with ``gmpy2.mpq`` coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

Rational = type(mpq())
Monomial = tuple  # tuple[int, ...]
Key = tuple  # (t_power, Monomial)


class ContextMismatch(ValueError):
    """Raised when two objects built over different ring contexts are combined."""


def as_rational(x) -> mpq:
    """Coerce ints, strings like ``"-3/4"``, Fractions and mpq values to mpq."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, (int, str)):
        return mpq(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Rational, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True)
class RingContext:
    """Parameters shared by every series of one truncated ring.

    ``nz`` bounds the z-degree and ``nt`` the t-power of stored terms.
    """

    n: int
    commutative: bool = False
    nz: int = 6
    nt: int = 4

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one variable")
        if self.nz < 1:
            raise ValueError("nz must be >= 1")
        if self.nt < 0:
            raise ValueError("nt must be >= 0")

    def with_nt(self, nt: int) -> "RingContext":
        return RingContext(self.n, self.commutative, self.nz, nt)

    def with_nz(self, nz: int) -> "RingContext":
        return RingContext(self.n, self.commutative, nz, self.nt)

    def same_z_ring(self, other: "RingContext") -> bool:
        return (self.n, self.commutative, self.nz) == (other.n, other.commutative, other.nz)

    def canonical(self, word: Iterable[int]) -> Monomial:
        word = tuple(word)
        for i in word:
            if not 0 <= i < self.n:
                raise ValueError(f"variable index {i} out of range for n={self.n}")
        return tuple(sorted(word)) if self.commutative else word

    def basis(self) -> tuple:
        """All monomials of degree <= nz, ordered by (degree, word)."""
        return _basis(self.n, self.commutative, self.nz)

    def basis_of_degree(self, d: int) -> tuple:
        return _basis_of_degree(self.n, self.commutative, d)

    # constructors -------------------------------------------------------
    def zero(self) -> "TruncSeries":
        return TruncSeries._raw(self, {})

    def one(self) -> "TruncSeries":
        return TruncSeries._raw(self, {(0, ()): mpq(1)})

    def scalar(self, c) -> "TruncSeries":
        c = as_rational(c)
        return TruncSeries._raw(self, {(0, ()): c} if c else {})

    def var(self, i: int) -> "TruncSeries":
        """The variable z_{i+1} (indices are 0-based)."""
        return self.monomial((i,))

    def t(self, power: int = 1) -> "TruncSeries":
        return self.monomial((), t=power)

    def monomial(self, word: Iterable[int], t: int = 0, coeff=1) -> "TruncSeries":
        return TruncSeries(self, {(t, tuple(word)): coeff})

    def variables(self) -> "SeriesVector":
        """The identity map z = (z_1, ..., z_n) as a vector."""
        return SeriesVector([self.var(i) for i in range(self.n)])


@lru_cache(maxsize=None)
def _basis_of_degree(n: int, commutative: bool, d: int) -> tuple:
    if commutative:
        from itertools import combinations_with_replacement

        return tuple(combinations_with_replacement(range(n), d))
    return tuple(product(range(n), repeat=d))


@lru_cache(maxsize=None)
def _basis(n: int, commutative: bool, nz: int) -> tuple:
    out = []
    for d in range(nz + 1):
        out.extend(_basis_of_degree(n, commutative, d))
    return tuple(out)


def _sort_key(key: Key):
    t, w = key
    return (t, len(w), w)


# raw term-dict kernels; shared with the operator code -----------------------

def add_into(acc: dict, terms: Mapping, scale=1) -> None:
    """acc += scale * terms, dropping cancelled entries."""
    for k, c in terms.items():
        v = acc.get(k)
        v = c * scale if v is None else v + c * scale
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


def mul_terms(a: Mapping, b: Mapping, ctx: RingContext) -> dict:
    """Truncated product of two raw term dicts."""
    nz, nt, comm = ctx.nz, ctx.nt, ctx.commutative
    out: dict = {}
    if not a or not b:
        return out
    bl = [(tb, wb, len(wb), cb) for (tb, wb), cb in b.items()]
    for (ta, wa), ca in a.items():
        la = len(wa)
        tcap, zcap = nt - ta, nz - la
        if tcap < 0 or zcap < 0:
            continue
        for tb, wb, lb, cb in bl:
            if tb > tcap or lb > zcap:
                continue
            w = wa + wb
            if comm and la and lb:
                w = tuple(sorted(w))
            key = (ta + tb, w)
            v = out.get(key)
            out[key] = ca * cb if v is None else v + ca * cb
    return {k: v for k, v in out.items() if v}


def shift_terms(terms: Mapping, t: int, left: Monomial, right: Monomial, ctx: RingContext, scale=1) -> dict:
    """t^t * left * terms * right, truncated (left/right are monomials)."""
    out = {}
    extra = len(left) + len(right)
    zcap, tcap = ctx.nz - extra, ctx.nt - t
    comm = ctx.commutative
    for (tv, wv), cv in terms.items():
        if tv > tcap or len(wv) > zcap:
            continue
        w = left + wv + right
        if comm:
            w = tuple(sorted(w))
        out[(t + tv, w)] = cv * scale
    return out


class TruncSeries:
    """Immutable truncated series; see the module docstring for conventions."""

    __slots__ = ("ctx", "_terms")

    def __init__(self, ctx: RingContext, terms: Mapping | None = None):
        clean: dict = {}
        for key, c in (terms or {}).items():
            t, word = key
            word = ctx.canonical(word)
            if t < 0:
                raise ValueError("negative t power")
            if t > ctx.nt or len(word) > ctx.nz:
                continue
            c = as_rational(c)
            k = (t, word)
            v = clean.get(k, mpq(0)) + c
            if v:
                clean[k] = v
            else:
                clean.pop(k, None)
        self.ctx = ctx
        self._terms = clean

    @classmethod
    def _raw(cls, ctx: RingContext, terms: dict) -> "TruncSeries":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj._terms = terms
        return obj

    # inspection ---------------------------------------------------------
    @property
    def raw(self) -> Mapping:
        """Read-only view of the term dict (callers must not mutate it)."""
        return self._terms

    def terms(self) -> list:
        """Terms as ``(t, monomial, coeff)`` in canonical order."""
        return [(t, w, self._terms[(t, w)]) for t, w in sorted(self._terms, key=_sort_key)]

    def coefficient(self, word: Iterable[int], t: int = 0) -> mpq:
        return self._terms.get((t, self.ctx.canonical(word)), mpq(0))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def orders(self) -> tuple:
        """(minimal z-degree, minimal t-power); (inf, inf) for the zero series."""
        if not self._terms:
            return (math.inf, math.inf)
        return (min(len(w) for _, w in self._terms), min(t for t, _ in self._terms))

    def z_order(self):
        return self.orders()[0]

    def t_order(self):
        return self.orders()[1]

    def t_degree(self) -> int:
        return max((t for t, _ in self._terms), default=-1)

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "TruncSeries") -> None:
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def _coerce(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        if _is_scalar(other):
            return self.ctx.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        add_into(out, other._terms)
        return TruncSeries._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(self.ctx, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        add_into(out, other._terms, -1)
        return TruncSeries._raw(self.ctx, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c = as_rational(other)
            if not c:
                return self.ctx.zero()
            return TruncSeries._raw(self.ctx, {k: v * c for k, v in self._terms.items()})
        if isinstance(other, TruncSeries):
            self._check(other)
            return TruncSeries._raw(self.ctx, mul_terms(self._terms, other._terms, self.ctx))
        return NotImplemented

    def __rmul__(self, other):
        if _is_scalar(other):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = self.ctx.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return self.ctx == other.ctx and self._terms == other._terms
        if _is_scalar(other):
            return self._terms == self.ctx.scalar(other)._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, frozenset(self._terms.items())))

    # calculus and structure ---------------------------------------------
    def t_derivative(self) -> "TruncSeries":
        """Termwise d/dt.  The result lives in the context with bound nt - 1,
        since the top t-slice of a derivative is not determined."""
        ctx = self.ctx.with_nt(max(self.ctx.nt - 1, 0))
        out = {}
        for (t, w), c in self._terms.items():
            if t and t - 1 <= ctx.nt:
                out[(t - 1, w)] = c * t
        return TruncSeries._raw(ctx, out)

    def t_coefficient(self, k: int) -> "TruncSeries":
        """The t-free series multiplying t^k."""
        return TruncSeries._raw(self.ctx, {(0, w): c for (t, w), c in self._terms.items() if t == k})

    def times_t(self, k: int = 1) -> "TruncSeries":
        nt = self.ctx.nt
        return TruncSeries._raw(self.ctx, {(t + k, w): c for (t, w), c in self._terms.items() if t + k <= nt})

    def homogeneous_part(self, d: int) -> "TruncSeries":
        return TruncSeries._raw(self.ctx, {k: c for k, c in self._terms.items() if len(k[1]) == d})

    def z_degrees(self) -> set:
        return {len(w) for _, w in self._terms}

    def t_negated(self) -> "TruncSeries":
        """u(-t)."""
        return TruncSeries._raw(self.ctx, {(t, w): (-c if t % 2 else c) for (t, w), c in self._terms.items()})

    def with_t_bound(self, nt: int) -> "TruncSeries":
        """Same series viewed with a different t truncation (terms above nt are dropped)."""
        ctx = self.ctx.with_nt(nt)
        return TruncSeries._raw(ctx, {k: c for k, c in self._terms.items() if k[0] <= nt})

    def abelianized(self) -> "TruncSeries":
        """Image in the commutative ring with the same bounds."""
        ctx = RingContext(self.ctx.n, True, self.ctx.nz, self.ctx.nt)
        return TruncSeries(ctx, self._terms)

    def subs(self, F: "SeriesVector") -> "TruncSeries":
        return substitute(self, F)

    # serialization --------------------------------------------------------
    def to_json(self) -> list:
        out = []
        for t, w, c in self.terms():
            item = {"t": t}
            if self.ctx.commutative:
                exps = [0] * self.ctx.n
                for i in w:
                    exps[i] += 1
                item["exps"] = exps
            else:
                item["word"] = list(w)
            item["coeff"] = str(c)
            out.append(item)
        return out

    @classmethod
    def from_json(cls, ctx: RingContext, data: Sequence[Mapping]) -> "TruncSeries":
        terms: dict = {}
        for item in data:
            if "exps" in item:
                exps = item["exps"]
                if len(exps) != ctx.n or any((not isinstance(e, int)) or e < 0 for e in exps):
                    raise ValueError(f"bad exponent vector {exps!r}")
                word = tuple(i for i, e in enumerate(exps) for _ in range(e))
                if not ctx.commutative:
                    raise ValueError("'exps' terms need a commutative context")
            elif "word" in item:
                word = tuple(item["word"])
                if ctx.commutative:
                    word = tuple(sorted(word))
            else:
                raise ValueError(f"term without 'word' or 'exps': {item!r}")
            t = item.get("t", 0)
            if not isinstance(t, int) or t < 0:
                raise ValueError(f"bad t power {t!r}")
            if t > ctx.nt or len(word) > ctx.nz:
                raise ValueError(f"term {item!r} exceeds truncation (N_z={ctx.nz}, N_t={ctx.nt})")
            key = (t, word)
            terms[key] = terms.get(key, 0) + as_rational(str(item["coeff"]))
        return cls(ctx, terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for t, w, c in self.terms():
            body = []
            if t:
                body.append("t" if t == 1 else f"t^{t}")
            zs = _render_word(w)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if a == 1:
                coef = "" if (t or zs) else "1"
            elif a.denominator == 1:
                coef = str(a)
            else:
                coef = f"({a})"
            head = coef + "".join(body)
            text = head + ("*" if head and zs else "") + zs
            parts.append((sign, text))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self) -> str:
        return f"TruncSeries({self})"


def _render_word(w: Monomial) -> str:
    pieces = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        run = j - i
        pieces.append(f"z{w[i] + 1}" + (f"^{run}" if run > 1 else ""))
        i = j
    return "*".join(pieces)


class SeriesVector:
    """n series over one context, e.g. the components of H_t(z)."""

    __slots__ = ("ctx", "components")

    def __init__(self, components: Sequence[TruncSeries], ctx: RingContext | None = None):
        comps = tuple(components)
        if ctx is None:
            if not comps:
                raise ValueError("empty vector needs an explicit context")
            ctx = comps[0].ctx
        for c in comps:
            if c.ctx != ctx:
                raise ContextMismatch(f"{c.ctx} vs {ctx}")
        if len(comps) != ctx.n:
            raise ValueError(f"expected {ctx.n} components, got {len(comps)}")
        self.ctx = ctx
        self.components = comps

    @classmethod
    def zeros(cls, ctx: RingContext) -> "SeriesVector":
        return cls([ctx.zero()] * ctx.n, ctx)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self) -> Iterator[TruncSeries]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def _check(self, other):
        if not isinstance(other, SeriesVector):
            return NotImplemented
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SeriesVector([a + b for a, b in zip(self, other)], self.ctx)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SeriesVector([a - b for a, b in zip(self, other)], self.ctx)

    def __neg__(self):
        return SeriesVector([-a for a in self], self.ctx)

    def __mul__(self, c):
        if not _is_scalar(c):
            return NotImplemented
        return SeriesVector([a * c for a in self], self.ctx)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SeriesVector):
            return NotImplemented
        return self.ctx == other.ctx and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self)

    def orders(self) -> tuple:
        zs, ts = zip(*(c.orders() for c in self))
        return (min(zs), min(ts))

    def map(self, fn) -> "SeriesVector":
        out = [fn(c) for c in self]
        return SeriesVector(out, out[0].ctx if out else self.ctx)

    def subs(self, F: "SeriesVector") -> "SeriesVector":
        return self.map(lambda c: substitute(c, F))

    def t_derivative(self) -> "SeriesVector":
        return self.map(TruncSeries.t_derivative)

    def t_coefficient(self, k: int) -> "SeriesVector":
        return self.map(lambda c: c.t_coefficient(k))

    def with_t_bound(self, nt: int) -> "SeriesVector":
        return self.map(lambda c: c.with_t_bound(nt))

    def to_json(self) -> list:
        return [c.to_json() for c in self]

    @classmethod
    def from_json(cls, ctx: RingContext, data: Sequence) -> "SeriesVector":
        if len(data) != ctx.n:
            raise ValueError(f"expected {ctx.n} component term lists, got {len(data)}")
        return cls([TruncSeries.from_json(ctx, comp) for comp in data], ctx)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self) + ")"

    def __repr__(self) -> str:
        return f"SeriesVector{self}"


def substitute(u: TruncSeries, F: SeriesVector) -> TruncSeries:
    """u(F_1, ..., F_n): every occurrence of z_i replaced in place by F_i.

    Each F_i must have no z-free terms (not even t^k), otherwise the
    composition does not converge at finite z-truncation.
    """
    ctx = u.ctx
    if F.ctx != ctx:
        raise ContextMismatch(f"{ctx} vs {F.ctx}")
    for i, comp in enumerate(F):
        if any(not w for _, w in comp.raw):
            raise ValueError(f"component {i + 1} has a nonzero constant term in z")
    comps = [comp.raw for comp in F]
    cache: dict = {(): {(0, ()): mpq(1)}}

    def image(w):
        got = cache.get(w)
        if got is None:
            got = mul_terms(image(w[:-1]), comps[w[-1]], ctx)
            cache[w] = got
        return got

    out: dict = {}
    for (t, w), c in u.raw.items():
        img = image(w)
        if t:
            img = shift_terms(img, t, (), (), ctx)
        add_into(out, img, c)
    return TruncSeries._raw(ctx, out)
