"""The free algebra NSym = Q<Λ_1, Λ_2, ...> of noncommutative symmetric functions.

Elements are stored in the Λ-word basis, truncated at a maximal weight (the
weight of Λ_{m1}...Λ_{mk} is m1 + ... + mk).  The families S, Φ, Ψ, Ξ are
solved from λ(t) = Σ t^m Λ_m by

    λ(-t) σ(t) = 1,   e^{Φ(t)} = σ(t),   σ'(t) = σ(t) ψ(t),   σ'(t) = ξ(t) σ(t),

with Φ(t) = Σ t^m Φ_m / m, ψ(t) = Σ t^{m-1} Ψ_m and ξ(t) = Σ t^{m-1} Ξ_m.
The Hopf structure is computed through the Ψ basis, where every Ψ_m is
primitive.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from gmpy2 import mpq

from .series import _is_scalar, add_into, as_rational

MINUS = "−"


def weight(word: Sequence[int]) -> int:
    return sum(word)


class NSymElem:
    """A weight-truncated element of NSym, as a sparse map Λ-word -> coefficient."""

    __slots__ = ("max_weight", "_terms")

    def __init__(self, max_weight: int, terms: Mapping | None = None):
        if max_weight < 0:
            raise ValueError("max_weight must be >= 0")
        clean: dict = {}
        for word, c in (terms or {}).items():
            word = tuple(int(m) for m in word)
            if any(m < 1 for m in word):
                raise ValueError(f"Λ indices must be >= 1, got {word}")
            if weight(word) > max_weight:
                continue
            add_into(clean, {word: as_rational(c)})
        self.max_weight = max_weight
        self._terms = clean

    @classmethod
    def _raw(cls, max_weight: int, terms: dict) -> "NSymElem":
        obj = cls.__new__(cls)
        obj.max_weight = max_weight
        obj._terms = terms
        return obj

    @classmethod
    def one(cls, max_weight: int) -> "NSymElem":
        return cls._raw(max_weight, {(): mpq(1)})

    @classmethod
    def zero(cls, max_weight: int) -> "NSymElem":
        return cls._raw(max_weight, {})

    @classmethod
    def Lambda(cls, m: int, max_weight: int) -> "NSymElem":
        if m == 0:
            return cls.one(max_weight)
        return cls(max_weight, {(m,): 1})

    @classmethod
    def word(cls, word: Sequence[int], max_weight: int, coeff=1) -> "NSymElem":
        return cls(max_weight, {tuple(word): coeff})

    @property
    def raw(self) -> Mapping:
        return self._terms

    def terms(self) -> list:
        """``(word, coeff)`` pairs sorted by (weight, word)."""
        return sorted(self._terms.items(), key=lambda kv: (weight(kv[0]), kv[0]))

    def coefficient(self, word: Sequence[int]) -> mpq:
        return self._terms.get(tuple(word), mpq(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def weight(self) -> int:
        """Largest weight of a word present (-1 for zero)."""
        return max((weight(w) for w in self._terms), default=-1)

    def weights(self) -> set:
        return {weight(w) for w in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.weights()) <= 1

    def homogeneous_part(self, m: int) -> "NSymElem":
        return NSymElem._raw(self.max_weight, {w: c for w, c in self._terms.items() if weight(w) == m})

    def with_max_weight(self, max_weight: int) -> "NSymElem":
        return NSymElem._raw(max_weight, {w: c for w, c in self._terms.items() if weight(w) <= max_weight})

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, NSymElem):
            if other.max_weight != self.max_weight:
                raise ValueError(f"weight truncation mismatch: {self.max_weight} vs {other.max_weight}")
            return other
        if _is_scalar(other):
            c = as_rational(other)
            return NSymElem._raw(self.max_weight, {(): c} if c else {})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        add_into(out, other._terms)
        return NSymElem._raw(self.max_weight, out)

    __radd__ = __add__

    def __neg__(self):
        return NSymElem._raw(self.max_weight, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        add_into(out, other._terms, -1)
        return NSymElem._raw(self.max_weight, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c = as_rational(other)
            return NSymElem._raw(self.max_weight, {w: v * c for w, v in self._terms.items()} if c else {})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        N = self.max_weight
        out: dict = {}
        for wa, ca in self._terms.items():
            wa_w = weight(wa)
            for wb, cb in other._terms.items():
                if wa_w + weight(wb) > N:
                    continue
                add_into(out, {wa + wb: ca * cb})
        return NSymElem._raw(N, out)

    def __rmul__(self, other):
        if _is_scalar(other):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        out = NSymElem.one(self.max_weight)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, NSymElem):
            return self._terms == other._terms
        if _is_scalar(other):
            c = as_rational(other)
            return self._terms == ({(): c} if c else {})
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # display / serialization -------------------------------------------------
    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"NSymElem({self})"

    def to_json(self) -> list:
        return [{"word": list(w), "coeff": str(c)} for w, c in self.terms()]

    @classmethod
    def from_json(cls, data, max_weight: int | None = None) -> "NSymElem":
        items = data["terms"] if isinstance(data, dict) else data
        if not isinstance(items, list):
            raise ValueError("expected a list of {word, coeff} terms")
        terms: dict = {}
        for item in items:
            if "word" not in item or "coeff" not in item:
                raise ValueError(f"bad NSym term {item!r}")
            word = tuple(item["word"])
            if any((not isinstance(m, int)) or m < 1 for m in word):
                raise ValueError(f"bad Λ word {item['word']!r}")
            add_into(terms, {word: as_rational(str(item["coeff"]))})
        if max_weight is None:
            max_weight = max((weight(w) for w in terms), default=0)
        return cls(max_weight, terms)


def render(P: NSymElem, letter: str = "Λ", sep: str = "·") -> str:
    """Text rendering such as ``Λ1·Λ1 − Λ2``."""
    if P.is_zero():
        return "0"
    out = ""
    for i, (w, c) in enumerate(P.terms()):
        mono = sep.join(f"{letter}{m}" for m in w) or "1"
        a = abs(c)
        coef = "" if (a == 1 and w) else (f"{a}" if a.denominator == 1 else f"({a})")
        text = coef + ("·" if coef and w else "") + (mono if w else ("" if coef else "1"))
        if i == 0:
            out = (MINUS if c < 0 else "") + text
        else:
            out += f" {MINUS if c < 0 else '+'} {text}"
    return out


# generating functions ---------------------------------------------------------

class NSymGenFn:
    """A t-series with NSym coefficients; ``coefficients[k]`` multiplies t^k."""

    __slots__ = ("max_weight", "coefficients")

    def __init__(self, max_weight: int, coefficients: Mapping[int, NSymElem]):
        self.max_weight = max_weight
        self.coefficients = {k: v for k, v in coefficients.items() if not v.is_zero()}

    def __getitem__(self, k: int) -> NSymElem:
        return self.coefficients.get(k, NSymElem.zero(self.max_weight))

    def __eq__(self, other):
        if not isinstance(other, NSymGenFn):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __repr__(self) -> str:
        return "NSymGenFn(" + ", ".join(f"t^{k}: {v}" for k, v in sorted(self.coefficients.items())) + ")"


def _gf_mul(a: list, b: list, N: int) -> list:
    out = [NSymElem.zero(N) for _ in range(N + 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b[: N + 1 - i]):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return out


def _gf_exp(x: list, N: int) -> list:
    out = [NSymElem.one(N)] + [NSymElem.zero(N)] * N
    term = list(out)
    for k in range(1, N + 1):
        term = [c * mpq(1, k) for c in _gf_mul(term, x, N)]
        out = [a + b for a, b in zip(out, term)]
    return out


def _gf_log(x: list, N: int) -> list:
    y = [NSymElem.zero(N)] + list(x[1:])
    out = [NSymElem.zero(N)] * (N + 1)
    power = [NSymElem.one(N)] + [NSymElem.zero(N)] * N
    for k in range(1, N + 1):
        power = _gf_mul(power, y, N)
        out = [a + p * mpq((-1) ** (k + 1), k) for a, p in zip(out, power)]
    return out


def _gf_derivative(x: list, N: int) -> list:
    return [x[k + 1] * (k + 1) for k in range(N)] + [NSymElem.zero(N)]


@dataclass(frozen=True)
class PiSystem:
    """The five generating functions (λ, σ, Φ, ψ, ξ) solved to weight ``max_weight``."""

    max_weight: int
    lam: NSymGenFn
    sigma: NSymGenFn
    Phi_gf: NSymGenFn
    psi: NSymGenFn
    xi: NSymGenFn

    def Lambda(self, m: int) -> NSymElem:
        return self.lam[m]

    def S(self, m: int) -> NSymElem:
        return self.sigma[m]

    def Phi(self, m: int) -> NSymElem:
        """Φ_m, i.e. m times the t^m coefficient of Φ(t)."""
        return self.Phi_gf[m] * m

    def Psi(self, m: int) -> NSymElem:
        return self.psi[m - 1]

    def Xi(self, m: int) -> NSymElem:
        return self.xi[m - 1]

    def family(self, name: str, m: int) -> NSymElem:
        return {"Lambda": self.Lambda, "S": self.S, "Phi": self.Phi, "Psi": self.Psi, "Xi": self.Xi}[name](m)


FAMILIES = ("Lambda", "S", "Phi", "Psi", "Xi")


@lru_cache(maxsize=None)
def solve_pi(max_weight: int) -> PiSystem:
    """Solve the four remaining generating functions from λ(t), exactly to weight N."""
    N = max_weight
    if N < 0:
        raise ValueError("max_weight must be >= 0")
    lam = [NSymElem.Lambda(m, N) for m in range(N + 1)]
    # λ(-t) σ(t) = 1  ⇒  S_m = Σ_{i=1..m} (-1)^{i+1} Λ_i S_{m-i}
    S = [NSymElem.one(N)]
    for m in range(1, N + 1):
        acc = NSymElem.zero(N)
        for i in range(1, m + 1):
            acc = acc + lam[i] * S[m - i] * (-1) ** (i + 1)
        S.append(acc)
    Phi = _gf_log(S, N)
    # σ' = σ ψ  ⇒  m S_m = Σ_{i=0..m-1} S_i Ψ_{m-i}
    Psi = [None]
    Xi = [None]
    for m in range(1, N + 1):
        p = S[m] * m
        x = S[m] * m
        for i in range(1, m):
            p = p - S[i] * Psi[m - i]
            x = x - Xi[m - i] * S[i]
        Psi.append(p)
        Xi.append(x)
    gf = lambda seq, shift=0: NSymGenFn(N, {k - shift: v for k, v in enumerate(seq) if v is not None})
    return PiSystem(
        N,
        gf(lam),
        gf(S),
        gf(Phi),
        gf(Psi, 1),
        gf(Xi, 1),
    )


def verify_pi(pi: PiSystem) -> list:
    """Re-substitute the solved families into the defining equations.

    Returns ``(check, passed)`` pairs for each equation.
    """
    N = pi.max_weight
    seq = lambda g: [g[k] for k in range(N + 1)]
    lam, sigma, Phi = seq(pi.lam), seq(pi.sigma), seq(pi.Phi_gf)
    psi, xi = seq(pi.psi), seq(pi.xi)
    lam_neg = [c * (-1) ** k for k, c in enumerate(lam)]
    one = [NSymElem.one(N)] + [NSymElem.zero(N)] * N
    # the top weight of a t-derivative identity involves σ_{N+1}, so compare below it
    dsig = _gf_derivative(sigma, N)[:N]
    return [
        ("f(0)=1", lam[0] == NSymElem.one(N)),
        ("f(-t)g(t)=1", _gf_mul(lam_neg, sigma, N) == one),
        ("g(t)f(-t)=1", _gf_mul(sigma, lam_neg, N) == one),
        ("exp(d)=g", _gf_exp(Phi, N) == sigma),
        ("dg/dt=g h", _gf_mul(sigma, psi, N)[:N] == dsig),
        ("dg/dt=m g", _gf_mul(xi, sigma, N)[:N] == dsig),
    ]


def omega_lambda(P: NSymElem) -> NSymElem:
    """The anti-involution fixing every Λ_m: reverse each word."""
    return NSymElem._raw(P.max_weight, {w[::-1]: c for w, c in P.raw.items()})


# Ψ basis ------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _lambda_in_psi(m: int) -> dict:
    """Λ_m written as a polynomial in the Ψ's, as a map Ψ-word -> coeff."""
    psi_m = solve_pi(m).Psi(m)
    lead = psi_m.coefficient((m,))
    if not lead:
        raise ArithmeticError(f"Ψ_{m} has no linear Λ_{m} term")
    # Λ_m = (Ψ_m - rest) / lead, where rest only involves Λ_1..Λ_{m-1}
    out = {(m,): 1 / lead}
    for w, c in psi_m.raw.items():
        if w == (m,):
            continue
        add_into(out, _word_in_psi(w), -c / lead)
    return out


def _word_in_psi(w: tuple) -> dict:
    acc = {(): mpq(1)}
    for m in w:
        nxt: dict = {}
        for pw, c in acc.items():
            for qw, d in _lambda_in_psi(m).items():
                add_into(nxt, {pw + qw: c * d})
        acc = nxt
    return acc


def to_psi_basis(P: NSymElem) -> dict:
    """Rewrite P as a polynomial in Ψ_1, Ψ_2, ...: map Ψ-word -> coefficient."""
    out: dict = {}
    for w, c in P.raw.items():
        add_into(out, _word_in_psi(w), c)
    return out


@lru_cache(maxsize=None)
def _psi_word_in_lambda(w: tuple, N: int) -> NSymElem:
    pi = solve_pi(N)
    out = NSymElem.one(N)
    for m in w:
        out = out * pi.Psi(m)
    return out


def from_psi_basis(coeffs: Mapping, max_weight: int) -> NSymElem:
    """Inverse of :func:`to_psi_basis`."""
    out = NSymElem.zero(max_weight)
    for w, c in coeffs.items():
        if weight(w) <= max_weight:
            out = out + _psi_word_in_lambda(tuple(w), max_weight) * as_rational(c)
    return out


# Hopf structure ----------------------------------------------------------------

class TensorElem:
    """An element of NSym^{⊗k} in the Λ-word basis: map (word_1, ..., word_k) -> coeff."""

    __slots__ = ("max_weight", "_terms")

    def __init__(self, max_weight: int, terms: Mapping | None = None):
        self.max_weight = max_weight
        clean: dict = {}
        for key, c in (terms or {}).items():
            add_into(clean, {tuple(tuple(w) for w in key): as_rational(c)})
        self._terms = clean

    @property
    def raw(self) -> Mapping:
        return self._terms

    @classmethod
    def pure(cls, *factors: NSymElem) -> "TensorElem":
        """``P_1 ⊗ P_2 ⊗ ...``."""
        N = factors[0].max_weight
        acc = {(): mpq(1)}
        for f in factors:
            nxt: dict = {}
            for key, c in acc.items():
                for w, d in f.raw.items():
                    add_into(nxt, {key + (w,): c * d})
            acc = nxt
        return cls(N, acc)

    def __add__(self, other):
        out = dict(self._terms)
        add_into(out, other._terms)
        return TensorElem(self.max_weight, out)

    def __sub__(self, other):
        out = dict(self._terms)
        add_into(out, other._terms, -1)
        return TensorElem(self.max_weight, out)

    def __eq__(self, other):
        if not isinstance(other, TensorElem):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def map_factor(self, position: int, fn) -> "TensorElem":
        """Apply a linear map ``NSymElem -> TensorElem | NSymElem`` to one tensor factor."""
        out: dict = {}
        for key, c in self._terms.items():
            img = fn(NSymElem.word(key[position], self.max_weight))
            if isinstance(img, NSymElem):
                parts = {(w,): d for w, d in img.raw.items()}
            else:
                parts = img.raw
            for sub, d in parts.items():
                add_into(out, {key[:position] + sub + key[position + 1:]: c * d})
        return TensorElem(self.max_weight, out)

    def multiply(self) -> NSymElem:
        """Concatenate the factors (the algebra product of the tensor)."""
        out: dict = {}
        for key, c in self._terms.items():
            add_into(out, {tuple(m for w in key for m in w): c})
        return NSymElem(self.max_weight, out)

    def __repr__(self) -> str:
        parts = []
        for key, c in sorted(self._terms.items()):
            parts.append(f"{c}*" + "⊗".join("·".join(f"Λ{m}" for m in w) or "1" for w in key))
        return "TensorElem(" + (" + ".join(parts) or "0") + ")"


def _psi_coproduct_word(w: tuple) -> dict:
    """Δ of a product of primitives: sum over splittings into complementary subwords."""
    out: dict = {}
    L = len(w)
    for mask in range(1 << L):
        left = tuple(w[i] for i in range(L) if mask >> i & 1)
        right = tuple(w[i] for i in range(L) if not mask >> i & 1)
        add_into(out, {(left, right): mpq(1)})
    return out


def coproduct(P: NSymElem) -> TensorElem:
    """Δ(P), determined by Δ(Ψ_m) = 1 ⊗ Ψ_m + Ψ_m ⊗ 1."""
    N = P.max_weight
    out: dict = {}
    for pw, c in to_psi_basis(P).items():
        for (l, r), d in _psi_coproduct_word(pw).items():
            L = _psi_word_in_lambda(l, N)
            R = _psi_word_in_lambda(r, N)
            for wl, cl in L.raw.items():
                for wr, cr in R.raw.items():
                    add_into(out, {(wl, wr): c * d * cl * cr})
    return TensorElem(N, out)


def counit(P: NSymElem) -> mpq:
    """ε(P): every Λ_m with m >= 1 has no constant part in the Ψ's, so ε reads off the empty word."""
    return P.coefficient(())


def antipode(P: NSymElem) -> NSymElem:
    """S(P), the anti-homomorphism with S(Ψ_m) = -Ψ_m."""
    out: dict = {}
    for pw, c in to_psi_basis(P).items():
        add_into(out, {pw[::-1]: c * (-1) ** len(pw)})
    return from_psi_basis(out, P.max_weight)


def is_primitive(P: NSymElem) -> bool:
    one = NSymElem.one(P.max_weight)
    return coproduct(P) == TensorElem.pure(one, P) + TensorElem.pure(P, one)


# abelianization -------------------------------------------------------------------

def abelianize(P: NSymElem) -> dict:
    """Image under Λ_m ↦ e_m in the commutative ring Q[e_1, e_2, ...].

    Monomials are sorted tuples of e-indices, e.g. ``(1, 1)`` is e_1^2.
    """
    out: dict = {}
    for w, c in P.raw.items():
        add_into(out, {tuple(sorted(w)): c})
    return out


def render_e(poly: Mapping) -> str:
    if not poly:
        return "0"
    parts = []
    for mono, c in sorted(poly.items(), key=lambda kv: (len(kv[0]), kv[0])):
        body = "*".join(f"e{m}" for m in mono) or "1"
        parts.append(f"{c}*{body}")
    return " + ".join(parts)
