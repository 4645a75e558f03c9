import json
from math import comb, factorial

import pytest
from gmpy2 import mpq

from helpers import random_derivation, random_series, rng
from ncsdiff.autgroup import (
    PROFILES,
    Automorphism,
    DLog,
    compose,
    dlog,
    exp_derivation,
    invert,
    is_graded_form,
    random_automorphism,
)
from ncsdiff.diffop import apply_op
from ncsdiff.ncs import build_omega
from ncsdiff.series import RingContext, SeriesVector, substitute

CONFIGS = [RingContext(1, True, 6, 4), RingContext(2, True, 6, 4), RingContext(2, False, 5, 4), RingContext(3, False, 4, 3)]


def aut(ctx, *terms, alpha=1):
    """Automorphism of a one-variable ring from (t, degree, coeff) terms of H."""
    H = ctx.zero()
    for t, d, c in terms:
        H = H + ctx.monomial((0,) * d, t, c)
    return Automorphism(SeriesVector([H], ctx), alpha)


def test_invariants_enforced():
    ctx = RingContext(1, True, 4, 2)
    with pytest.raises(ValueError):
        aut(ctx, (0, 2, 1))
    with pytest.raises(ValueError):
        aut(ctx, (1, 1, 1), alpha=2)


def test_compose_example():
    ctx = RingContext(1, True, 6, 3)
    z, t = ctx.var(0), ctx.t()
    U = aut(ctx, (1, 2, 1))
    V = aut(ctx, (1, 3, 1))
    W = compose(U, V)
    assert W.F[0] == z - t * z**3 - t * z**2 + 2 * t**2 * z**4 - t**3 * z**6
    assert compose(U, Automorphism.identity(ctx)) == U


def test_catalan_inverse():
    ctx = RingContext(1, True, 9, 8)
    M = -invert(aut(ctx, (1, 2, 1))).H[0]
    for k in range(1, 9):
        assert M.coefficient((0,) * (k + 1), k) == comb(2 * k, k) // (k + 1)
    assert len(M) == 8


def test_inverse_solves_quadratic_fixed_point():
    ctx = RingContext(1, True, 9, 8)
    G = invert(aut(ctx, (1, 2, 1))).F[0]
    z, t = ctx.var(0), ctx.t()
    assert G == z + t * G * G


@pytest.mark.parametrize("ctx", CONFIGS)
def test_group_laws(ctx):
    g = rng(21)
    for alpha in (1, 2):
        U, V, W = (random_automorphism(ctx, alpha, "general", g) for _ in range(3))
        e = Automorphism.identity(ctx, alpha)
        assert compose(compose(U, V), W) == compose(U, compose(V, W))
        assert compose(U, invert(U)) == e
        assert compose(invert(U), U) == e
        assert compose(e, U) == U
        assert invert(invert(U)) == U
        assert invert(compose(U, V)) == compose(invert(V), invert(U))


@pytest.mark.parametrize("ctx", CONFIGS)
def test_composition_acts_by_substitution(ctx):
    g = rng(22)
    U = random_automorphism(ctx, 1, "general", g)
    V = random_automorphism(ctx, 1, "general", g)
    u = random_series(ctx, g)
    assert substitute(u, compose(U, V).F) == substitute(substitute(u, U.F), V.F)


def test_dlog_examples():
    ctx = RingContext(1, True, 6, 4)
    z, t = ctx.var(0), ctx.t()
    assert dlog(Automorphism.identity(ctx)).a.is_zero()
    a = dlog(aut(ctx, (1, 2, 1))).a[0]
    assert a.with_t_bound(2) == (-t * z**2 - t**2 * z**3).with_t_bound(2)


def test_exp_of_linear_field_is_scalar_flow():
    ctx = RingContext(1, True, 3, 5)
    z, t = ctx.var(0), ctx.t()
    F = exp_derivation(DLog(SeriesVector([-t * z], ctx), 1))
    expected = sum((z * t**k * mpq((-1) ** k, factorial(k)) for k in range(6)), ctx.zero())
    assert F.F[0] == expected
    assert exp_derivation(DLog(SeriesVector.zeros(ctx), 1)) == Automorphism.identity(ctx)


@pytest.mark.parametrize("ctx", CONFIGS)
@pytest.mark.parametrize("alpha", [1, 2, 3])
def test_dlog_exp_bijection(ctx, alpha):
    if alpha > ctx.nz:
        pytest.skip("alpha beyond truncation")
    g = rng(23 + alpha)
    for _ in range(3):
        F = random_automorphism(ctx, alpha, "general", g)
        assert exp_derivation(dlog(F)) == F
        a = random_derivation(ctx, g, alpha=alpha, t_range=(1, ctx.nt)).coeffs
        d = DLog(a, alpha)
        assert dlog(exp_derivation(d)) == d


def test_graded_form_examples():
    ctx = RingContext(1, True, 6, 3)
    assert is_graded_form(aut(ctx, (1, 2, 1)))
    assert not is_graded_form(aut(ctx, (1, 3, 1)))
    assert is_graded_form(aut(ctx, (1, 2, 1), (2, 3, 1)))


@pytest.mark.parametrize("ctx", [RingContext(1, True, 6, 4), RingContext(2, False, 5, 4)])
def test_graded_subgroup_closure(ctx):
    g = rng(25)
    for _ in range(4):
        U = random_automorphism(ctx, 2, "graded", g)
        V = random_automorphism(ctx, 2, "graded", g)
        assert is_graded_form(U) and is_graded_form(V)
        assert is_graded_form(compose(U, V))
        assert is_graded_form(invert(U))


def test_profiles():
    g = rng(26)
    ctx = RingContext(3, False, 5, 3)
    lin = random_automorphism(ctx, 2, "linear_in_t", g)
    assert all(t == 1 for comp in lin.H for t, _, _ in comp.terms())
    tri = random_automorphism(ctx, 2, "strictly_triangular", g)
    for i, comp in enumerate(tri.H):
        assert all(max(w, default=-1) < i for _, w, _ in comp.terms())
    with pytest.raises(ValueError):
        random_automorphism(RingContext(1, True, 5, 3), 2, "strictly_triangular", g)
    with pytest.raises(ValueError):
        random_automorphism(ctx, 2, "bogus", g)
    for profile in PROFILES[:3]:
        a = random_automorphism(ctx, 2, profile, rng(99))
        b = random_automorphism(ctx, 2, profile, rng(99))
        assert a == b


@pytest.mark.parametrize("ctx", CONFIGS)
def test_taylor_operator_is_substitution(ctx):
    g = rng(27)
    F = random_automorphism(ctx, 1, "general", g)
    f_neg = build_omega(F).f.t_negated()
    for _ in range(3):
        u = random_series(ctx, g)
        assert apply_op(f_neg, u) == substitute(u, F.F)


def test_json_round_trip_and_validation():
    g = rng(28)
    for ctx in CONFIGS:
        F = random_automorphism(ctx, 2, "general", g)
        text = F.dumps()
        assert Automorphism.from_json(json.loads(text)) == F
        assert Automorphism.from_json(json.loads(text)).dumps() == text
        d = dlog(F)
        assert DLog.from_json(json.loads(d.dumps())) == d
    doc = json.loads(F.dumps())
    doc["alpha"] = "2"
    with pytest.raises(ValueError):
        Automorphism.from_json(doc)
    doc = json.loads(F.dumps())
    del doc["H"]
    with pytest.raises(ValueError):
        Automorphism.from_json(doc)
