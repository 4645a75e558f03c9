import pytest

from helpers import random_series, rng
from ncsdiff.autgroup import Automorphism, compose, invert, is_graded_form, random_automorphism
from ncsdiff.diffop import DiffOp, Derivation, compose as op_compose, op_equal
from ncsdiff.ncs import (
    SeparationInconclusive,
    SeparationWitness,
    action_hopf_checks,
    build_omega,
    cm_sequence,
    correspondence_check,
    graded_check,
    group_hom_check,
    jacobian,
    jacobian_power_route,
    is_strictly_lower_triangular,
    psi_xi_special,
    separate,
    special_form_check,
    specialize,
    tamper,
    verify_ncs,
)
from ncsdiff.nsym import NSymElem, omega_lambda, solve_pi
from ncsdiff.series import RingContext, SeriesVector

SMALL = [RingContext(1, True, 6, 4), RingContext(2, True, 5, 4), RingContext(2, False, 5, 3)]


def one_var(ctx, *terms, alpha=1):
    H = ctx.zero()
    for t, d, c in terms:
        H = H + ctx.monomial((0,) * d, t, c)
    return Automorphism(SeriesVector([H], ctx), alpha)


def test_identity_system():
    ctx = RingContext(2, False, 4, 3)
    sys_ = build_omega(Automorphism.identity(ctx))
    one = DiffOp.identity(ctx)
    assert op_equal(sys_.f, one) and op_equal(sys_.g, one)
    assert sys_.d.is_zero() and sys_.h.is_zero() and sys_.m.is_zero()
    assert verify_ncs(sys_).passed


def test_first_coefficients_for_quadratic():
    ctx = RingContext(1, True, 6, 4)
    z = ctx.var(0)
    sys_ = build_omega(one_var(ctx, (1, 2, 1)))
    sq = DiffOp.from_derivation(Derivation([z * z]))
    assert op_equal(sys_.s(1), sq)
    assert op_equal(sys_.lambda_(1), sq)
    assert sys_.f.t_negated()(z) == z - ctx.t() * z * z


@pytest.mark.parametrize("ctx", SMALL)
@pytest.mark.parametrize("alpha", [1, 2])
def test_axioms_hold(ctx, alpha):
    g = rng(41 + alpha)
    for _ in range(3):
        rep = verify_ncs(build_omega(random_automorphism(ctx, alpha, "general", g)))
        assert rep.passed, rep.failures()
        assert [e["check"] for e in rep.entries] == [
            "f(0)=1", "f(-t)g(t)=1", "g(t)f(-t)=1", "exp(d(t))=g(t)", "dg/dt=g(t)h(t)", "dg/dt=m(t)g(t)",
        ]


def test_tampered_system_fails_third_axiom():
    ctx = RingContext(2, False, 4, 3)
    sys_ = build_omega(random_automorphism(ctx, 2, "general", rng(43)))
    rep = verify_ncs(tamper(sys_))
    failed = [e["check"] for e in rep.failures()]
    assert failed == ["dg/dt=g(t)h(t)"]
    assert rep.failures()[0]["counterexample"]["monomial"] == "z1"


@pytest.mark.parametrize("ctx", SMALL)
def test_correspondence(ctx):
    g = rng(44)
    for _ in range(2):
        rep = correspondence_check(random_automorphism(ctx, 1, "general", g))
        assert rep.passed, rep.failures()


def test_specialize_basic():
    ctx = RingContext(2, False, 4, 3)
    F = random_automorphism(ctx, 1, "general", rng(45))
    sys_ = build_omega(F)
    assert op_equal(specialize(NSymElem.one(3), F, sys_), DiffOp.identity(ctx))
    for m in range(1, 4):
        assert op_equal(specialize(NSymElem.Lambda(m, 3), F, sys_), sys_.lambda_(m))
    with pytest.raises(ValueError):
        specialize(NSymElem.Lambda(4, 4), F, sys_)


def test_specialize_is_multiplicative():
    g = rng(46)
    ctx = RingContext(2, False, 5, 4)
    F = random_automorphism(ctx, 1, "general", g)
    sys_ = build_omega(F)
    pi = solve_pi(4)
    pairs = [(pi.S(1), pi.Psi(3)), (pi.Phi(2), pi.Xi(2)), (pi.Lambda(2) - pi.S(1), pi.S(2))]
    for P, Q in pairs:
        lhs = specialize(P * Q, F, sys_)
        rhs = op_compose(specialize(P, F, sys_), specialize(Q, F, sys_))
        assert op_equal(lhs, rhs)


def test_omega_lambda_consequence():
    g = rng(47)
    pi = solve_pi(4)
    for ctx in SMALL:
        F = random_automorphism(ctx, 2, "general", g)
        sys_ = build_omega(F)
        for m in range(1, ctx.nt + 1):
            assert op_equal(specialize(omega_lambda(pi.Psi(m)), F, sys_), sys_.xi(m))


def test_cm_examples():
    ctx = RingContext(1, True, 7, 0)
    z = ctx.var(0)
    seq = cm_sequence(SeriesVector([z * z], ctx), 5)
    for m, C in enumerate(seq, start=1):
        assert C[0] == 2 ** (m - 1) * z ** (m + 1)
    ctx2 = RingContext(2, True, 6, 0)
    z1 = ctx2.var(0)
    H = SeriesVector([ctx2.zero(), z1 * z1], ctx2)
    seq = cm_sequence(H, 4)
    assert seq[0] == H
    assert all(C.is_zero() for C in seq[1:])
    J = jacobian(H)
    assert J[1][0] == 2 * z1 and J[0][0].is_zero()
    assert is_strictly_lower_triangular(J)
    with pytest.raises(ValueError):
        jacobian(SeriesVector.zeros(RingContext(2, False, 3, 0)))


def test_jacobian_route():
    g = rng(48)
    for n in (1, 2, 3):
        ctx = RingContext(n, True, 7, 1)
        H = random_automorphism(ctx, 2, "linear_in_t", g).H.t_coefficient(1)
        assert cm_sequence(H, 5) == jacobian_power_route(H, 5)


@pytest.mark.parametrize("ctx", SMALL + [RingContext(3, False, 4, 3)])
def test_special_form(ctx):
    F = random_automorphism(ctx, 1, "linear_in_t", rng(49))
    assert special_form_check(F).passed
    psis, xis = psi_xi_special(F)
    assert psis[0] == Derivation(F.H.t_coefficient(1))


def test_special_form_rejects_general_profile():
    ctx = RingContext(1, True, 5, 3)
    with pytest.raises(ValueError):
        psi_xi_special(one_var(ctx, (2, 2, 1)))


@pytest.mark.parametrize("commutative", [True, False])
@pytest.mark.parametrize("n", [2, 3])
def test_nilpotent_jacobian_kills_high_psi(commutative, n):
    ctx = RingContext(n, commutative, 6 if n == 2 else 5, 4)
    g = rng(50)
    for _ in range(2):
        sys_ = build_omega(random_automorphism(ctx, 2, "strictly_triangular", g))
        for m in range(n, ctx.nt + 1):
            assert sys_.psi(m).is_zero()


def test_group_homomorphism():
    g = rng(51)
    for ctx in SMALL:
        U = random_automorphism(ctx, 2, "general", g)
        V = random_automorphism(ctx, 2, "general", g)
        assert group_hom_check(U, V).passed
        assert group_hom_check(U, Automorphism.identity(ctx, 2)).passed
        sys_ = build_omega(compose(U, invert(U)))
        assert op_equal(sys_.g, DiffOp.identity(ctx))


def test_group_homomorphism_against_substitution():
    g = rng(52)
    ctx = RingContext(2, True, 5, 3)
    U = random_automorphism(ctx, 1, "general", g)
    V = random_automorphism(ctx, 1, "general", g)
    gUV = build_omega(compose(U, V)).g
    u = random_series(ctx, g)
    # g^{U∘V} u = u((U∘V)^{-1})
    assert gUV(u) == u.subs(invert(compose(U, V)).F)


def test_graded_check_examples():
    ctx = RingContext(1, True, 6, 3)
    assert graded_check(one_var(ctx, (1, 2, 1), alpha=2))
    assert not graded_check(one_var(ctx, (1, 3, 1), alpha=2))
    with pytest.raises(ValueError):
        graded_check(one_var(ctx, (1, 2, 1), alpha=1))


def test_graded_equivalence():
    g = rng(53)
    for ctx in SMALL:
        for profile in ("graded", "general"):
            for _ in range(3):
                F = random_automorphism(ctx, 2, profile, g)
                assert graded_check(F) == is_graded_form(F)


@pytest.mark.parametrize("ctx", SMALL)
def test_action_hopf(ctx):
    g = rng(54)
    rep = action_hopf_checks(random_automorphism(ctx, 1, "general", g), g, samples=2)
    assert rep.passed, rep.failures()


def test_separate_examples():
    r = separate(NSymElem.Lambda(1, 1), seed=1)
    assert isinstance(r, SeparationWitness)
    assert not r.value.is_zero()
    pi = solve_pi(3)
    r = separate(pi.Lambda(1) * pi.Lambda(2) - pi.Lambda(2) * pi.Lambda(1))
    assert isinstance(r, SeparationWitness) and r.n <= 3
    sys_ = build_omega(r.F)
    op = op_compose(sys_.lambda_(1), sys_.lambda_(2)) - op_compose(sys_.lambda_(2), sys_.lambda_(1))
    assert op(r.u) == r.value
    with pytest.raises(ValueError):
        separate(NSymElem.zero(2))


def test_separate_budget_exhaustion():
    r = separate(NSymElem.Lambda(1, 1), attempts=0)
    assert isinstance(r, SeparationInconclusive)
    assert r.to_json()["status"] == "inconclusive"


def test_separate_is_deterministic():
    pi = solve_pi(3)
    a = separate(pi.S(2) * pi.Lambda(1), seed=5)
    b = separate(pi.S(2) * pi.Lambda(1), seed=5)
    assert a.to_json() == b.to_json()
