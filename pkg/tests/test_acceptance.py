"""Acceptance criteria, exact arithmetic throughout.

Run with ``pytest tests/test_acceptance.py -s`` (or ``python3 tests/test_acceptance.py``)
to see one PASS/FAIL line per criterion with its runtime and limit.
"""
import sys
import time
from math import comb

import numpy as np
import pytest
import sympy as sp

from ncsdiff.autgroup import Automorphism, dlog, exp_derivation, DLog, invert, is_graded_form, random_automorphism
from ncsdiff.diffop import Derivation, bplus, op_equal
from ncsdiff.ncs import (
    SeparationWitness,
    build_omega,
    cm_sequence,
    correspondence_check,
    graded_check,
    group_hom_check,
    jacobian_power_route,
    separate,
    specialize,
    verify_ncs,
)
from ncsdiff.nsym import abelianize, omega_lambda, solve_pi, verify_pi
from ncsdiff.series import RingContext, SeriesVector, TruncSeries

SEED = 20240601
CONFIGS = [(c, a) for c in (True, False) for a in (1, 2)]


def _ctx(i, commutative, nz=6, nt=4):
    return RingContext(1 + i % 3, commutative, nz, nt)


# 1 -----------------------------------------------------------------------------------------

def criterion_catalan():
    ctx = RingContext(1, True, 9, 8)
    F = Automorphism(SeriesVector([ctx.monomial((0, 0), 1)], ctx), 1)
    G = invert(F).F[0]
    ours = [G.coefficient((0,) * (k + 1), k) for k in range(9)]
    # independent oracle: iterate G = z + t G^2 in sympy, truncated
    z, t = sp.symbols("z t")
    g = z
    for _ in range(9):
        g = sp.expand(z + t * g**2)
        g = sum(c * t**i * z**j for (i, j), c in sp.Poly(g, t, z).terms() if i <= 8 and j <= 9)
    oracle = [sp.Poly(g, t, z).coeff_monomial(t**k * z ** (k + 1)) for k in range(9)]
    listed = [1, 1, 2, 5, 14, 42, 132, 429]
    ok = ours[:8] == listed and ours == [int(c) for c in oracle] == [comb(2 * k, k) // (k + 1) for k in range(9)]
    return ok, f"coefficients {[int(c) for c in ours]}"


# 2 -----------------------------------------------------------------------------------------

def criterion_ncs_axioms():
    g = np.random.default_rng([SEED, 2])
    count = 0
    for commutative, alpha in CONFIGS:
        for i in range(20):
            F = random_automorphism(_ctx(i, commutative), alpha, "general", g)
            rep = verify_ncs(build_omega(F))
            if not rep.passed:
                return False, f"failure {rep.failures()[0]}"
            count += 1
    return True, f"{count} systems verified"


# 3 -----------------------------------------------------------------------------------------

def criterion_correspondence():
    g = np.random.default_rng([SEED, 3])
    count = 0
    for commutative, alpha in CONFIGS:
        for i in range(10):
            F = random_automorphism(_ctx(i, commutative), alpha, "general", g)
            rep = correspondence_check(F, max_m=4)
            if not rep.passed:
                return False, f"failure {rep.failures()[0]}"
            count += len(rep.entries)
    return True, f"{count} operator identities"


# 4 -----------------------------------------------------------------------------------------

def _newton(top):
    p = {}
    e = sp.symbols(f"e1:{top + 1}")
    for m in range(1, top + 1):
        acc = (-1) ** (m - 1) * m * e[m - 1]
        for i in range(1, m):
            acc += (-1) ** (i - 1) * e[i - 1] * p[m - i]
        p[m] = sp.expand(acc)
    return p, e


def _e_poly(d, e):
    return sp.expand(sum(sp.Rational(int(c.numerator), int(c.denominator)) * sp.Mul(*[e[k - 1] for k in mono]) for mono, c in d.items()))


def criterion_nsym_tables():
    pi = solve_pi(6)
    if not all(ok for _, ok in verify_pi(pi)):
        return False, "generating-function identities fail"
    p, e = _newton(6)
    for m in range(1, 7):
        if sp.expand(_e_poly(abelianize(pi.Psi(m)), e) - p[m]) != 0:
            return False, f"abelianized Psi_{m} differs from p_{m}"
    return True, "identities and Newton power sums to weight 6"


# 5 -----------------------------------------------------------------------------------------

def criterion_omega():
    pi = solve_pi(6)
    for m in range(1, 7):
        if omega_lambda(pi.S(m)) != pi.S(m) or omega_lambda(pi.Phi(m)) != pi.Phi(m) or omega_lambda(pi.Psi(m)) != pi.Xi(m):
            return False, f"relation fails at m={m}"
    g = np.random.default_rng([SEED, 5])
    pi4 = solve_pi(4)
    for i in range(5):
        F = random_automorphism(_ctx(i, i % 2 == 0), 1 + i % 2, "general", g)
        system = build_omega(F)
        for m in range(1, 5):
            if not op_equal(specialize(omega_lambda(pi4.Psi(m)), F, system), system.xi(m)):
                return False, f"specialized relation fails (trial {i}, m={m})"
    return True, "relations for m<=6 and 5 specialized systems"


# 6 -----------------------------------------------------------------------------------------

def criterion_dlog_bijection():
    g = np.random.default_rng([SEED, 6])
    count = 0
    for commutative, alpha in CONFIGS:
        for i in range(20):
            ctx = _ctx(i, commutative)
            F = random_automorphism(ctx, alpha, "general", g)
            if exp_derivation(dlog(F)) != F:
                return False, "exp(dlog(F)) != F"
            a = random_automorphism(ctx, alpha, "general", g).H  # same constraints as a D-Log coefficient
            d = DLog(a, alpha)
            if dlog(exp_derivation(d)) != d:
                return False, "dlog(exp(a)) != a"
            count += 2
    return True, f"{count} round trips"


# 7 -----------------------------------------------------------------------------------------

def criterion_group():
    g = np.random.default_rng([SEED, 7])
    for i in range(10):
        ctx = _ctx(i, i % 2 == 0)
        alpha = 1 + (i // 2) % 2
        U = random_automorphism(ctx, alpha, "general", g)
        V = random_automorphism(ctx, alpha, "general", g)
        rep = group_hom_check(U, V)
        if not rep.passed:
            return False, f"failure {rep.failures()[0]}"
    return True, "10 pairs"


# 8 -----------------------------------------------------------------------------------------

def criterion_grading():
    g = np.random.default_rng([SEED, 8])
    graded = non_graded = 0
    i = 0
    while graded < 20 or non_graded < 20:
        ctx = _ctx(i, i % 2 == 0)
        i += 1
        want_graded = graded < 20
        F = random_automorphism(ctx, 2, "graded" if want_graded else "general", g)
        if is_graded_form(F) != want_graded:
            continue
        if graded_check(F) != want_graded:
            return False, f"graded_check disagrees on {F}"
        if want_graded:
            graded += 1
        else:
            non_graded += 1
    return True, "20 graded and 20 non-graded"


# 9 -----------------------------------------------------------------------------------------

def criterion_special_form():
    g = np.random.default_rng([SEED, 9])
    for i in range(10):
        ctx = RingContext(1 + i % 3, True, 7, 1)
        H = random_automorphism(ctx, 2, "linear_in_t", g).H.t_coefficient(1)
        if cm_sequence(H, 5) != jacobian_power_route(H, 5):
            return False, f"C_m routes differ for H={H}"
    for i in range(5):
        n = 2 + i % 2
        ctx = RingContext(n, i % 2 == 0, 6 if n == 2 else 5, 4)
        system = build_omega(random_automorphism(ctx, 2, "strictly_triangular", g))
        if not all(system.psi(m).is_zero() for m in range(n, ctx.nt + 1)):
            return False, f"psi_m nonzero for m>=n (n={n})"
    return True, "10 Jacobian routes and 5 triangular systems"


# 10 ----------------------------------------------------------------------------------------

def criterion_separation():
    pi = solve_pi(3)
    L = pi.Lambda
    targets = {
        "Λ1": L(1),
        "Λ2": L(2),
        "Ψ3": pi.Psi(3),
        "S2·Λ1": pi.S(2) * L(1),
        "Λ1Λ2−Λ2Λ1": L(1) * L(2) - L(2) * L(1),
    }
    found = []
    for name, P in targets.items():
        r = separate(P, max_n=3, attempts=200, seed=SEED, commutative=False)
        if not isinstance(r, SeparationWitness):
            return False, f"inconclusive for {name}"
        found.append(f"{name}@n={r.n}")
    return True, ", ".join(found)


# 11 ----------------------------------------------------------------------------------------

def criterion_bplus_routes():
    g = np.random.default_rng([SEED, 11])
    ctxs = [RingContext(1, True, 6, 0), RingContext(2, True, 5, 0), RingContext(2, False, 5, 0), RingContext(3, False, 4, 0)]
    for i in range(50):
        ctx = ctxs[i % len(ctxs)]
        m = 1 + i % 4
        deltas = []
        for _ in range(m):
            comps = []
            for _ in range(ctx.n):
                terms = {}
                for _ in range(2):
                    d = int(g.integers(1, 3))
                    w = ctx.canonical(int(g.integers(0, ctx.n)) for _ in range(d))
                    terms[(0, w)] = int(g.integers(-2, 3))
                comps.append(TruncSeries(ctx, terms))
            deltas.append(Derivation(SeriesVector(comps, ctx)))
        if not op_equal(bplus(deltas, "auxiliary"), bplus(deltas, "recursive")):
            return False, f"routes differ on list {i}"
    return True, "50 lists"


CRITERIA = [
    (1, "Catalan inversion", criterion_catalan, 1),
    (2, "NCS axioms", criterion_ncs_axioms, 60),
    (3, "Correspondence", criterion_correspondence, 60),
    (4, "NCSF tables", criterion_nsym_tables, 10),
    (5, "omega_Lambda relations", criterion_omega, 30),
    (6, "D-Log bijection", criterion_dlog_bijection, 30),
    (7, "Group isomorphism", criterion_group, 60),
    (8, "Grading", criterion_grading, 30),
    (9, "Special form", criterion_special_form, 30),
    (10, "Separation", criterion_separation, 120),
    (11, "Dual-route B+", criterion_bplus_routes, 30),
]


def run_criterion(num, name, fn, limit):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < limit
    line = f"{'PASS' if ok else 'FAIL'} AC{num:<2} {name}: {detail} ({elapsed:.2f}s, limit {limit}s)"
    return ok, line


@pytest.mark.parametrize("num,name,fn,limit", CRITERIA, ids=[f"AC{c[0]}-{c[1].replace(' ', '_')}" for c in CRITERIA])
def test_acceptance(num, name, fn, limit, capsys):
    ok, line = run_criterion(num, name, fn, limit)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
