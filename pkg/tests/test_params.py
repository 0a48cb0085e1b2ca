import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starcert.errors import AdmissibilityError, DomainError, NoConclusionError, SolverError
from starcert.params import (
    G,
    arg_H,
    best_mu,
    beta0,
    chain,
    critical_x0,
    increment,
    min_arg_H_bruteforce,
    phi,
    search_mu,
    solve_increment,
)

# Frozen from 40-digit mpmath root finding (oracle_inverse below).
CHAIN_ORACLE = {
    (1.0, 2): (0.5, 0.22782158103539918),
    (1.5, 2): (0.84135663778206475, 0.40666345852800659),
    (1.0, 1): (0.6383222623342946, 0.39747263202105935),
    (4.0 / 3.0, 1): (0.87552330639169235, 0.55363125705798849),
}
BETA0_ORACLE = {1: 1.2187220135242588, 2: 1.1323566210082094}
PHI_ORACLE = {
    (0.5, 2): 1.9364485127730556,
    (2.0 / 3.0, 1): 2.2724843466271971,
    (0.9, 2): 2.9096362576541716,
}


def oracle_inverse(target, n):
    mpmath.mp.dps = 40
    f = lambda x: x + 2 / mpmath.pi * mpmath.atan(n * x) - target  # noqa: E731
    return float(mpmath.findroot(f, (mpmath.mpf(0), mpmath.mpf(target)), solver="anderson"))


def test_increment_examples():
    assert increment(0.5, 2, 1) == 1.0
    assert increment(0.0, 3, 2.5) == 0.0
    assert increment(0.227, 2, 1) == pytest.approx(0.4984, abs=1e-3)
    assert increment(0.227, 2, 1) == pytest.approx(0.49831165141294126, rel=1e-15)


def test_increment_rejects_negative():
    with pytest.raises(DomainError):
        increment(-0.1, 1)
    with pytest.raises(DomainError):
        increment(0.1, 0)


@pytest.mark.parametrize(
    "target, n, expected",
    [(1.0, 2, 0.5), (0.5, 2, 0.22782158103539918), (1.5, 2, 0.84135663778206475)],
)
def test_solve_increment(target, n, expected):
    x = solve_increment(target, n, 1, 1e-12)
    assert x == pytest.approx(expected, abs=1e-12)
    assert abs(increment(x, n) - target) <= 1e-12


def test_solve_increment_against_live_oracle():
    for target in (0.01, 0.3, 1.0, 2.5):
        for n in (1, 3, 7):
            assert solve_increment(target, n) == pytest.approx(oracle_inverse(target, n), abs=1e-12)


def test_solve_increment_tolerance_misconfiguration():
    with pytest.raises(SolverError):
        solve_increment(0.7, 3, 1, tol=1e-30)


@pytest.mark.parametrize("n", [1, 2])
def test_beta0(n):
    b = beta0(n, 1, 1e-12)
    assert b == pytest.approx(BETA0_ORACLE[n], abs=1e-12)
    assert abs(b * math.pi + math.atan(n * b) - 1.5 * math.pi) <= 1e-12


def test_beta0_rough_values_and_limit():
    assert beta0(1) == pytest.approx(1.2188, abs=1e-3)
    assert beta0(2) == pytest.approx(1.132, abs=1e-3)
    assert abs(beta0(10**6) - 1.0) < 1e-5


@pytest.mark.parametrize("alpha, n", list(CHAIN_ORACLE))
def test_chain_matches_oracle(alpha, n):
    p = chain(alpha, n)
    b, g = CHAIN_ORACLE[(alpha, n)]
    assert p.beta == pytest.approx(b, abs=1e-12)
    assert p.gamma == pytest.approx(g, abs=1e-12)
    assert p.residual_beta < 1e-10 and p.residual_gamma < 1e-10
    assert p.lam == 1.0
    assert p.gamma < p.beta < p.alpha
    assert p.beta <= p.beta0


def test_chain_rough_values():
    p = chain(1, 1)
    assert p.beta == pytest.approx(0.639, abs=1e-3)
    assert p.gamma == pytest.approx(0.398, abs=1e-3)
    assert chain(1.5, 2).gamma == pytest.approx(0.406, abs=1e-3)


def test_chain_inadmissible():
    with pytest.raises(AdmissibilityError):
        chain(5, 1)


def test_chain_tiny_alpha():
    p = chain(1e-9, 1)
    assert 0 < p.gamma < p.beta < 1e-9


@pytest.mark.parametrize("mu, n", list(PHI_ORACLE))
def test_phi_closed_form(mu, n):
    ev = phi(mu, n)
    assert ev.phi == pytest.approx(PHI_ORACLE[(mu, n)], abs=1e-14)
    assert ev.phi == pytest.approx(ev.varphi + 0.5 * math.pi * (mu - 1), abs=1e-15)
    assert 0.5 * math.pi < ev.varphi <= math.pi
    assert 0 < ev.phi <= math.pi


def test_phi_at_one_and_near_one():
    for n in (1, 2, 7):
        ev = phi(1, n)
        assert ev.phi == math.pi and ev.varphi == math.pi and ev.x0 == 0.0
        assert phi(1 - 1e-9, n).phi == pytest.approx(math.pi, abs=1e-6)


@pytest.mark.parametrize("mu", [0.0, -0.1, 1.5, float("nan")])
def test_phi_domain(mu):
    with pytest.raises(DomainError):
        phi(mu, 1)


def test_bruteforce_minimum_example():
    est = min_arg_H_bruteforce(0.5, 2)
    assert est.varphi_est == pytest.approx(math.pi - math.atan(0.4463), abs=1e-4)
    assert est.varphi_est == pytest.approx(phi(0.5, 2).varphi, abs=1e-9)
    assert est.argmin_x == pytest.approx(math.sqrt(3.0), abs=est.resolution)


def test_arg_H_at_zero_is_pi():
    for mu in (0.1, 0.5, 0.9):
        for n in (1, 4):
            assert arg_H(0.0, mu, n) == math.pi


def test_arg_H_near_mu_one():
    x = np.linspace(0, 50, 101)
    assert np.all(np.abs(arg_H(x, 1 - 1e-12, 3) - math.pi) < 1e-10)


@pytest.mark.parametrize("mu", [0.1, 0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_G_single_sign_change_at_critical_point(mu, n):
    x0 = critical_x0(mu)
    x = np.linspace(1e-6, 20 * x0, 200_001)
    s = np.sign(G(x, mu, n))
    changes = np.flatnonzero(s[1:] != s[:-1])
    assert len(changes) == 1
    assert x[changes[0]] <= x0 <= x[changes[0] + 1]


def test_G_finite_difference():
    mu, n, h = 0.4, 3, 1e-6
    s, c = math.sin(mu * math.pi / 2), math.cos(mu * math.pi / 2)
    P = lambda x: -s * x ** (mu + 1) - n / 2 * mu * (1 + x * x)  # noqa: E731
    Q = lambda x: c * x ** (mu + 1)  # noqa: E731
    for x in (0.3, 1.0, 2.7):
        dP = (P(x + h) - P(x - h)) / (2 * h)
        dQ = (Q(x + h) - Q(x - h)) / (2 * h)
        assert float(G(x, mu, n)) == pytest.approx(dQ * P(x) - dP * Q(x), rel=1e-7)


def test_phi_nondecreasing_on_scan_grid():
    grid = np.arange(1, 1001) / 1000
    for n in (1, 2, 3, 5, 10):
        values = [phi(m, n).phi for m in grid]
        assert all(b >= a for a, b in zip(values, values[1:]))


def test_best_mu_examples():
    m = best_mu(1, 2)
    assert 0.49 <= m <= 0.5
    assert phi(m, 2).phi >= chain(1, 2).lhs
    assert phi(m - 1e-8, 2).phi < chain(1, 2).lhs
    assert best_mu(1.5, 2) <= 1
    assert chain(1.5, 2).lhs == pytest.approx(2.994, abs=1e-3)
    assert best_mu(1, 1) <= 2 / 3


def test_best_mu_no_conclusion():
    # lhs crosses pi near alpha = 1.41 for n = 1
    with pytest.raises(NoConclusionError):
        best_mu(1.45, 1)


def test_best_mu_nondecreasing_in_alpha():
    for n in (1, 2):
        values = [best_mu(a, n) for a in np.linspace(0.05, 1.35, 27)]
        assert all(b >= a for a, b in zip(values, values[1:]))


def test_search_mu_reports_monotone_scan():
    found = search_mu(1, 1)
    assert found.monotone
    assert found.target == pytest.approx(2.1951448771750762, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(min_value=1e-6, max_value=1.1323566), n=st.integers(min_value=1, max_value=8))
def test_round_trip(x, n):
    tol = 1e-12
    assert solve_increment(increment(x, n, 1), n, 1, tol) == pytest.approx(x, abs=10 * tol)


@settings(max_examples=100, deadline=None)
@given(a=st.floats(min_value=1e-6, max_value=5.0), b=st.floats(min_value=1e-6, max_value=5.0),
       n=st.integers(min_value=1, max_value=10))
def test_increment_strictly_increasing(a, b, n):
    if a < b:
        assert increment(a, n) < increment(b, n)
