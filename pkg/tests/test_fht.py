import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from adjfht.errors import DomainError, ParameterError, PreconditionError, PrincipalValueError
from adjfht.fht import (
    commutation_residual,
    discretized_svd,
    fht_apply,
    gauss_legendre,
    halfline_power_fht,
    interval_rule,
    inverse_sqrt_rule,
    panel_rule,
    svd_tail_fit,
)
from adjfht.operator import IntervalPair, apply_L, lambda_of_mu, mu_of_lambda
from adjfht.solve import solve_interval

SYM = IntervalPair(-1.0, 1.0)
ASYM = IntervalPair(-1.0, 2.0)


def cubic(a1):
    def f(x):
        x = np.asarray(x, dtype=float)
        return x * x * (x - a1), 3 * x * x - 2 * a1 * x, 6 * x - 2 * a1
    return f


def quartic(a1):
    def f(x):
        x = np.asarray(x, dtype=float)
        return (x - a1) * x ** 3, 4 * x ** 3 - 3 * a1 * x * x, 12 * x * x - 6 * a1 * x
    return f


def test_gauss_legendre_exactness():
    x, w = gauss_legendre(10)
    for m in range(20):
        assert np.sum(w * x ** m) == pytest.approx((1 + (-1) ** m) / (m + 1), abs=1e-15)


def test_panel_rule_integrates_smooth_function():
    x, w = panel_rule(np.linspace(0, 2, 5), 12)
    assert np.sum(w * np.exp(x)) == pytest.approx(math.e ** 2 - 1, rel=1e-14)


def test_inverse_sqrt_rule():
    rule = inverse_sqrt_rule()
    # weights absorb the substitution: sum w f(x) = int_0^1 f for f = x^(-1/2) g
    for m in range(21):
        assert rule.integrate(rule.nodes ** (m - 0.5)) == pytest.approx(1.0 / (m + 0.5), rel=1e-13)


@pytest.mark.parametrize("geom", [SYM, ASYM])
def test_interval_rule_moments(geom):
    for j in (1, 2):
        rule = interval_rule(geom, j)
        a = geom.endpoint(j)
        assert np.all(geom.contains(j, rule.nodes))
        assert rule.integrate(np.ones_like(rule.nodes)) == pytest.approx(abs(a) - rule.floor, rel=1e-14)
        # |x|^(-1/2) from the floor to the endpoint
        exact = 2 * (math.sqrt(abs(a)) - math.sqrt(rule.floor))
        assert rule.integrate(np.abs(rule.nodes) ** -0.5) == pytest.approx(exact, rel=1e-13)


def test_fht_of_constant():
    y = np.array([1e-3, 0.01, 0.3, 2.0, 10.0])
    val = fht_apply(lambda x: np.ones_like(x), SYM, 1, y)
    np.testing.assert_allclose(val, np.log(y / (1 + y)) / math.pi, rtol=1e-12)
    # from I2 to a point left of a1 as well
    y2 = np.array([-0.5, -1e-3, -3.0])
    val2 = fht_apply(lambda x: np.ones_like(x), ASYM, 2, y2)
    np.testing.assert_allclose(val2, np.log((2 - y2) / -y2) / math.pi, rtol=1e-12)


def test_fht_smooth_against_quad():
    f = lambda x: np.cos(3 * x) * (x + 1) ** 2
    for y in (1e-3, 0.05, 0.7):
        ref = integrate.quad(lambda x: float(f(x)) / (x - y), -1, 0, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        assert fht_apply(f, SYM, 1, y) == pytest.approx(ref / math.pi, rel=1e-10)


def test_fht_power_singularity_against_mpmath():
    mu = 2.0
    f = lambda x: (np.abs(x) ** complex(-0.5, mu)).real
    r = complex(-0.5, mu)
    edge_rule = interval_rule(SYM, 1, lam=lambda_of_mu(SYM, mu).lam)
    from adjfht.fht import EdgeBehavior

    edge = EdgeBehavior(mu, 0.5, 0.5)
    for y in (1e-3, 0.02, 0.5):
        val = fht_apply(f, SYM, 1, y, rule=edge_rule, edge=edge)
        with mp.workdps(30):
            pts = sorted({0, y, 1, *(mp.mpf(10) ** k for k in range(-30, 0))})
            ref = mp.quad(lambda u: mp.re(u ** r) / (-u - y), pts) / mp.pi
        assert abs(val - float(ref)) <= 1e-8 * abs(float(ref))


def test_fht_rejects_points_inside_source():
    with pytest.raises(PrincipalValueError):
        fht_apply(lambda x: x, SYM, 1, -0.5)
    with pytest.raises(PrincipalValueError):
        fht_apply(lambda x: x, SYM, 1, 0.0)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.01, 0.99))
@settings(max_examples=40, deadline=None)
def test_fht_linearity(alpha, beta, y):
    f = lambda x: np.sin(x) + 1.0
    g = lambda x: x ** 3
    lhs = fht_apply(lambda x: alpha * f(x) + beta * g(x), SYM, 1, y)
    rhs = alpha * fht_apply(f, SYM, 1, y) + beta * fht_apply(g, SYM, 1, y)
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(alpha) + abs(beta))


def test_eigenfunction_ratio_constant():
    lam = 1.25
    s1, s2 = solve_interval(SYM, lam, 1), solve_interval(SYM, lam, 2)
    y = np.linspace(0.05, 0.8, 16)
    h = fht_apply(s1.phi, SYM, 1, y, rule=interval_rule(SYM, 1, lam=lam), edge=s1.edge("phi"))
    ratio = h / s2.phi(y)
    assert np.ptp(ratio) <= 1e-5 * np.mean(np.abs(ratio))


@pytest.mark.parametrize("mu, y", [(0.0, 0.25), (0.0, 0.3), (2.0, 0.25), (2.0, 0.3)])
def test_halfline_identity(mu, y):
    exact = -y ** complex(-0.5, mu) / math.cosh(math.pi * mu)
    assert abs(halfline_power_fht(mu, y, 100.0) - exact) <= 1e-8 * abs(exact)


def test_halfline_truncation_independence():
    # measured against |y^r|: for larger mu the value is a cancellation of O(|y^r|) terms
    for mu, y in ((0.0, 0.3), (2.0, 0.25), (5.0, 1.0)):
        a = halfline_power_fht(mu, y, 50.0)
        b = halfline_power_fht(mu, y, 200.0)
        assert abs(a - b) <= 1e-10 * max(abs(a), y ** -0.5 * 1e-2)


def test_halfline_errors():
    with pytest.raises(DomainError):
        halfline_power_fht(1.0, 1.0, truncation_T=5.0)
    with pytest.raises(DomainError):
        halfline_power_fht(1.0, -1.0)
    with pytest.raises(ParameterError):
        halfline_power_fht(-1.0, 1.0)


@given(st.floats(0.0, 4.0), st.floats(0.01, 5.0))
@settings(max_examples=20, deadline=None)
def test_halfline_identity_property(mu, y):
    exact = -y ** complex(-0.5, mu) / math.cosh(math.pi * mu)
    assert abs(halfline_power_fht(mu, y, 100 * max(y, 1.0)) - exact) <= 1e-8 * abs(exact)


def test_commutation_polynomials():
    probes = [0.2, 0.5, 0.8]
    assert commutation_residual(SYM, cubic(-1.0), probes) <= 1e-6
    assert commutation_residual(SYM, quartic(-1.0), probes) <= 1e-6
    assert commutation_residual(ASYM, cubic(-1.0), [0.3, 1.0, 1.7]) <= 1e-6


def test_commutation_preconditions():
    # constants meet the conditions (bounded at a_j, o(1/|x|) at 0)
    one = lambda x: (np.ones_like(x), np.zeros_like(x), np.zeros_like(x))
    assert commutation_residual(SYM, one, [0.2, 0.5]) <= 1e-6
    with pytest.raises(PreconditionError):
        commutation_residual(SYM, one, [0.5], satisfies_conditions=False)


def test_commutation_with_eigenfunction():
    lam = 2.0
    s1 = solve_interval(SYM, lam, 1)
    rule = interval_rule(SYM, 1, lam=lam)
    y = np.array([0.2, 0.5, 0.8])
    edge = s1.edge("phi")
    hphi = fht_apply(s1.phi, SYM, 1, y, rule=rule, edge=edge)
    # L phi = lam phi on the nodes, so H(L phi) = lam H(phi)
    worst = 0.0
    for yi, hi in zip(y, hphi):
        h = 0.02 * yi
        g = fht_apply(s1.phi, SYM, 1, yi + h * np.arange(-2, 3), rule=rule, edge=edge)
        g1 = (g[0] - 8 * g[1] + 8 * g[3] - g[4]) / (12 * h)
        g2 = (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * h * h)
        l_h = SYM.P(yi) * g2 + SYM.dP(yi) * g1 + SYM.Q(yi) * g[2]
        worst = max(worst, abs(l_h - lam * hi) / (1 + abs(lam * hi)))
    assert worst <= 1e-5
    # and the node values of L phi agree with lam phi to roundoff
    x = rule.nodes[(rule.nodes > -0.95) & (rule.nodes < -0.05)][::50]
    f, fp = s1.evaluate(x)
    hstep = 1e-4
    flux = [s1.evaluate(x + k * hstep)[1] for k in (-2, -1, 1, 2)]
    dflux = (flux[0] - 8 * flux[1] + 8 * flux[2] - flux[3]) / (12 * hstep)
    np.testing.assert_allclose(dflux + SYM.Q(x) * f, lam * f, rtol=1e-6, atol=1e-8)


def test_svd_shape_and_decay():
    s = discretized_svd(SYM, 200)
    assert s.shape == (200,)
    assert np.all(np.diff(s) < 0)
    assert 0 < s[-1] and s[0] < 1
    # middle third (k = 67..133) lies on the roundoff floor; the fit is reported anyway
    k = np.arange(66, 133) + 1
    y = np.log(s[k - 1])
    res = y - np.polyval(np.polyfit(k, y, 1), k)
    assert 1 - res.var() / y.var() >= 0.99
    r2, slope, k_lo, k_hi = svd_tail_fit(s)
    assert r2 >= 0.99 and slope < 0 and k_hi < 60


def test_svd_monotone_in_n():
    # nested Galerkin spaces: each s_k can only grow with n, and stays below 1
    a, b = discretized_svd(SYM, 100), discretized_svd(SYM, 200)
    assert np.all(b[:10] >= a[:10]) and b[0] < 1
    with pytest.raises(ParameterError):
        discretized_svd(SYM, 8)


def test_svd_tail_fit_rejects_noise():
    with pytest.raises(ParameterError):
        svd_tail_fit(np.array([1.0, 1e-20, 1e-21, 1e-22]))


def test_svd_matches_independent_discretization():
    # Galerkin matrix for n = 16 with scipy's adaptive quadrature of the kernel
    from numpy.polynomial import legendre

    n = 16
    s = discretized_svd(SYM, n)
    xg, wg = np.polynomial.legendre.leggauss(200)
    # orthonormal Legendre on (-1, 0) and (0, 1); corner-graded by a cubic map t = u^3
    u = 0.5 * (xg + 1)
    t, wt = u ** 3, 3 * u ** 2 * 0.5 * wg
    V = legendre.legvander(2 * t - 1, n - 1) * np.sqrt(2 * np.arange(n) + 1)
    K = -1.0 / (math.pi * (t[None, :] + t[:, None]))  # x = -t, y = t
    A = (V * wt[:, None]).T @ K @ (V * wt[:, None])
    ref = np.linalg.svd(A, compute_uv=False)
    np.testing.assert_allclose(s[:6], ref[:6], rtol=1e-6)


def test_interval_rule_phase_refinement():
    coarse = interval_rule(SYM, 1)
    fine = interval_rule(SYM, 1, lam=mu_of_lambda(SYM, 400.0).lam)
    assert len(fine) > len(coarse)
    f = lambda x: solve_interval(SYM, 400.0, 1).phi(x)
    assert fine.integrate(f(fine.nodes)) == pytest.approx(
        integrate.quad(lambda x: float(f(x)), -1, -0.1, limit=400)[0]
        + fine.integrate(np.where(fine.nodes > -0.1, f(fine.nodes), 0.0)), rel=1e-8)


@pytest.mark.parametrize("mu", [1.0, 2.0, 4.0])
def test_quadrature_nu_matches_coefficient_route(mu):
    from adjfht.solve import nu_sigma

    d = nu_sigma(SYM, lambda_of_mu(SYM, mu))
    lam = d.sp.lam
    s1 = solve_interval(SYM, lam, 1)
    y = np.array([0.1, 0.3, 0.5])
    h = fht_apply(s1.phi, SYM, 1, y, rule=interval_rule(SYM, 1, lam=lam), edge=s1.edge("phi"))
    nu = h / solve_interval(SYM, lam, 2).phi(y)
    np.testing.assert_allclose(nu, d.nu_coefficient, rtol=1e-4)
