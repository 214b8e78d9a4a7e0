import math
import warnings

import numpy as np
import pytest
import sympy as sy
from hypothesis import given, settings
from hypothesis import strategies as st

from adjfht.errors import (
    BelowThresholdError,
    ConvergenceRadiusWarning,
    DomainError,
    ExponentCollisionError,
    GeometryError,
    ParameterError,
)
from adjfht.operator import (
    IntervalPair,
    apply_L,
    eval_PQ,
    frobenius_origin,
    frobenius_regular,
    lambda_of_mu,
    liouville_map,
    mu_of_lambda,
    potential_q,
)

SYM = IntervalPair(-1.0, 1.0)
ASYM = IntervalPair(-1.0, 2.0)

geometries = st.tuples(st.floats(-5.0, -0.2), st.floats(0.2, 5.0)).map(lambda t: IntervalPair(*t))


def liouville_closed_form(geom, x):
    """Antiderivative of 1/sqrt(-P) on I1 from a1, written with logarithms."""
    a1, a2 = geom.a1, geom.a2

    def G(t):
        return (math.sqrt(-a1) * math.sqrt(a2 - t) + math.sqrt(a2) * math.sqrt(t - a1)) ** 2 / abs(t)

    return (math.log(G(x)) - math.log(a2 - a1)) / math.sqrt(-a1 * a2)


def residual(geom, lam, series, x):
    y, d1, d2 = series.derivatives(x)
    P, Pp, Q = eval_PQ(geom, x)
    return abs(P * d2 + Pp * d1 + (Q - lam) * y) / abs(y)


@pytest.mark.parametrize("a1, a2", [(0.0, 1.0), (-1.0, 0.0), (1.0, 2.0), (-1.0, math.inf), (math.nan, 1.0)])
def test_geometry_rejected(a1, a2):
    with pytest.raises(GeometryError):
        IntervalPair(a1, a2)


def test_polynomials():
    assert SYM.P(-1.0) == 0.0
    assert ASYM.Q((ASYM.a1 + ASYM.a2) / 4) == 0.0
    assert SYM.P(-0.5) == pytest.approx(-0.1875, abs=1e-16)
    x = sy.symbols("x")
    P = (x + 1) * x ** 2 * (x - 2)
    for xv in (-0.7, 0.3, 1.9):
        assert float(ASYM.dP(xv)) == pytest.approx(float(sy.diff(P, x).subs(x, xv)), rel=1e-14)
        assert float(ASYM.d2P(xv)) == pytest.approx(float(sy.diff(P, x, 2).subs(x, xv)), rel=1e-14)


def test_derived_constants():
    assert SYM.lambda_min == 0.25 and ASYM.lambda_min == 0.625
    assert SYM.kappa == pytest.approx(-math.log(2.0), abs=1e-16)
    assert ASYM.inner_scale == 1.0 and ASYM.neg_product == 2.0
    assert SYM.is_symmetric and not ASYM.is_symmetric
    with pytest.raises(ParameterError):
        SYM.endpoint(3)


def test_taylor_coefficients_match_polynomials():
    p, q = ASYM.taylor_PQ(-1.0, lam=3.0)
    s = 0.137
    assert np.polynomial.polynomial.polyval(s, p) == pytest.approx(float(ASYM.P(-1.0 + s)), rel=1e-13)
    assert np.polynomial.polynomial.polyval(s, q) == pytest.approx(float(ASYM.Q(-1.0 + s)) - 3.0, rel=1e-13)


@pytest.mark.parametrize("geom, lam, mu", [(SYM, 0.25, 0.0), (SYM, 1.25, 1.0), (ASYM, 2.625, 1.0)])
def test_mu_of_lambda(geom, lam, mu):
    sp = mu_of_lambda(geom, lam)
    assert sp.mu == pytest.approx(mu, abs=1e-15)
    assert sp.eps == pytest.approx(lam ** -0.5)
    assert lambda_of_mu(geom, mu).lam == pytest.approx(lam, rel=1e-15)


def test_below_threshold():
    with pytest.raises(BelowThresholdError):
        mu_of_lambda(ASYM, 0.6)
    with pytest.raises(ParameterError):
        lambda_of_mu(ASYM, -1.0)


@given(geometries, st.floats(0.0, 100.0), st.floats(1e-6, 50.0))
@settings(max_examples=80, deadline=None)
def test_mu_monotone(geom, dl, step):
    lam = geom.lambda_min + dl
    assert mu_of_lambda(geom, lam + step).mu > mu_of_lambda(geom, lam).mu


@given(geometries, st.floats(0.001, 0.999), st.integers(1, 2))
@settings(max_examples=80, deadline=None)
def test_p_negative_inside(geom, frac, j):
    assert geom.P(frac * geom.endpoint(j)) < 0


def test_apply_L_simple_cases():
    x = np.array([-0.5, 0.3, 1.2])
    one = lambda t: (np.ones_like(t), np.zeros_like(t), np.zeros_like(t))
    np.testing.assert_array_equal(apply_L(ASYM, one, x), ASYM.Q(x))
    # f = x^2, cross-checked by symbolic expansion
    t = sy.symbols("t")
    P = (t + 1) * t ** 2 * (t - 1)
    Lf = sy.expand(sy.diff(P * sy.diff(t ** 2, t), t) + 2 * t ** 2 * t ** 2)
    sq = lambda s: (s * s, 2 * s, 2 * np.ones_like(s))
    assert float(apply_L(SYM, sq, 0.5)) == pytest.approx(float(Lf.subs(t, 0.5)), rel=1e-15)


def test_liouville_closed_form_and_limits():
    assert liouville_map(SYM, -0.3) == pytest.approx(liouville_closed_form(SYM, -0.3), abs=1e-12)
    for x in (-0.9, -0.5, -0.05, -1e-3):
        assert liouville_map(ASYM, x) == pytest.approx(liouville_closed_form(ASYM, x), abs=1e-12)
    # t + ln(-x) + kappa -> 0 with kappa = -ln 2 for the symmetric pair
    assert abs(liouville_map(SYM, -1e-6) + math.log(1e-6) - math.log(2.0)) < 1e-5
    assert liouville_map(SYM, -1.0 + 1e-12) < 1e-5
    # I2 is measured from a2; symmetric pair gives mirror images
    assert liouville_map(SYM, 0.3, 2) == pytest.approx(liouville_map(SYM, -0.3, 1), rel=1e-13)
    with pytest.raises(DomainError):
        liouville_map(SYM, 0.2, 1)


def test_liouville_increasing():
    x = -np.geomspace(0.99, 1e-8, 25)
    t = liouville_map(ASYM, x)
    assert np.all(np.diff(t) > 0)


def test_potential_limit_and_symmetry():
    assert potential_q(SYM, -1e-4) == pytest.approx(0.25, abs=1e-3)
    assert potential_q(SYM, -0.3) == pytest.approx(potential_q(SYM, 0.3), rel=1e-14)
    with pytest.raises(DomainError):
        potential_q(SYM, 0.0)


def test_liouville_normal_form():
    # F = (-P)^(1/4) y satisfies F_tt + (lam - q) F = 0 with d/dt = sqrt(-P) d/dx
    lam, x0, h = 5.0, -0.4, 1e-3
    sp = mu_of_lambda(SYM, lam)
    y = frobenius_origin(SYM, sp)[0]

    def F_and_Ft(x):
        v, d1, _ = y.derivatives(x)
        mP = -float(SYM.P(x))
        dmP = -float(SYM.dP(x))
        F = mP ** 0.25 * v
        Fx = 0.25 * mP ** -0.75 * dmP * v + mP ** 0.25 * d1
        return F, math.sqrt(mP) * Fx

    g = [F_and_Ft(x0 + k * h)[1] for k in (-2, -1, 1, 2)]
    Ftt = math.sqrt(-float(SYM.P(x0))) * (g[0] - 8 * g[1] + 8 * g[2] - g[3]) / (12 * h)
    F = F_and_Ft(x0)[0]
    assert abs(Ftt + (lam - potential_q(SYM, x0)) * F) <= 1e-6 * abs(lam * F)


def test_origin_series():
    sp = mu_of_lambda(SYM, 5.0)
    yp, ym = frobenius_origin(SYM, sp)
    assert yp.coeffs[0] == 1 and ym.coeffs[0] == 1
    assert residual(SYM, 5.0, yp, -0.01) <= 1e-10
    for x in (-0.3, -0.01, 0.2):
        assert yp(x) == pytest.approx(np.conj(ym(x)), rel=1e-14)
    with pytest.raises(ExponentCollisionError):
        frobenius_origin(SYM, mu_of_lambda(SYM, 0.25))


def test_origin_series_radius_warning():
    yp, _ = frobenius_origin(ASYM, mu_of_lambda(ASYM, 3.0))
    with pytest.warns(ConvergenceRadiusWarning):
        yp(-0.6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        yp(-0.4)


@pytest.mark.parametrize("geom", [SYM, ASYM])
@pytest.mark.parametrize("lam", [3.0, 50.0])
@pytest.mark.parametrize("j", [1, 2])
def test_regular_series(geom, lam, j):
    sp = mu_of_lambda(geom, lam)
    phi, theta = frobenius_regular(geom, sp, j)
    a = geom.endpoint(j)
    assert phi(a) == 1.0
    sign = -1.0 if j == 1 else 1.0
    x = a - sign * 0.1
    f, f1, _ = phi.derivatives(x)
    t, t1, _ = theta.derivatives(x)
    assert sign * float(geom.P(x)) * (t * f1 - t1 * f).real == pytest.approx(1.0, abs=1e-9)
    assert residual(geom, lam, phi, a - sign * 0.05) <= 1e-10
    assert residual(geom, lam, theta, a - sign * 0.05) <= 1e-10
    # P phi' -> 0 at the endpoint
    xe = a - sign * 1e-10
    assert abs(geom.P(xe) * phi.derivatives(xe)[1]) < 1e-8


@given(st.floats(0.7, 200.0), st.floats(0.02, 0.45))
@settings(max_examples=40, deadline=None)
def test_origin_residual_property(lam, frac):
    sp = mu_of_lambda(ASYM, lam)
    for y in frobenius_origin(ASYM, sp):
        for x in (-frac, frac):
            v, d1, d2 = y.derivatives(x)
            P, Pp, Q = eval_PQ(ASYM, x)
            scale = abs(P * d2) + abs(Pp * d1) + abs((Q - lam) * v)
            assert abs(P * d2 + Pp * d1 + (Q - lam) * v) <= 1e-9 * scale


def test_series_order_checked():
    sp = mu_of_lambda(SYM, 2.0)
    with pytest.raises(ParameterError):
        frobenius_origin(SYM, sp, order=2)
    with pytest.raises(ParameterError):
        frobenius_regular(SYM, sp, 1, order=2)
