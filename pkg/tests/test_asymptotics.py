import math

import numpy as np
import pytest

from adjfht.asymptotics import (
    in_wkb_window,
    inner_match_coefficients,
    nu_asymptotic,
    rho_sigma_asymptotic,
    wkb_eigenfunction,
    wkb_phase_near_zero,
)
from adjfht.errors import DomainError, ParameterError, WindowError
from adjfht.operator import IntervalPair, lambda_of_mu, liouville_map, mu_of_lambda
from adjfht.solve import nu_sigma, spectral_density
from adjfht.verify import wkb_sup_error

SYM = IntervalPair(-1.0, 1.0)
ASYM = IntervalPair(-1.0, 2.0)


@pytest.mark.parametrize("geom", [SYM, ASYM])
@pytest.mark.parametrize("j", [1, 2])
def test_wkb_error_decays_like_inverse_sqrt_lambda(geom, j):
    e1, e2 = wkb_sup_error(geom, 1600.0, j), wkb_sup_error(geom, 6400.0, j)
    assert e2 < e1 < 0.05
    assert 0.35 <= math.log(e1 / e2) / math.log(4.0) <= 0.65


def test_wkb_window():
    x = np.array([-0.99, -0.5, -1e-5, 0.5])
    np.testing.assert_array_equal(in_wkb_window(SYM, 1, x), [False, True, False, False])
    sp = mu_of_lambda(SYM, 100.0)
    with pytest.raises(WindowError):
        wkb_eigenfunction(SYM, sp, 1, -0.995)
    with pytest.raises(WindowError):
        wkb_eigenfunction(SYM, sp, 2, [0.5, 1e-6])
    assert isinstance(wkb_eigenfunction(SYM, sp, 2, 0.5), float)


def test_phase_near_zero():
    sp = mu_of_lambda(ASYM, 400.0)
    x = -np.array([1e-3, 1e-4, 1e-5])
    full = math.sqrt(sp.lam) * liouville_map(ASYM, x, 1)
    near = wkb_phase_near_zero(ASYM, sp, x)
    # the two phases differ by the constant mu ln|x| offset and O(sqrt(lam) |x|)
    d = full - near
    assert np.ptp(d) <= 2e-2 * abs(near[0])
    assert np.all(np.abs(np.diff(d)) < np.abs(np.diff(near)))


def test_plateau_values():
    sp = lambda_of_mu(ASYM, 8.0)
    ref = rho_sigma_asymptotic(ASYM, sp)
    assert ref.rho1 == pytest.approx(1 / 3) and ref.rho2 == pytest.approx(1 / 12)
    for j, r in ((1, ref.rho1), (2, ref.rho2)):
        assert 0.95 <= spectral_density(ASYM, sp, j).rho_prime / r <= 1.05
    # symmetric pair: 1/(2 a^3)
    assert rho_sigma_asymptotic(SYM, lambda_of_mu(SYM, 3.0)).rho1 == pytest.approx(0.5)


def test_sigma_constants():
    sp = lambda_of_mu(ASYM, 4.0)
    ch = math.cosh(4 * math.pi)
    ref = rho_sigma_asymptotic(ASYM, sp)
    assert ref.sigma_stated * ch == pytest.approx(-8.0)
    assert ref.sigma_recomputed * ch == pytest.approx(-2.0)
    stated, recomputed = nu_asymptotic(ASYM, sp)
    assert stated * ch == pytest.approx(-2.0) and recomputed * ch == pytest.approx(-0.5)
    # the computed sigma follows the recomputed constant, not the stated one
    d = nu_sigma(ASYM, sp)
    assert d.sigma == pytest.approx(ref.sigma_recomputed, rel=0.05)
    assert abs(d.sigma / ref.sigma_stated - 1) > 0.5


def test_inner_matching_converges():
    prev = math.inf
    for mu in (5.0, 10.0, 20.0, 40.0):
        cp, cm = inner_match_coefficients(ASYM, lambda_of_mu(ASYM, mu))
        assert abs(abs(cp) - 1) <= 1e-3 and abs(cm - cp.conjugate()) <= 1e-12
        err = abs(cp - 1)
        assert err < prev
        prev = err
    assert prev < 0.05


def test_inner_matching_errors():
    with pytest.raises(ParameterError):
        inner_match_coefficients(ASYM, lambda_of_mu(ASYM, 4.0))
    with pytest.raises(DomainError):
        inner_match_coefficients(ASYM, lambda_of_mu(ASYM, 6.0), c1=0.5, c2=0.1)


def test_sigma_reference_decay_and_symmetric_magnitude():
    s2 = rho_sigma_asymptotic(ASYM, lambda_of_mu(ASYM, 2.0)).sigma_recomputed
    s3 = rho_sigma_asymptotic(ASYM, lambda_of_mu(ASYM, 3.0)).sigma_recomputed
    assert s3 / s2 == pytest.approx(math.exp(-math.pi), rel=1e-3)
    sp = lambda_of_mu(SYM, 2.0)
    ref = rho_sigma_asymptotic(SYM, sp).sigma_recomputed
    assert abs(ref) == pytest.approx(1 / math.cosh(2 * math.pi))
    assert nu_sigma(SYM, sp).sigma == pytest.approx(ref, rel=1e-3)


def test_wkb_symmetric_error_bound():
    lam = 1600.0
    assert wkb_sup_error(SYM, lam, 2) <= 3 * lam ** -0.25
