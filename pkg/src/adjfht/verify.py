"""Invariant suite behind ``adjfht verify``.

Each check measures one number and compares it with a tolerance.  A check
passes when ``|value - target| <= tolerance * scale``; the scale exists so
that the suite itself can be exercised with impossible tolerances.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import specfun
from .asymptotics import rho_sigma_asymptotic, wkb_eigenfunction
from .fht import (
    commutation_residual,
    discretized_svd,
    fht_apply,
    halfline_power_fht,
    svd_tail_fit,
)
from .operator import (
    IntervalPair,
    apply_L,
    frobenius_origin,
    frobenius_regular,
    lambda_of_mu,
    liouville_map,
    mu_of_lambda,
)
from .solve import nu_sigma, solve_interval
from .symmetric import SymmetricGeometry, phi_sym, rho_sym
from .transform import make_spectral_grid, plancherel

SYM = IntervalPair(-1.0, 1.0)
ASYM = IntervalPair(-1.0, 2.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    target: float
    tolerance: float
    passed: bool
    seconds: float


def _cubic(geom):
    a1 = geom.a1

    def f(x):
        x = np.asarray(x, dtype=float)
        return x * x * (x - a1), 3 * x * x - 2 * a1 * x, 6 * x - 2 * a1

    return f


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.abs(np.asarray(b))))


# each check returns (value, target, tolerance)

def check_gamma_schwarz():
    zs = [complex(x, y) for x in (-3.3, 0.2, 1.5, 7.0) for y in (0.5, 3.0, 20.0)]
    worst = 0.0
    for z in zs:
        g = specfun.complex_gamma(z)
        worst = max(worst, abs(specfun.complex_gamma(z.conjugate()) - g.conjugate()) / abs(g))
        d = specfun.complex_digamma(z)
        worst = max(worst, abs(specfun.complex_digamma(z.conjugate()) - d.conjugate()) / abs(d))
    return worst, 0.0, 1e-14


def check_k_identity():
    mu = np.geomspace(0.1, 30.0, 15)
    k2 = np.array([abs(specfun.coefficient_k(m)) ** 2 for m in mu])
    return _rel(k2, 1.0 / (np.tanh(math.pi * mu) * 2 * math.pi * mu)), 0.0, 1e-10


def check_hyp2f1_routes():
    """Route disagreement at z = 0.9 in units of eps * (cond_i + cond_j)."""
    eps = np.finfo(float).eps
    worst = 0.0
    for mu in (0.5, 3.0, 12.0):
        a, b = 0.25 + 0.5j * mu, 0.75 + 0.5j * mu
        for c in (1.0, 1.0 + 1j * mu):
            routes = [specfun._series_scalar(a, b, c, 0.9, specfun.DEFAULT_MAX_TERMS),
                      specfun._quadratic(a, b, c, 0.9, specfun.DEFAULT_MAX_TERMS)]
            if c == 1.0:  # c - a - b = -i mu is not an integer
                routes.append(specfun._connection(a, b, c, 0.9, specfun.DEFAULT_MAX_TERMS))
            for i, (vi, ci) in enumerate(routes):
                for vj, cj in routes[i + 1:]:
                    worst = max(worst, abs(vi - vj) / (abs(vi) * eps * (ci + cj)))
    return worst, 0.0, 100.0


def check_p_negative():
    worst = -math.inf
    for geom in (SYM, ASYM):
        for j in (1, 2):
            a = geom.endpoint(j)
            x = a * np.linspace(1e-6, 1 - 1e-6, 2001)
            worst = max(worst, float(np.max(geom.P(x))))
    # passes when max P < 0; reported as a margin below zero
    return max(worst, 0.0), 0.0, 0.0


def check_mu_monotone():
    lam = ASYM.lambda_min + np.geomspace(1e-6, 1e4, 200)
    mu = np.array([mu_of_lambda(ASYM, l).mu for l in lam])
    return max(0.0, -float(np.min(np.diff(mu)))), 0.0, 0.0


def check_frobenius_residual():
    worst = 0.0
    for geom in (SYM, ASYM):
        sp = lambda_of_mu(geom, 3.0)
        series = list(frobenius_origin(geom, sp))
        for j in (1, 2):
            series += list(frobenius_regular(geom, sp, j))
        for s in series:
            x = s.center + 0.25 * s.radius * (1.0 if s.center < 0 else -1.0)
            y, d1, d2 = s.derivatives(x)
            P, dP, Q = geom.P(x), geom.dP(x), geom.Q(x)
            res = P * d2 + dP * d1 + (Q - sp.lam) * y
            scale = abs(P * d2) + abs(dP * d1) + abs((Q - sp.lam) * y)
            worst = max(worst, abs(res) / scale)
    return worst, 0.0, 1e-9


def check_liouville_derivative():
    worst = 0.0
    for j, xs in ((1, (-0.7, -0.3, -0.05)), (2, (0.1, 0.9, 1.6))):
        for x in xs:
            h = 1e-4 * abs(x)
            t = liouville_map(ASYM, np.array([x - h, x + h]), j)
            fd = abs(t[1] - t[0]) / (2 * h)
            exact = 1.0 / math.sqrt(-ASYM.P(x))
            worst = max(worst, abs(fd - exact) / exact)
    return worst, 0.0, 1e-6


def check_matching_independence():
    worst = 0.0
    for lam in (2.0, 30.0):
        for j in (1, 2):
            base = solve_interval(ASYM, lam, j).connection.im_m
            xm = (-1 if j == 1 else 1) * 0.2 * ASYM.inner_scale
            other = solve_interval(ASYM, lam, j, matching_x=xm).connection.im_m
            worst = max(worst, abs(other - base) / abs(base))
    return worst, 0.0, 1e-6


def check_wronskian():
    worst = 0.0
    for geom in (SYM, ASYM):
        for lam in (2.0, 5.0):
            for j in (1, 2):
                a = geom.endpoint(j)
                x = a * np.linspace(0.02, 0.98, 10)
                w = solve_interval(geom, lam, j).wronskian(x)
                worst = max(worst, float(np.max(np.abs(w - 1.0))))
    return worst, 0.0, 1e-8


def check_im_m_positive():
    lows = []
    for lam in ASYM.lambda_min + np.geomspace(0.01, 100.0, 12):
        for j in (1, 2):
            lows.append(solve_interval(ASYM, float(lam), j).connection.im_m)
    return max(0.0, -min(lows)), 0.0, 0.0


def check_symmetric_density():
    g = SymmetricGeometry(1.0)
    worst = 0.0
    for lam in (1.0, 2.0, 5.0, 25.0):
        exact = rho_sym(g, lam)
        for j in (1, 2):
            num = solve_interval(SYM, lam, j).connection.im_m / math.pi
            worst = max(worst, abs(num - exact) / exact)
    return worst, 0.0, 1e-6


def check_symmetric_eigenfunctions():
    g = SymmetricGeometry(1.0)
    x = np.linspace(0.02, 0.98, 25)
    worst = 0.0
    for lam in (1.0, 5.0, 40.0):
        ref = phi_sym(g, lam, x)
        s1, s2 = solve_interval(SYM, lam, 1), solve_interval(SYM, lam, 2)
        scale = np.max(np.abs(ref))
        worst = max(worst, float(np.max(np.abs(s2.phi(x) - ref))) / scale,
                    float(np.max(np.abs(s1.phi(-x) - ref))) / scale)
    return worst, 0.0, 1e-8


def check_eigen_residual():
    g = SymmetricGeometry(1.0)
    lam = 7.0
    x = np.linspace(0.1, 0.9, 9)
    h = 1e-3

    def f(t):
        v = [phi_sym(g, lam, t + k * h) for k in (-2, -1, 0, 1, 2)]
        d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
        d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)
        return v[2], d1, d2

    lf = apply_L(SYM, f, x)
    ref = lam * phi_sym(g, lam, x)
    return float(np.max(np.abs(lf - ref)) / np.max(np.abs(ref))), 0.0, 1e-6


def check_fht_constant():
    y = np.array([1e-3, 0.05, 0.5, 1.9])
    h = fht_apply(lambda x: np.ones_like(x), ASYM, 1, y)
    exact = np.log(y / (y - ASYM.a1)) / math.pi
    return _rel(h, exact), 0.0, 1e-12


def check_halfline_identity():
    worst = 0.0
    for mu in (0.0, 2.0):
        for y in (0.25, 0.3):
            val = halfline_power_fht(mu, y)
            exact = -y ** complex(-0.5, mu) / math.cosh(math.pi * mu)
            worst = max(worst, abs(val - exact) / abs(exact))
    return worst, 0.0, 1e-8


def check_commutation():
    worst = 0.0
    for geom in (SYM, ASYM):
        y = geom.a2 * np.array([0.1, 0.3, 0.5, 0.7, 0.9])
        worst = max(worst, commutation_residual(geom, _cubic(geom), y))
    return worst, 0.0, 1e-6


def check_nu_routes():
    worst = 0.0
    for mu in (1.0, 2.0, 4.0):
        d = nu_sigma(SYM, lambda_of_mu(SYM, mu), check=False)
        worst = max(worst, abs(d.nu_quadrature - d.nu_coefficient) / abs(d.nu_coefficient))
    return worst, 0.0, 1e-3


def check_constancy():
    worst = 0.0
    for mu in (1.0, 2.0, 4.0):
        worst = max(worst, nu_sigma(SYM, lambda_of_mu(SYM, mu)).constancy_defect)
    return worst, 0.0, 1e-4


def check_decay_rate():
    mu = np.linspace(1.0, 6.0, 11)
    nu = [nu_sigma(SYM, lambda_of_mu(SYM, m)).nu for m in mu]
    slope = np.polyfit(mu, np.log(np.abs(nu)), 1)[0]
    return abs(slope / -math.pi - 1.0), 0.0, 0.01


def check_density_plateau():
    sp = lambda_of_mu(ASYM, 8.0)
    ref = rho_sigma_asymptotic(ASYM, sp)
    r1 = solve_interval(ASYM, sp.lam, 1).connection.im_m / math.pi
    r2 = solve_interval(ASYM, sp.lam, 2).connection.im_m / math.pi
    return max(abs(r1 / ref.rho1 - 1.0), abs(r2 / ref.rho2 - 1.0)), 0.0, 0.05


def wkb_sup_error(geom, lam, interval_id=2, lo=0.2, hi=0.8, n=400):
    """Sup-norm relative error of the WKB eigenfunction on [lo, hi] * a_j."""
    x = geom.endpoint(interval_id) * np.linspace(lo, hi, n)
    sp = mu_of_lambda(geom, lam)
    ref = solve_interval(geom, lam, interval_id).phi(x)
    approx = wkb_eigenfunction(geom, sp, interval_id, x)
    return float(np.max(np.abs(approx - ref)) / np.max(np.abs(ref)))


def check_wkb_rate():
    e1, e2 = wkb_sup_error(SYM, 1600.0), wkb_sup_error(SYM, 6400.0)
    rate = math.log(e1 / e2) / math.log(4.0)
    return rate, 0.5, 0.15


def check_plancherel():
    f = lambda x: _cubic(ASYM)(x)[0]
    grid = make_spectral_grid(ASYM, 6.0)
    return plancherel(ASYM, 1, f, grid).defect, 0.0, 0.02


def check_svd():
    s = discretized_svd(SYM, 200)
    ok = bool(np.all(np.diff(s) < 0) and s[0] < 1 and s[-1] > 0)
    r2 = svd_tail_fit(s)[0]
    return (1.0 - r2) if ok else math.inf, 0.0, 0.01


CHECKS = (
    ("specfun: conjugate symmetry of gamma/digamma", check_gamma_schwarz),
    ("specfun: |k|^2 = coth(pi mu)/(2 pi mu)", check_k_identity),
    ("specfun: 2F1 routes agree at z = 0.9 (units of eps*cond)", check_hyp2f1_routes),
    ("operator: P < 0 on both intervals", check_p_negative),
    ("operator: mu increasing in lambda", check_mu_monotone),
    ("operator: Frobenius residual at a quarter radius", check_frobenius_residual),
    ("operator: Liouville map derivative", check_liouville_derivative),
    ("solve: matching-point independence of Im m", check_matching_independence),
    ("solve: Wronskian normalization", check_wronskian),
    ("solve: Im m > 0 on the continuous spectrum", check_im_m_positive),
    ("solve: rho' vs symmetric closed form", check_symmetric_density),
    ("symmetric: closed-form vs numeric phi on both sides", check_symmetric_eigenfunctions),
    ("symmetric: L phi = lam phi", check_eigen_residual),
    ("fht: H1 of a constant", check_fht_constant),
    ("fht: half-line power identity", check_halfline_identity),
    ("fht: commutation residual", check_commutation),
    ("solve: nu quadrature vs coefficient route", check_nu_routes),
    ("solve: constancy of H1 phi1 / phi2", check_constancy),
    ("solve: ln|nu| slope vs -pi (relative)", check_decay_rate),
    ("asymptotics: rho' plateaus at mu = 8", check_density_plateau),
    ("asymptotics: WKB convergence exponent", check_wkb_rate),
    ("transform: Plancherel defect", check_plancherel),
    ("fht: discretized SVD shape and tail fit (1 - R^2)", check_svd),
)


def run_suite(tolerance_scale: float = 1.0, checks=CHECKS) -> list[CheckResult]:
    out = []
    for name, fn in checks:
        t0 = time.perf_counter()
        value, target, tol = fn()
        ok = bool(abs(value - target) <= tol * tolerance_scale)
        out.append(CheckResult(name, float(value), target, tol * tolerance_scale, ok,
                               time.perf_counter() - t0))
    return out


def format_table(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'value':>12}  {'target':>8}  {'tol':>9}  result"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {r.value:12.4e}  {r.target:8.3g}  {r.tolerance:9.2e}  "
                     f"{'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines)
