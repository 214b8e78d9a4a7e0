"""Eigenfunctions, m-function, spectral density and nu/sigma for general intervals.

On each interval the endpoint-normalized pair (phi, theta) is started from
the Frobenius series at the regular endpoint, integrated towards 0 as the
first-order system (f, P f'), and matched at x_m against the origin basis
y+- = |x|^(-1/2 +- i mu) psi+-(x).  The matching gives

    phi = k y+ + k_ y-,      theta = l y+ + l_ y-,

from which Im m = -Im(l conj(k)) / |k|^2 and rho' = Im m / pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .errors import AccuracyError, ConsistencyError, DomainError, MatchingPointError
from .fht import EdgeBehavior, fht_apply, interval_rule
from .operator import (
    IntervalPair,
    SpectralPoint,
    _check_id,
    frobenius_origin,
    frobenius_regular,
    mu_of_lambda,
)

ODE_RTOL = 1e-11
START_FRACTION = 1e-3
MATCH_FRACTION = 0.05
MAX_COND = 1e6
DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class ConnectionData:
    """Coefficients of phi (k, k_minus) and theta (l, l_minus) in the basis y+, y-."""

    k: complex
    l: complex
    k_minus: complex
    l_minus: complex
    interval_id: int
    matching_x: float
    cond_number: float

    @property
    def im_m(self) -> float:
        return -(self.l * self.k.conjugate()).imag / abs(self.k) ** 2

    @property
    def conjugacy_defect(self) -> float:
        return abs(self.k - self.k_minus.conjugate()) / abs(self.k)


@dataclass(frozen=True)
class SpectralSample:
    sp: SpectralPoint
    im_m: float
    rho_prime: float
    interval_id: int


@dataclass(frozen=True)
class DiagonalValue:
    """nu with H1 phi1 = nu phi2, and sigma = nu rho1'/rho2'.

    ``nu`` is the quadrature value; ``nu_coefficient`` the value from the
    leading singular coefficients at 0.
    """

    sp: SpectralPoint
    nu: float
    sigma: float
    constancy_defect: float
    nu_coefficient: float
    nu_quadrature: float
    rho1: float
    rho2: float


class IntervalSolution:
    """phi and theta on one interval, pieced together from three representations.

    |x - a_j| <= d0: endpoint Frobenius series; between d0 and x_m: dense
    output of the ODE integration; |x| <= |x_m|: origin expansion with the
    fitted connection coefficients.
    """

    def __init__(self, geom: IntervalPair, sp: SpectralPoint, interval_id: int, *,
                 start_offset: float | None = None, matching_x: float | None = None,
                 rtol: float = ODE_RTOL, order: int = 40):
        _check_id(interval_id)
        if not sp.mu > 0.0:
            raise DomainError("eigenfunction machinery needs lambda > lambda_min")
        self.geom, self.sp, self.interval_id = geom, sp, interval_id
        self.sign = -1.0 if interval_id == 1 else 1.0  # sign of x on the interval
        a = geom.endpoint(interval_id)
        L = geom.length(interval_id)
        self.d0 = START_FRACTION * L if start_offset is None else float(start_offset)
        xm = self.sign * MATCH_FRACTION * geom.inner_scale if matching_x is None else float(matching_x)
        if not geom.contains(interval_id, xm) or abs(xm) > 0.5 * geom.inner_scale:
            raise MatchingPointError(f"matching point {xm} must lie in I{interval_id} within half the origin radius")
        self.x_start = a - self.sign * self.d0
        self.x_match = xm

        self.phi_series, self.theta_series = frobenius_regular(geom, sp, interval_id, order)
        self.origin = frobenius_origin(geom, sp, order)

        x0 = self.x_start
        P0 = float(geom.P(x0))
        f0 = self.phi_series.derivatives(x0)
        t0 = self.theta_series.derivatives(x0)
        y0 = np.array([f0[0].real, P0 * f0[1].real, t0[0].real, P0 * t0[1].real])
        lam = sp.lam

        def rhs(x, y):
            P = (x - geom.a1) * x * x * (x - geom.a2)
            c = lam - 2.0 * (x - (geom.a1 + geom.a2) / 4.0) ** 2
            return np.array([y[1] / P, c * y[0], y[3] / P, c * y[2]])

        sol = solve_ivp(rhs, (x0, xm), y0, method="DOP853", rtol=rtol, atol=1e-14,
                        dense_output=True)
        if sol.status != 0:
            raise MatchingPointError(
                f"integration towards x_m = {xm} failed at lambda = {lam}: {sol.message}"
            )
        self._ode = sol.sol
        w = self.sign * (sol.y[2] * sol.y[1] - sol.y[3] * sol.y[0])
        self.wronskian_drift = float(np.max(np.abs(w - 1.0)))
        if self.wronskian_drift > DRIFT_LIMIT:
            raise AccuracyError(
                f"Wronskian drift {self.wronskian_drift:.2e} on I{interval_id} at lambda = {lam}"
            )
        self.connection = self._match(sol.y[:, -1])

    def _match(self, end_state) -> ConnectionData:
        xm = self.x_match
        P = float(self.geom.P(xm))
        yp = self.origin[0].derivatives(xm)
        ym = self.origin[1].derivatives(xm)
        M = np.array([[yp[0], ym[0]], [P * yp[1], P * ym[1]]])
        scale = np.abs(M).max(axis=1, keepdims=True)
        Ms = M / scale
        cond = float(np.linalg.cond(Ms))
        if cond > MAX_COND:
            raise MatchingPointError(
                f"origin fit at x_m = {xm} is ill-conditioned (cond {cond:.1e}); move x_m"
            )
        rhs = np.array([[end_state[0], end_state[2]], [end_state[1], end_state[3]]]) / scale
        coef = np.linalg.solve(Ms, rhs.astype(complex))
        return ConnectionData(
            k=complex(coef[0, 0]), l=complex(coef[0, 1]),
            k_minus=complex(coef[1, 0]), l_minus=complex(coef[1, 1]),
            interval_id=self.interval_id, matching_x=xm, cond_number=cond,
        )

    def evaluate(self, x, which: str = "phi"):
        """(f, P f') at x for f = phi or theta."""
        if which not in ("phi", "theta"):
            raise ValueError("which must be 'phi' or 'theta'")
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if not np.all(self.geom.contains(self.interval_id, xs)):
            raise DomainError(f"x outside I{self.interval_id}")
        val = np.empty(xs.shape)
        flux = np.empty(xs.shape)
        a = self.geom.endpoint(self.interval_id)
        near = np.abs(xs - a) <= self.d0
        inner = np.abs(xs) <= abs(self.x_match)
        mid = ~(near | inner)
        P = self.geom.P(xs)
        if near.any():
            series = self.phi_series if which == "phi" else self.theta_series
            f, f1, _ = series.derivatives(xs[near])
            val[near] = f.real
            flux[near] = P[near] * f1.real
        if mid.any():
            state = self._ode(xs[mid])
            i = 0 if which == "phi" else 2
            val[mid] = state[i]
            flux[mid] = state[i + 1]
        if inner.any():
            c = self.connection
            cp, cm = (c.k, c.k_minus) if which == "phi" else (c.l, c.l_minus)
            yp = self.origin[0].derivatives(xs[inner])
            ym = self.origin[1].derivatives(xs[inner])
            val[inner] = (cp * yp[0] + cm * ym[0]).real
            flux[inner] = P[inner] * (cp * yp[1] + cm * ym[1]).real
        if np.ndim(x) == 0:
            return float(val[0]), float(flux[0])
        return val, flux

    def phi(self, x):
        return self.evaluate(x, "phi")[0]

    def theta(self, x):
        return self.evaluate(x, "theta")[0]

    def edge(self, which: str = "phi") -> EdgeBehavior:
        c = self.connection
        if which == "phi":
            return EdgeBehavior(self.sp.mu, c.k, c.k_minus)
        return EdgeBehavior(self.sp.mu, c.l, c.l_minus)

    def wronskian(self, x):
        """-P W(theta, phi) on I1, P W(theta, phi) on I2 (should equal 1)."""
        f, fp = self.evaluate(x, "phi")
        t, tp = self.evaluate(x, "theta")
        return self.sign * (t * fp - tp * f)


@lru_cache(maxsize=512)
def solve_interval(geom: IntervalPair, lam: float, interval_id: int,
                   matching_x: float | None = None, rtol: float = ODE_RTOL) -> IntervalSolution:
    """Cached :class:`IntervalSolution` for (geometry, lambda, interval)."""
    return IntervalSolution(geom, mu_of_lambda(geom, lam), interval_id,
                            matching_x=matching_x, rtol=rtol)


@dataclass(frozen=True, eq=False)
class Solution:
    """Handle for phi or theta on one interval: value, derivative and flux P f'."""

    handle: IntervalSolution
    which: str

    def __call__(self, x):
        return self.handle.evaluate(x, self.which)[0]

    def flux(self, x):
        return self.handle.evaluate(x, self.which)[1]

    def derivative(self, x):
        return self.flux(x) / self.handle.geom.P(x)


def integrate_solution(geom: IntervalPair, sp: SpectralPoint, interval_id: int,
                       which: str = "phi") -> Solution:
    if which not in ("phi", "theta"):
        raise ValueError("which must be 'phi' or 'theta'")
    return Solution(solve_interval(geom, sp.lam, interval_id), which)


def connection_coefficients(geom: IntervalPair, sp: SpectralPoint, interval_id: int,
                            matching_x: float | None = None) -> ConnectionData:
    return solve_interval(geom, sp.lam, interval_id, matching_x).connection


def spectral_density(geom: IntervalPair, sp: SpectralPoint, interval_id: int) -> SpectralSample:
    """Im m and rho' = Im m / pi on I_j."""
    im_m = connection_coefficients(geom, sp, interval_id).im_m
    return SpectralSample(sp, im_m, im_m / math.pi, interval_id)


def wronskian_audit(geom: IntervalPair, sp: SpectralPoint, interval_id: int, x_probe) -> float:
    """max |(-+)P W(theta, phi) - 1| over the probes."""
    w = solve_interval(geom, sp.lam, interval_id).wronskian(np.asarray(x_probe, dtype=float))
    return float(np.max(np.abs(w - 1.0)))


def endpoint_wronskian(geom: IntervalPair, lam_theta: float, lam_phi: float, interval_id: int,
                       offset: float = 1e-9) -> float:
    """(-+)P W(theta(., lam_theta), phi(., lam_phi)) at distance ``offset`` from a_j."""
    phi = frobenius_regular(geom, mu_of_lambda(geom, lam_phi), interval_id)[0]
    theta = frobenius_regular(geom, mu_of_lambda(geom, lam_theta), interval_id)[1]
    sign = -1.0 if interval_id == 1 else 1.0
    x = geom.endpoint(interval_id) - sign * offset
    f, f1, _ = phi.derivatives(x)
    t, t1, _ = theta.derivatives(x)
    return float(sign * geom.P(x) * (t * f1 - t1 * f).real)


def default_y_grid(geom: IntervalPair, n: int = 16) -> np.ndarray:
    return np.linspace(0.05, 0.8, n) * geom.a2


def nu_sigma(geom: IntervalPair, sp: SpectralPoint, *, y_grid=None, check: bool = True,
             tolerance: float = 1e-3) -> DiagonalValue:
    """nu(lam) by two routes, and sigma = nu rho1'/rho2'.

    Coefficient route: nu = -(k1/k2)/cosh(mu pi) from the y+ coefficients of
    phi1 and phi2.  Quadrature route: least-squares constant fit of
    (H1 phi1)(y) against phi2(y) on ``y_grid``.  The constancy defect is the
    largest relative deviation of the pointwise ratio from the fit, taken
    over grid points where |phi2| is at least a tenth of its maximum (the
    ratio is 0/0-like near zeros of phi2).
    """
    s1 = solve_interval(geom, sp.lam, 1)
    s2 = solve_interval(geom, sp.lam, 2)
    c1, c2 = s1.connection, s2.connection
    nu_c = -(c1.k / c2.k) / math.cosh(math.pi * sp.mu)

    y = default_y_grid(geom) if y_grid is None else np.asarray(y_grid, dtype=float)
    rule = interval_rule(geom, 1, lam=sp.lam)
    h = fht_apply(s1.phi, geom, 1, y, rule=rule, edge=s1.edge("phi"))
    p2 = s2.phi(y)
    nu_q = float(np.dot(h, p2) / np.dot(p2, p2))
    keep = np.abs(p2) >= 0.1 * np.max(np.abs(p2))
    defect = float(np.max(np.abs(h[keep] / p2[keep] - nu_q)) / abs(nu_q))

    rho1 = c1.im_m / math.pi
    rho2 = c2.im_m / math.pi
    if check and abs(nu_q - nu_c.real) > tolerance * abs(nu_c):
        raise ConsistencyError(
            f"nu routes disagree at lambda = {sp.lam}: quadrature {nu_q:.10e}, "
            f"coefficient {nu_c.real:.10e}"
        )
    return DiagonalValue(sp, nu_q, nu_q * rho1 / rho2, defect, float(nu_c.real), nu_q, rho1, rho2)
