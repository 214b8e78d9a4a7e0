"""The differential operator L f = (P f')' + Q f and its local solutions.

P(x) = (x - a1) x^2 (x - a2) and Q(x) = 2 (x - (a1 + a2)/4)^2 on the
adjacent intervals I1 = (a1, 0) and I2 = (0, a2).  The endpoints a1, a2 are
regular singular points with a double indicial root 0; the origin has
exponents -1/2 +- i mu.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from .errors import (
    BelowThresholdError,
    ConvergenceRadiusWarning,
    DomainError,
    ExponentCollisionError,
    GeometryError,
    ParameterError,
)


@dataclass(frozen=True)
class IntervalPair:
    """Geometry a1 < 0 < a2 of the two intervals I1 = (a1, 0), I2 = (0, a2)."""

    a1: float
    a2: float

    def __post_init__(self):
        a1, a2 = float(self.a1), float(self.a2)
        if not (math.isfinite(a1) and math.isfinite(a2)) or not (a1 < 0.0 < a2):
            raise GeometryError(f"need a1 < 0 < a2, got a1={self.a1}, a2={self.a2}")
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)

    @property
    def lambda_min(self) -> float:
        """Bottom of the continuous spectrum, (a1^2 + a2^2)/8."""
        return (self.a1 ** 2 + self.a2 ** 2) / 8.0

    @property
    def kappa(self) -> float:
        """Constant in the logarithmic phase near 0: ln((a2-a1)/(-4 a1 a2))."""
        return math.log((self.a2 - self.a1) / (-4.0 * self.a1 * self.a2))

    @property
    def neg_product(self) -> float:
        return -self.a1 * self.a2

    @property
    def is_symmetric(self) -> bool:
        return self.a1 == -self.a2

    @property
    def inner_scale(self) -> float:
        """min(|a1|, a2): distance from 0 to the nearest regular endpoint."""
        return min(-self.a1, self.a2)

    def endpoint(self, interval_id: int) -> float:
        return self.a1 if _check_id(interval_id) == 1 else self.a2

    def length(self, interval_id: int) -> float:
        return abs(self.endpoint(interval_id))

    def contains(self, interval_id: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if _check_id(interval_id) == 1:
            return (x > self.a1) & (x < 0.0)
        return (x > 0.0) & (x < self.a2)

    @cached_property
    def P_poly(self) -> Polynomial:
        return Polynomial.fromroots([self.a1, 0.0, 0.0, self.a2])

    @cached_property
    def Q_poly(self) -> Polynomial:
        c = (self.a1 + self.a2) / 4.0
        return 2.0 * Polynomial([-c, 1.0]) ** 2

    def P(self, x):
        x = np.asarray(x, dtype=float)
        return (x - self.a1) * x * x * (x - self.a2)

    def dP(self, x):
        return self.P_poly.deriv()(np.asarray(x, dtype=float))

    def d2P(self, x):
        return self.P_poly.deriv(2)(np.asarray(x, dtype=float))

    def Q(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * (x - (self.a1 + self.a2) / 4.0) ** 2

    def taylor_PQ(self, center: float, lam: float = 0.0):
        """Taylor coefficients of P and Q - lam about ``center``."""
        shift = Polynomial([center, 1.0])
        p = self.P_poly(shift).coef
        q = (self.Q_poly - lam)(shift).coef
        return np.pad(p, (0, 5 - len(p))), np.pad(q, (0, 3 - len(q)))


def _check_id(interval_id: int) -> int:
    if interval_id not in (1, 2):
        raise ParameterError(f"interval_id must be 1 or 2, got {interval_id!r}")
    return interval_id


@dataclass(frozen=True)
class SpectralPoint:
    """Spectral parameter lam with mu(lam) and eps = lam^(-1/2)."""

    lam: float
    mu: float
    eps: float


def mu_of_lambda(geom: IntervalPair, lam: float) -> SpectralPoint:
    lam = float(lam)
    lmin = geom.lambda_min
    if not lam >= lmin:
        raise BelowThresholdError(f"lambda = {lam} is below lambda_min = {lmin}")
    mu = math.sqrt((lam - lmin) / geom.neg_product)
    return SpectralPoint(lam, mu, lam ** -0.5)


def lambda_of_mu(geom: IntervalPair, mu: float) -> SpectralPoint:
    mu = float(mu)
    if mu < 0:
        raise ParameterError("mu must be non-negative")
    lam = geom.lambda_min + geom.neg_product * mu * mu
    return SpectralPoint(lam, mu, lam ** -0.5)


def eval_PQ(geom: IntervalPair, x):
    """P(x), P'(x), Q(x)."""
    return geom.P(x), geom.dP(x), geom.Q(x)


def apply_L(geom: IntervalPair, f, x):
    """L f at x, where ``f(x)`` returns (f, f', f'')."""
    v, d1, d2 = f(x)
    P, Pp, Q = eval_PQ(geom, x)
    return P * d2 + Pp * d1 + Q * v


def _phase_integral_scalar(geom: IntervalPair, x: float, interval_id: int) -> float:
    """int from the regular endpoint to x of ds / sqrt(-P(s))."""
    a = geom.endpoint(interval_id)
    sgn = -1.0 if interval_id == 1 else 1.0  # direction from 0 towards a
    mid = 0.5 * a
    opts = dict(epsabs=1e-15, epsrel=1e-13, limit=200)

    def endpoint_part(u):
        # s = a - sgn u^2, ds = 2u du, -P = u^2 s^2 |s - a_other|
        s = a - sgn * u * u
        other = geom.a2 if interval_id == 1 else geom.a1
        return 2.0 / (abs(s) * math.sqrt(abs(s - other)))

    def log_part(v):
        # s = sgn e^v, ds = s dv
        s = sgn * math.exp(v)
        return abs(s) / math.sqrt(-geom.P(s))

    if abs(x) >= abs(mid):
        u = math.sqrt(abs(x - a))
        return integrate.quad(endpoint_part, 0.0, u, **opts)[0]
    u_mid = math.sqrt(abs(mid - a))
    head = integrate.quad(endpoint_part, 0.0, u_mid, **opts)[0]
    tail = integrate.quad(log_part, math.log(abs(x)), math.log(abs(mid)), **opts)[0]
    return head + tail


def liouville_map(geom: IntervalPair, x, interval_id: int = 1):
    """Liouville variable t(x) = int ds / sqrt(-P(s)) measured from the regular endpoint.

    On I1 the integral runs from a1 to x; on I2 from x to a2, so t >= 0 on
    both intervals and t -> infinity as x -> 0.
    """
    _check_id(interval_id)
    xs = np.asarray(x, dtype=float)
    if not np.all(geom.contains(interval_id, xs)):
        raise DomainError(f"liouville_map: x outside interval I{interval_id}")
    out = np.array([_phase_integral_scalar(geom, float(v), interval_id) for v in xs.ravel()])
    out = out.reshape(xs.shape)
    return float(out) if np.ndim(x) == 0 else out


def potential_q(geom: IntervalPair, x):
    """Potential of the Liouville normal form, q = Q + P'^2/(16 P) - P''/4."""
    xs = np.asarray(x, dtype=float)
    inside = geom.contains(1, xs) | geom.contains(2, xs)
    if not np.all(inside):
        raise DomainError("potential_q: x must lie inside (a1, 0) or (0, a2)")
    P, Pp, Q = eval_PQ(geom, xs)
    return Q + Pp ** 2 / (16.0 * P) - geom.d2P(xs) / 4.0


@dataclass(frozen=True, eq=False)
class FrobeniusSeries:
    """Truncated Frobenius solution about a singular point.

    y(x) = |s|^r (sum_n coeffs[n] s^n + ln|s| sum_n log_coeffs[n] s^n),
    s = x - center.  ``exponents`` holds the indicial pair at the center and
    ``exponent`` the root r used by this solution.
    """

    center: float
    exponents: tuple
    exponent: complex
    coeffs: np.ndarray
    log_coeffs: np.ndarray | None
    order: int
    radius: float

    def _check_radius(self, s):
        if np.any(np.abs(s) > 0.5 * self.radius):
            warnings.warn(
                f"Frobenius series about {self.center} evaluated beyond half its radius",
                ConvergenceRadiusWarning,
                stacklevel=3,
            )

    def derivatives(self, x):
        """Return (y, y', y'') at x (complex arrays, or complex scalars)."""
        s = np.asarray(x, dtype=float) - self.center
        self._check_radius(s)
        c = self.coeffs
        g = np.polynomial.polynomial.polyval(s, c)
        g1 = np.polynomial.polynomial.polyval(s, _deriv(c))
        g2 = np.polynomial.polynomial.polyval(s, _deriv(_deriv(c)))
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(np.abs(s))
            if self.log_coeffs is not None:
                h = np.polynomial.polynomial.polyval(s, self.log_coeffs)
                h1 = np.polynomial.polynomial.polyval(s, _deriv(self.log_coeffs))
                h2 = np.polynomial.polynomial.polyval(s, _deriv(_deriv(self.log_coeffs)))
                w = g + logs * h
                w1 = g1 + logs * h1 + h / s
                w2 = g2 + logs * h2 + 2.0 * h1 / s - h / s ** 2
            else:
                w, w1, w2 = g, g1, g2
            r = self.exponent
            if r == 0:
                y, y1, y2 = w, w1, w2
            else:
                pw = np.exp(r * logs)
                y = pw * w
                y1 = pw * (r * w / s + w1)
                y2 = pw * (r * (r - 1.0) * w / s ** 2 + 2.0 * r * w1 / s + w2)
        if np.ndim(x) == 0:
            return complex(y), complex(y1), complex(y2)
        return y, y1, y2

    def __call__(self, x):
        return self.derivatives(x)[0]


def _deriv(c):
    if len(c) <= 1:
        return np.zeros(1, dtype=c.dtype)
    return c[1:] * np.arange(1, len(c))


def _recurrence(p, q, m0, r, order, with_derivative=False):
    """Frobenius coefficients c_n(r), and optionally dc_n/dr, with c_0 = 1.

    Coefficient of s^(n+r+m0-2) in L[y] - lam y is

        c_n D(n) + sum_{k<n} c_k A(n, k) = 0,
        D(n)    = p_{m0} (n+r)(n+r+m0-1) + q_{m0-2},
        A(n, k) = p_{n+m0-k} (k+r)(n+r+m0-1) + q_{n+m0-2-k},

    where p, q are Taylor coefficients of P and Q - lam about the center.
    """
    def pk(i):
        return p[i] if 0 <= i < len(p) else 0.0

    def qk(i):
        return q[i] if 0 <= i < len(q) else 0.0

    c = np.zeros(order + 1, dtype=complex)
    d = np.zeros(order + 1, dtype=complex)
    c[0] = 1.0
    for n in range(1, order + 1):
        D = pk(m0) * (n + r) * (n + r + m0 - 1) + qk(m0 - 2)
        dD = pk(m0) * (2 * (n + r) + m0 - 1)
        rhs = 0.0j
        drhs = 0.0j
        for k in range(max(0, n - 4), n):
            pi = pk(n + m0 - k)
            A = pi * (k + r) * (n + r + m0 - 1) + qk(n + m0 - 2 - k)
            dA = pi * ((n + r + m0 - 1) + (k + r))
            rhs -= c[k] * A
            drhs -= d[k] * A + c[k] * dA
        c[n] = rhs / D
        d[n] = (drhs - c[n] * dD) / D
    return (c, d) if with_derivative else c


def frobenius_origin(geom: IntervalPair, sp: SpectralPoint, order: int = 40):
    """Origin solutions y+- = |x|^(-1/2 +- i mu) psi+-(x), psi+-(0) = 1.

    The same coefficients serve both sides of 0: on I1 the power is
    (-x)^(-1/2 +- i mu), on I2 it is x^(-1/2 +- i mu).
    """
    if order < 4:
        raise ParameterError("order must be at least 4")
    if sp.mu == 0.0:
        raise ExponentCollisionError("origin exponents coincide at mu = 0")
    p, q = geom.taylor_PQ(0.0, sp.lam)
    rp = complex(-0.5, sp.mu)
    rm = complex(-0.5, -sp.mu)
    out = []
    for r in (rp, rm):
        c = _recurrence(p, q, 2, r, order)
        out.append(FrobeniusSeries(0.0, (rp, rm), r, c, None, order, geom.inner_scale))
    return tuple(out)


def frobenius_regular(geom: IntervalPair, sp: SpectralPoint, interval_id: int, order: int = 40):
    """Endpoint solutions (phi, theta) at a_j.

    phi is analytic with phi(a_j) = 1.  theta = C (phi ln|x - a_j| + psi)
    with psi(a_j) = 0 and C chosen so that -P W(theta, phi) = 1 on I1 and
    P W(theta, phi) = 1 on I2.
    """
    if order < 4:
        raise ParameterError("order must be at least 4")
    a = geom.endpoint(interval_id)
    p, q = geom.taylor_PQ(a, sp.lam)
    c, d = _recurrence(p, q, 1, 0.0, order, with_derivative=True)
    c = c.real.astype(float)
    d = d.real.astype(float)
    scale = 1.0 / p[1] if interval_id == 1 else -1.0 / p[1]
    radius = abs(a)
    phi = FrobeniusSeries(a, (0j, 0j), 0j, c, None, order, radius)
    theta = FrobeniusSeries(a, (0j, 0j), 0j, scale * d, scale * c, order, radius)
    return phi, theta
