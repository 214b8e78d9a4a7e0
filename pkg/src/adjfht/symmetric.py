"""Closed forms for the symmetric geometry a1 = -a, a2 = a.

Here P = x^2 (x^2 - a^2), Q = 2 x^2 and, with z = x/a,

    phi(x) = z^(-1/2 + i mu) F(1/4 + i mu/2, 3/4 + i mu/2; 1; 1 - z^2),

which is real and equals 2 Re[k f(z)] with
f(z) = z^(-1/2 + i mu) F(1/4 + i mu/2, 3/4 + i mu/2; 1 + i mu; z^2).
Near z = 1 the first form is used; elsewhere the second, with f evaluated
through the quadratic transformation (no cancellation even for large mu).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BelowThresholdError, DomainError
from .operator import IntervalPair
from .specfun import coefficient_k, hyp2f1_log_second, hyp_series

GUARD = 1e-9
# the z = 1 series is used when 1 - z^2 <= XI_MAX and mu sqrt(1 - z^2) <= PHASE_MAX
XI_MAX = 0.5
PHASE_MAX = 3.0


@dataclass(frozen=True)
class SymmetricGeometry:
    a: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"a must be positive, got {self.a}")
        object.__setattr__(self, "a", float(self.a))

    @property
    def lambda_min(self) -> float:
        return self.a ** 2 / 4.0

    @property
    def pair(self) -> IntervalPair:
        return IntervalPair(-self.a, self.a)

    def mu(self, lam: float) -> float:
        lam = float(lam)
        if not lam >= self.lambda_min + GUARD:
            raise BelowThresholdError(f"lambda = {lam} must exceed a^2/4 = {self.lambda_min}")
        return math.sqrt(lam / self.a ** 2 - 0.25)


def _z_of(g: SymmetricGeometry, x, allow_end=True):
    z = np.asarray(x, dtype=float) / g.a
    ok = (z > 0) & ((z <= 1) if allow_end else (z < 1))
    if not np.all(ok):
        raise DomainError("x must lie in (0, a]" if allow_end else "x must lie in (0, a)")
    return z


def _direct_mask(z, mu):
    xi = 1.0 - z * z
    return (xi <= XI_MAX) & (mu * np.sqrt(xi) <= PHASE_MAX)


def _f_origin(z, mu):
    """f(z) = z^(-1/2 + i mu) F(1/4 + i mu/2, 3/4 + i mu/2; 1 + i mu; z^2)."""
    w = np.sqrt(1.0 - z * z)
    s = (1.0 - w) / (1.0 + w)
    F, _ = hyp_series(0.5 + 1j * mu, 0.5, 1.0 + 1j * mu, s)
    r = complex(-0.5, mu)
    return np.exp(r * np.log(z) - (r + 1.0) * np.log(0.5 * (1.0 + w))) * F


def _phi_direct(z, mu):
    F, _ = hyp_series(0.25 + 0.5j * mu, 0.75 + 0.5j * mu, 1.0, 1.0 - z * z)
    return np.exp(complex(-0.5, mu) * np.log(z)) * F


def _route_mask(z, mu, route):
    if route == "auto":
        return _direct_mask(z, mu)
    if route not in ("endpoint", "origin"):
        raise ValueError("route must be 'auto', 'endpoint' or 'origin'")
    return np.full(z.shape, route == "endpoint")


def phi_sym_complex(g: SymmetricGeometry, lam: float, x, route: str = "auto"):
    """phi before taking the real part (the imaginary part is roundoff).

    ``route`` forces the series about z = 1 ("endpoint") or the connection
    form about z = 0 ("origin"); "auto" picks per point.
    """
    mu = g.mu(lam)
    z = np.atleast_1d(_z_of(g, x))
    out = np.empty(z.shape, dtype=complex)
    direct = _route_mask(z, mu, route)
    if direct.any():
        out[direct] = _phi_direct(z[direct], mu)
    if (~direct).any():
        k = coefficient_k(mu)
        out[~direct] = 2.0 * (k * _f_origin(z[~direct], mu)).real
    return out[0] if np.ndim(x) == 0 else out


def phi_sym(g: SymmetricGeometry, lam: float, x):
    """Eigenfunction phi(x, lam) on (0, a], normalized by phi(a) = 1.

    On (-a, 0) use phi(-x): the eigenfunction of I1 is the mirror image.
    """
    v = phi_sym_complex(g, lam, x)
    return float(v.real) if np.ndim(x) == 0 else v.real


def _theta_direct(g, z, mu):
    """kappa [phi ln xi + z^(-1/2+i mu) Psi(xi)] with kappa = -1/(2 a^3)."""
    xi = 1.0 - z * z
    psi, full = hyp2f1_log_second(0.25 + 0.5j * mu, 0.75 + 0.5j * mu, xi)
    kappa = -0.5 / g.a ** 3
    return kappa * np.exp(complex(-0.5, mu) * np.log(z)) * full


@lru_cache(maxsize=256)
def theta_connection(g: SymmetricGeometry, lam: float) -> complex:
    """Coefficient l with theta = 2 Re[l f(z)], fitted where the z = 1 form is valid."""
    mu = g.mu(lam)
    xi_max = min(XI_MAX, (PHASE_MAX / mu) ** 2)
    xi = xi_max * np.array([0.25, 0.45, 0.65, 0.85, 1.0])
    z = np.sqrt(1.0 - xi)
    theta = _theta_direct(g, z, mu).real
    f = _f_origin(z, mu)
    A = np.column_stack([2.0 * f.real, -2.0 * f.imag])
    (re, im), *_ = np.linalg.lstsq(A, theta, rcond=None)
    return complex(re, im)


def theta_sym_complex(g: SymmetricGeometry, lam: float, x, route: str = "auto"):
    mu = g.mu(lam)
    z = np.atleast_1d(_z_of(g, x, allow_end=False))
    out = np.empty(z.shape, dtype=complex)
    direct = _route_mask(z, mu, route)
    if direct.any():
        out[direct] = _theta_direct(g, z[direct], mu)
    if (~direct).any():
        out[~direct] = 2.0 * (theta_connection(g, lam) * _f_origin(z[~direct], mu)).real
    return out[0] if np.ndim(x) == 0 else out


def theta_sym(g: SymmetricGeometry, lam: float, x):
    """Second solution theta = -(1/(2a^3)) [phi ln((a^2-x^2)/a^2) + Psi] on (0, a).

    Normalized by P W(theta, phi) = 1; the analytic part Psi vanishes at x = a.
    """
    v = theta_sym_complex(g, lam, x)
    return float(v.real) if np.ndim(x) == 0 else v.real


def rho_sym(g: SymmetricGeometry, lam: float) -> float:
    """Spectral density tanh(pi sqrt(lam/a^2 - 1/4)) / (2 a^3), same on both intervals."""
    lam = float(lam)
    if lam < g.lambda_min:
        raise BelowThresholdError(f"lambda = {lam} is below a^2/4 = {g.lambda_min}")
    return math.tanh(math.pi * math.sqrt(lam / g.a ** 2 - 0.25)) / (2.0 * g.a ** 3)


def phi_sym_asymptotic(g: SymmetricGeometry, lam: float, x):
    """Large-mu form of phi from the stationary-phase evaluation.

    sqrt(2) a / (sqrt(pi mu) sqrt(x) (a^2 - x^2)^(1/4)) cos(mu ln((a + sqrt(a^2 - x^2))/x) - pi/4)
    """
    mu = g.mu(lam)
    a = g.a
    x = np.asarray(x, dtype=float)
    root = np.sqrt(a * a - x * x)
    amp = math.sqrt(2.0) * a / (math.sqrt(math.pi * mu) * np.sqrt(x) * np.sqrt(root))
    out = amp * np.cos(mu * np.log((a + root) / x) - math.pi / 4.0)
    return float(out) if out.ndim == 0 else out


def phase_h(t, z):
    """Phase h(t) = ln t + ln(1 - t) - ln(1 - z^2 t) of the integral representation."""
    return np.log(t) + np.log(1.0 - t) - np.log(1.0 - z * z * t)


def amplitude_r(t, z):
    """Amplitude r(t) = (t (1 - t)^3 (1 - z^2 t))^(-1/4)."""
    return (t * (1.0 - t) ** 3 * (1.0 - z * z * t)) ** -0.25


def stationary_phase_data(g: SymmetricGeometry, z: float):
    """(t*, h(t*), r(t*), h''(t*)) at the stationary point of h, for 0 < z < 1."""
    z = float(z)
    if not 0.0 < z < 1.0:
        raise DomainError("z must lie in (0, 1)")
    w = math.sqrt(1.0 - z * z)
    t_star = 1.0 / (1.0 + w)
    h = -2.0 * math.log(1.0 + w)
    r = (1.0 + w) / w
    h2 = -2.0 * (1.0 + w) ** 2 / w
    return t_star, h, r, h2
