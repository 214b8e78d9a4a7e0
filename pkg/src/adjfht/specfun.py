"""Special functions with complex arguments.

Gamma and digamma are computed from a Lanczos approximation and an
asymptotic series; the Gauss function 2F1 is summed from its power series
with a choice of transformation (linear 1-z connection or quadratic
transformation) picked by an estimate of cancellation in each candidate.
Bessel J0 and Y0 are delegated to :mod:`scipy.special`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .errors import ConvergenceError, DomainError, ParameterError, PoleError

EULER_GAMMA = 0.57721566490153286061

DEFAULT_MAX_TERMS = 100_000
_SERIES_TOL = 1e-17

# Godfrey's coefficients for g = 607/128, n = 15.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2k} / (2k) for the digamma asymptotic series.
_DIGAMMA_ASYM = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)


def _is_nonpositive_integer(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _is_integer(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real == math.floor(z.real)


def _check_finite(z: complex, name: str = "z") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z


def _lanczos_log(z: complex) -> complex:
    """log Gamma(z) for Re z >= 1/2 (principal branch of each factor)."""
    z = z - 1.0
    acc = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def complex_lgamma(z: complex) -> complex:
    """A logarithm of Gamma(z).

    The imaginary part is not reduced to the principal branch, so the
    result is meant to be exponentiated or differenced, not compared
    against ``scipy.special.loggamma``.
    """
    z = _check_finite(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - _lanczos_log(1.0 - z)
    return _lanczos_log(z)


def complex_gamma(z: complex) -> complex:
    """Gamma function of a complex argument."""
    z = _check_finite(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * cmath.exp(_lanczos_log(1.0 - z)))
    return cmath.exp(_lanczos_log(z))


def rgamma(z: complex) -> complex:
    """1/Gamma(z), zero at the poles of Gamma."""
    if _is_nonpositive_integer(z):
        return 0.0j
    return 1.0 / complex_gamma(z)


def complex_digamma(z: complex) -> complex:
    """Digamma function psi(z) = Gamma'(z)/Gamma(z)."""
    z = _check_finite(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"digamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return complex_digamma(1.0 - z) - math.pi / cmath.tan(math.pi * z)
    shift = 0.0j
    while z.real < 15.0:
        shift -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    tail = 0.0j
    power = inv2
    for coef in _DIGAMMA_ASYM:
        tail += coef * power
        power *= inv2
    return shift + cmath.log(z) - 0.5 / z - tail


def hyp_series(a, b, c, z, *, max_terms: int = DEFAULT_MAX_TERMS):
    """Sum the 2F1 power series for an array of z.

    Returns ``(value, cond)`` where ``cond`` is sum|t_n| / |sum t_n|, an
    estimate of how many digits were lost to cancellation.
    """
    z = np.asarray(z, dtype=complex)
    total = np.ones_like(z)
    absum = np.ones(z.shape)
    term = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    for n in range(max_terms):
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0))
        term = np.where(active, term * (ratio * z), 0.0)
        total += term
        absum += np.abs(term)
        mag = np.abs(term)
        done = (mag <= _SERIES_TOL * np.abs(total)) & (np.abs(ratio * z) < 1.0)
        done |= mag == 0.0
        active &= ~done
        if not active.any():
            break
    else:
        raise ConvergenceError(
            f"2F1 series did not converge in {max_terms} terms (a={a}, b={b}, c={c})"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = absum / np.abs(total)
    cond = np.where(np.isfinite(cond), cond, np.inf)
    return total, cond


def _series_scalar(a, b, c, z, max_terms):
    value, cond = hyp_series(a, b, c, np.array([z]), max_terms=max_terms)
    return complex(value[0]), float(cond[0])


def _quadratic(a, b, c, z, max_terms):
    """F(a, a+1/2; c; z) through the quadratic transformation.

    F(a, a+1/2; c; z) = ((1+w)/2)^(-2a) F(2a, 2a-c+1; c; s),
    w = sqrt(1-z), s = (1-w)/(1+w).
    """
    if b - a != 0.5:
        a, b = b, a
    w = cmath.sqrt(1.0 - z)
    s = (1.0 - w) / (1.0 + w)
    pref = cmath.exp(-2.0 * a * cmath.log((1.0 + w) / 2.0))
    value, cond = _series_scalar(2.0 * a, 2.0 * a - c + 1.0, c, s, max_terms)
    return pref * value, cond


def _local(a, b, c, z, max_terms):
    """Best of the direct and quadratic routes (no 1-z connection)."""
    candidates = []
    if abs(z) <= 0.75 or not _quadratic_ok(a, b):
        candidates.append(_series_scalar(a, b, c, z, max_terms))
    if _quadratic_ok(a, b):
        candidates.append(_quadratic(a, b, c, z, max_terms))
    return min(candidates, key=lambda vc: vc[1])


def _quadratic_ok(a, b) -> bool:
    return abs(abs(b - a) - 0.5) == 0.0 and complex(b - a).imag == 0.0


def _connection(a, b, c, z, max_terms):
    """1-z connection; requires c-a-b not an integer."""
    s = c - a - b
    g1 = complex_gamma(c) * complex_gamma(s) * rgamma(c - a) * rgamma(c - b)
    g2 = complex_gamma(c) * complex_gamma(-s) * rgamma(a) * rgamma(b)
    t1 = t2 = 0.0j
    c1 = c2 = 0.0
    if g1 != 0:
        f1, c1 = _local(a, b, a + b - c + 1.0, 1.0 - z, max_terms)
        t1 = g1 * f1
    if g2 != 0:
        f2, c2 = _local(c - a, c - b, s + 1.0, 1.0 - z, max_terms)
        t2 = g2 * f2 * cmath.exp(s * cmath.log(1.0 - z))
    value = t1 + t2
    if value == 0:
        return value, math.inf
    return value, (abs(t1) * c1 + abs(t2) * c2) / abs(value)


def hyp2f1_with_cond(a, b, c, z, *, max_terms: int = DEFAULT_MAX_TERMS):
    """Gauss 2F1 together with the cancellation estimate of the route used."""
    a, b, c = complex(a), complex(b), complex(c)
    z = float(z)
    if not (0.0 <= z < 1.0):
        raise DomainError(f"hyp2f1 requires z in [0, 1), got {z}")
    if _is_nonpositive_integer(c):
        raise ParameterError(f"c = {c.real:g} is a non-positive integer")
    if z == 0.0:
        return 1.0 + 0.0j, 1.0
    candidates = []
    if z <= 0.5:
        direct = _series_scalar(a, b, c, z, max_terms)
        if direct[1] < 10.0:
            return direct
        candidates.append(direct)
    if _quadratic_ok(a, b):
        candidates.append(_quadratic(a, b, c, z, max_terms))
    if not _is_integer(c - a - b):
        candidates.append(_connection(a, b, c, z, max_terms))
    if not candidates:
        candidates.append(_series_scalar(a, b, c, z, max_terms))
    return min(candidates, key=lambda vc: vc[1])


def hyp2f1(a, b, c, z, *, max_terms: int = DEFAULT_MAX_TERMS) -> complex:
    """Gauss hypergeometric function F(a, b; c; z) for real z in [0, 1).

    Parameters may be complex. Raises ParameterError if c is a
    non-positive integer and ConvergenceError if a series exceeds
    ``max_terms`` terms.
    """
    return hyp2f1_with_cond(a, b, c, z, max_terms=max_terms)[0]


@dataclass(frozen=True)
class Hyp2F1Params:
    """Parameter set (a, b, c; z) of a Gauss hypergeometric evaluation."""

    a: complex
    b: complex
    c: complex
    z: float

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise ParameterError(f"c = {complex(self.c).real:g} is a non-positive integer")
        if not (0.0 <= float(self.z) < 1.0):
            raise DomainError(f"z must lie in [0, 1), got {self.z}")

    def evaluate(self) -> complex:
        return hyp2f1(self.a, self.b, self.c, self.z)


def hyp2f1_log_second(a, b, xi, *, max_terms: int = DEFAULT_MAX_TERMS):
    """Logarithmic second solution of the hypergeometric equation with c = 1.

    Returns ``(analytic_part, full)`` with
    ``full = F(a, b; 1; xi) * log(xi) + analytic_part`` and

        analytic_part = sum_{k>=1} (a)_k (b)_k / (k!)^2 * h_k * xi^k,
        h_k = psi(a+k) - psi(a) + psi(b+k) - psi(b) - 2 (psi(k+1) - psi(1)),

    so the analytic part vanishes at xi = 0. ``xi`` may be an array.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if np.any((xi_arr <= 0.0) | (xi_arr >= 1.0)):
        raise DomainError("hyp2f1_log_second requires xi in (0, 1)")
    x = xi_arr.astype(complex)
    term = np.ones_like(x)
    f_sum = np.ones_like(x)
    psi_sum = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    h = 0.0j
    for k in range(1, max_terms + 1):
        j = k - 1
        h += 1.0 / (a + j) + 1.0 / (b + j) - 2.0 / k
        term = np.where(active, term * ((a + j) * (b + j) / (k * k)) * x, 0.0)
        f_sum += term
        contrib = term * h
        psi_sum += contrib
        ratio = abs((a + k) * (b + k) / ((k + 1.0) ** 2))
        done = np.abs(contrib) <= _SERIES_TOL * np.maximum(np.abs(psi_sum), np.abs(f_sum))
        done &= ratio * np.abs(x) < 1.0
        active &= ~done
        if not active.any():
            break
    else:
        raise ConvergenceError(f"logarithmic 2F1 series did not converge in {max_terms} terms")
    full = f_sum * np.log(x) + psi_sum
    if np.ndim(xi) == 0:
        return complex(psi_sum), complex(full)
    return psi_sum, full


def bessel_j0y0(t):
    """Bessel functions J0(t) and Y0(t) for t > 0 (scalar or array)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0.0)):
        raise DomainError("Y0 is singular at t <= 0")
    j0 = _sp.j0(t_arr)
    y0 = _sp.y0(t_arr)
    if np.ndim(t) == 0:
        return float(j0), float(y0)
    return j0, y0


def coefficient_k(mu: float) -> complex:
    """Origin connection coefficient of the symmetric eigenfunction.

    k(mu) = Gamma(-i mu) / (Gamma(1/4 - i mu/2) Gamma(3/4 - i mu/2)).
    """
    mu = float(mu)
    if not mu > 0.0:
        raise ParameterError("coefficient_k needs mu > 0 (logarithmic case at mu = 0)")
    return cmath.exp(
        complex_lgamma(-1j * mu)
        - complex_lgamma(0.25 - 0.5j * mu)
        - complex_lgamma(0.75 - 0.5j * mu)
    )
