"""Large-lambda reference formulas: WKB eigenfunctions, inner matching, rho' and sigma.

The WKB phase is phi(x; lam) = sqrt(lam) t(x), with t the Liouville
variable measured from the regular endpoint, and the leading eigenfunction
is cos(phi - pi/4) / (c(lam) (-P)^(1/4)) with c(lam) = lam^(1/4) sqrt(pi/|P'(a_j)|).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ParameterError, WindowError
from .operator import IntervalPair, SpectralPoint, _check_id, frobenius_origin, liouville_map

WINDOW_END = 0.02
WINDOW_ZERO = 1e-4


@dataclass(frozen=True)
class WkbPhase:
    sp: SpectralPoint
    kappa: float
    c_lambda: float
    interval_id: int


def wkb_phase(geom: IntervalPair, sp: SpectralPoint, interval_id: int) -> WkbPhase:
    slope = abs(float(geom.dP(geom.endpoint(_check_id(interval_id)))))
    c = sp.lam ** 0.25 * math.sqrt(math.pi / slope)
    return WkbPhase(sp, geom.kappa, c, interval_id)


def in_wkb_window(geom: IntervalPair, interval_id: int, x) -> np.ndarray:
    """Points at least 2% of the length from a_j and 1e-4 of the length from 0."""
    x = np.asarray(x, dtype=float)
    L = geom.length(interval_id)
    a = geom.endpoint(interval_id)
    return geom.contains(interval_id, x) & (np.abs(x - a) >= WINDOW_END * L) & (np.abs(x) >= WINDOW_ZERO * L)


def wkb_eigenfunction(geom: IntervalPair, sp: SpectralPoint, interval_id: int, x):
    """Leading WKB approximation to phi_j(x, lam) (normalized by phi_j(a_j) = 1)."""
    if not np.all(in_wkb_window(geom, interval_id, x)):
        raise WindowError("x outside the WKB window of the interval")
    data = wkb_phase(geom, sp, interval_id)
    phase = math.sqrt(sp.lam) * liouville_map(geom, x, interval_id)
    neg_p = -geom.P(np.asarray(x, dtype=float))
    out = np.cos(phase - math.pi / 4.0) / (data.c_lambda * neg_p ** 0.25)
    return float(out) if np.ndim(x) == 0 else out


def wkb_phase_near_zero(geom: IntervalPair, sp: SpectralPoint, x):
    """Approximation -mu (ln|x| + kappa) of the WKB phase for small |x|."""
    return -sp.mu * (np.log(np.abs(np.asarray(x, dtype=float))) + geom.kappa)


class AsymptoticReference(NamedTuple):
    rho1: float
    rho2: float
    sigma_stated: float
    sigma_recomputed: float


def rho_sigma_asymptotic(geom: IntervalPair, sp: SpectralPoint) -> AsymptoticReference:
    """Plateau values of rho1', rho2' and two large-lambda forms of sigma.

    ``sigma_stated`` is (a2^3/a1)/cosh(mu pi), the commonly quoted constant;
    ``sigma_recomputed`` is -(a2/|a1|)/cosh(mu pi), which follows
    from the ratio of the endpoint-to-origin connection coefficients and the
    sign of the half-line identity.
    """
    a1, a2 = geom.a1, geom.a2
    ch = math.cosh(math.pi * sp.mu)
    rho1 = 1.0 / (a1 * a1 * (a2 - a1))
    rho2 = 1.0 / (a2 * a2 * (a2 - a1))
    return AsymptoticReference(rho1, rho2, (a2 ** 3 / a1) / ch, -(a2 / -a1) / ch)


def nu_asymptotic(geom: IntervalPair, sp: SpectralPoint):
    """(nu_stated, nu_recomputed) = (a1 a2, -|a1|/a2) / cosh(mu pi)."""
    ch = math.cosh(math.pi * sp.mu)
    return geom.a1 * geom.a2 / ch, -(-geom.a1 / geom.a2) / ch


def inner_match_coefficients(geom: IntervalPair, sp: SpectralPoint, *, c1: float = 0.1,
                             c2: float = 0.9, n: int = 12):
    """Fit WKB solutions against the origin basis on I1 near 0.

    For s = +1, -1 the WKB solution (-P)^(-1/4) exp(-s i phi(x; lam)) is fitted
    as C y_s + D y_(-s) over |x| in [c1/lam, c2/lam]; returned are the ratios
    C / (exp(s i mu kappa) / (-a1 a2)^(1/4)), which tend to 1.
    """
    if sp.mu < 5.0:
        raise ParameterError("inner matching needs mu >= 5")
    lo, hi = c1 * sp.eps ** 2, c2 * sp.eps ** 2
    if not (0.0 < lo < hi <= 0.5 * geom.inner_scale):
        raise DomainError("overlap window is empty for this lambda")
    xs = -np.geomspace(lo, hi, n)
    phase = math.sqrt(sp.lam) * liouville_map(geom, xs, 1)
    amp = (-geom.P(xs)) ** -0.25
    yp, ym = frobenius_origin(geom, sp)
    basis = np.column_stack([yp(xs), ym(xs)])
    out = []
    for s in (1, -1):
        wkb = amp * np.exp(-1j * s * phase)
        coef, *_ = np.linalg.lstsq(basis, wkb, rcond=None)
        predicted = np.exp(1j * s * sp.mu * geom.kappa) / geom.neg_product ** 0.25
        out.append(complex(coef[0 if s == 1 else 1] / predicted))
    return tuple(out)
