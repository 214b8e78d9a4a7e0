"""Spectral transforms U_j f(lam) = int_{I_j} phi_j(x, lam) f(x) dx.

The measure d rho_j = rho_j'(lam) d lam is discretized with Gauss-Legendre
panels in mu (lam = lambda_min + (-a1 a2) mu^2), which keeps the number of
eigenfunction oscillations per panel roughly uniform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .fht import fht_apply, interval_rule, panel_rule
from .operator import IntervalPair, _check_id, apply_L, mu_of_lambda
from .solve import nu_sigma, solve_interval

DEFAULT_MU_MAX = 8.0
NOISE_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Quadrature for d rho_j on [lambda_min, lambda_max]."""

    geom: IntervalPair
    mu_nodes: np.ndarray
    lambda_nodes: np.ndarray
    lambda_weights: np.ndarray
    rho_values: np.ndarray  # shape (2, n): rho_1', rho_2' at the nodes
    lambda_max: float

    def __len__(self):
        return len(self.lambda_nodes)

    def measure_weights(self, interval_id: int) -> np.ndarray:
        return self.lambda_weights * self.rho_values[_check_id(interval_id) - 1]


def make_spectral_grid(geom: IntervalPair, mu_max: float = DEFAULT_MU_MAX, *, mu_min: float = 0.0,
                       panels: int | None = None, order: int = 16) -> SpectralGrid:
    """Gauss-Legendre panels in mu on [mu_min, mu_max] (one panel per unit of mu by default)."""
    if not 0.0 <= mu_min < mu_max:
        raise ParameterError("need 0 <= mu_min < mu_max")
    if panels is None:
        panels = max(1, math.ceil(mu_max - mu_min))
    mu, wmu = panel_rule(np.linspace(mu_min, mu_max, panels + 1), order)
    lam = geom.lambda_min + geom.neg_product * mu ** 2
    wlam = wmu * 2.0 * geom.neg_product * mu
    rho = np.array([[solve_interval(geom, float(l), j).connection.im_m / math.pi for l in lam]
                    for j in (1, 2)])
    lam_max = geom.lambda_min + geom.neg_product * mu_max ** 2
    return SpectralGrid(geom, mu, lam, wlam, rho, lam_max)


def _rule(geom, interval_id, grid):
    return interval_rule(geom, interval_id, lam=float(grid.lambda_max))


def _phi_matrix(geom, interval_id, grid, x):
    return np.array([solve_interval(geom, float(l), interval_id).phi(x) for l in grid.lambda_nodes])


def _floor_integrals(geom, interval_id, grid, delta):
    """int over |x| < delta of phi_j(x, lam_i), from the origin expansion."""
    out = np.empty(len(grid))
    for i, lam in enumerate(grid.lambda_nodes):
        c = solve_interval(geom, float(lam), interval_id).connection
        r = complex(-0.5, grid.mu_nodes[i])
        out[i] = (c.k * delta ** (r + 1) / (r + 1) + c.k_minus * delta ** (r.conjugate() + 1) / (r.conjugate() + 1)).real
    return out


def u_forward(geom: IntervalPair, interval_id: int, f, grid: SpectralGrid, *, values=None, rule=None):
    """(U_j f)(lam_i) at the grid nodes.  ``f`` maps x-arrays to values."""
    rule = rule or _rule(geom, interval_id, grid)
    fv = f(rule.nodes) if values is None else np.asarray(values)
    phi = _phi_matrix(geom, interval_id, grid, rule.nodes)
    out = phi @ (rule.weights * fv)
    f0 = fv[np.argmin(np.abs(rule.nodes))]
    return out + f0 * _floor_integrals(geom, interval_id, grid, rule.floor)


def u_adjoint(geom: IntervalPair, interval_id: int, samples, grid: SpectralGrid, x_points):
    """(U_j^* g)(x) = int phi_j(x, lam) g(lam) d rho_j(lam), discretized on the grid."""
    samples = np.asarray(samples)
    phi = _phi_matrix(geom, interval_id, grid, np.asarray(x_points, dtype=float))
    return (grid.measure_weights(interval_id) * samples) @ phi


@dataclass(frozen=True)
class PlancherelReport:
    ratio: float          # ||U f||^2 / ||f||^2
    defect: float         # 1 - ratio
    tail_estimate: float  # estimated share of ||U f||^2 beyond lambda_max
    norm_f: float
    norm_uf: float


def _tail_estimate(grid, interval_id, uf, order):
    """Extrapolate |U f|^2 ~ exp(A - beta mu) from the last panel beyond mu_max."""
    mu = grid.mu_nodes[-order:]
    y = np.log(np.abs(uf[-order:]) ** 2 + 1e-300)
    beta, A = np.polyfit(mu, y, 1)
    beta = -beta
    if beta <= 0:
        return math.inf
    mu_max = math.sqrt((grid.lambda_max - grid.geom.lambda_min) / grid.geom.neg_product)
    plateau = grid.rho_values[interval_id - 1][-1]
    return plateau * 2.0 * grid.geom.neg_product * math.exp(A - beta * mu_max) * (mu_max / beta + 1.0 / beta ** 2)


def plancherel(geom: IntervalPair, interval_id: int, f, grid: SpectralGrid, *, order: int = 8) -> PlancherelReport:
    rule = _rule(geom, interval_id, grid)
    fv = f(rule.nodes)
    uf = u_forward(geom, interval_id, f, grid, values=fv, rule=rule)
    nf = float(rule.integrate(fv * fv))
    nu = float(np.sum(grid.measure_weights(interval_id) * uf * uf))
    tail = _tail_estimate(grid, interval_id, uf, order) / nf
    return PlancherelReport(nu / nf, 1.0 - nu / nf, tail, nf, nu)


def round_trip_defect(geom: IntervalPair, interval_id: int, f, grid: SpectralGrid) -> float:
    """Relative L2 norm of U^* U f - f on the interval."""
    rule = _rule(geom, interval_id, grid)
    fv = f(rule.nodes)
    uf = u_forward(geom, interval_id, f, grid, values=fv, rule=rule)
    back = u_adjoint(geom, interval_id, uf, grid, rule.nodes)
    return math.sqrt(rule.integrate((back - fv) ** 2) / rule.integrate(fv * fv))


def l_diagonalization_defect(geom: IntervalPair, interval_id: int, f, grid: SpectralGrid) -> float:
    """||U(L f) - lam U f|| / ||U(L f)|| in L2(d rho_j); ``f(x)`` returns (f, f', f'')."""
    rule = _rule(geom, interval_id, grid)
    fv = f(rule.nodes)[0]
    lf = apply_L(geom, f, rule.nodes)
    u_lf = u_forward(geom, interval_id, None, grid, values=lf, rule=rule)
    u_f = u_forward(geom, interval_id, None, grid, values=fv, rule=rule)
    w = grid.measure_weights(interval_id)
    diff = u_lf - grid.lambda_nodes * u_f
    return math.sqrt(np.sum(w * diff ** 2) / np.sum(w * u_lf ** 2))


def diagonalization_check(geom: IntervalPair, f, grid: SpectralGrid, *, sigma=None) -> float:
    """max over nodes of |U2(H1 f) - sigma U1 f| / |U2(H1 f)|.

    ``sigma`` defaults to the quadrature-route values from :func:`nu_sigma`.
    Nodes where |U1 f| < 1e-6 max |U1 f| are skipped.
    """
    rule1 = _rule(geom, 1, grid)
    rule2 = _rule(geom, 2, grid)
    fv = f(rule1.nodes)
    u1 = u_forward(geom, 1, f, grid, values=fv, rule=rule1)
    hf = fht_apply(None, geom, 1, rule2.nodes, rule=rule1, values=fv)
    u2 = u_forward(geom, 2, None, grid, values=hf, rule=rule2)
    if sigma is None:
        sigma = np.array([nu_sigma(geom, mu_of_lambda(geom, float(l))).sigma for l in grid.lambda_nodes])
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), u1.shape)
    keep = np.abs(u1) >= NOISE_FLOOR * np.max(np.abs(u1))
    defect = np.abs(u2 - sigma * u1) / np.abs(u2)
    return float(np.max(defect[keep]))
