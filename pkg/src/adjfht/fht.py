"""Finite Hilbert transform between the adjacent intervals.

(H_j f)(y) = (1/pi) int_{I_j} f(x) / (x - y) dx for y outside I_j.  The
integrands of interest behave like |x|^(-1/2 +- i mu) at the shared
endpoint 0, so the quadrature rules substitute |x| = u^2 there and grade
the panels geometrically towards 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

from .errors import DomainError, ParameterError, PreconditionError, PrincipalValueError
from .operator import IntervalPair, _check_id, apply_L


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights; ``singularity_tag`` names a built-in weight."""

    nodes: np.ndarray
    weights: np.ndarray
    singularity_tag: str | None = None
    floor: float = 0.0  # |x| < floor is excluded (left to an analytic tail)

    def integrate(self, values) -> complex:
        return np.dot(self.weights, values)

    def __len__(self):
        return len(self.nodes)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(m: int):
    """Gauss-Legendre nodes and weights on [-1, 1] (cached)."""
    if m not in _GL_CACHE:
        _GL_CACHE[m] = legendre.leggauss(m)
    return _GL_CACHE[m]


def panel_rule(edges, order):
    """Composite Gauss-Legendre rule on consecutive panels ``edges``.

    ``order`` may be an int or a sequence with one entry per panel.
    """
    edges = np.asarray(edges, dtype=float)
    orders = np.broadcast_to(np.asarray(order), (len(edges) - 1,))
    nodes, weights = [], []
    for lo, hi, m in zip(edges[:-1], edges[1:], orders):
        t, w = gauss_legendre(int(m))
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (t + 1.0))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def inverse_sqrt_rule(order: int = 24) -> QuadratureRule:
    """Rule on (0, 1) for integrands x^(-1/2) g(x) with g smooth.

    Built from x = u^2, so sum w_i x_i^(-1/2) g(x_i) = int_0^1 2 g(u^2) du.
    """
    t, w = gauss_legendre(order)
    u = 0.5 * (t + 1.0)
    return QuadratureRule(u * u, w * u, "inverse_sqrt_at_zero")


def _panel_phase(geom, interval_id, lam, lo, hi):
    """Rough bound on the eigenfunction phase advance over |x| in [lo, hi]."""
    L = geom.length(interval_id)
    a = geom.endpoint(interval_id)
    sgn = -1.0 if interval_id == 1 else 1.0
    if hi >= L:
        slope = abs(float(geom.dP(a)))
        return 2.0 * math.sqrt(lam * (hi - lo) / slope)
    neg_p = min(-float(geom.P(sgn * lo)), -float(geom.P(sgn * hi)))
    return math.sqrt(lam) * (hi - lo) / math.sqrt(neg_p)


def interval_rule(
    geom: IntervalPair,
    interval_id: int,
    *,
    lam: float | None = None,
    split: float = 0.1,
    floor: float = 1e-12,
    per_decade: int = 8,
    order: int = 16,
    max_phase: float = 3.0,
) -> QuadratureRule:
    """Quadrature rule on I_j for integrands singular like |x|^(-1/2) at 0.

    Inner part |x| in [floor, split*min(|a1|, a2)] uses |x| = u^2 on
    log-graded panels (``per_decade`` per decade of |x|).  The outer part is
    graded towards 0 and towards the regular endpoint; when ``lam`` is given,
    panels are split until the eigenfunction phase advance per panel is
    below ``max_phase`` radians.
    """
    _check_id(interval_id)
    sgn = -1.0 if interval_id == 1 else 1.0
    L = geom.length(interval_id)
    xs = split * geom.inner_scale
    if lam is not None and lam > geom.lambda_min:
        mu = math.sqrt((lam - geom.lambda_min) / geom.neg_product)
        per_decade = max(per_decade, math.ceil(mu * math.log(10.0) / max_phase))

    n_inner = max(1, math.ceil(math.log10(xs / floor) * per_decade))
    u_edges = np.sqrt(np.geomspace(floor, xs, n_inner + 1))
    u, wu = panel_rule(u_edges, order)
    inner_x = u * u
    inner_w = 2.0 * u * wu

    edges = [xs]
    while edges[-1] * 2.0 < 0.5 * L:
        edges.append(edges[-1] * 2.0)
    near_end = 0.5 * L
    n_end = 4
    if lam is not None:
        slope = abs(float(geom.dP(geom.endpoint(interval_id))))
        d_min = 2.0 * slope / max(lam, 1.0)
        n_end = max(4, math.ceil(math.log2(near_end / d_min)))
    tail = [L - near_end * 2.0 ** -k for k in range(n_end + 1)]
    edges = sorted(set(e for e in edges if e < tail[0]) | set(tail) | {L})
    if lam is not None:
        refined = [edges[0]]
        for lo, hi in zip(edges[:-1], edges[1:]):
            k = max(1, math.ceil(_panel_phase(geom, interval_id, lam, lo, hi) / max_phase))
            refined.extend(np.linspace(lo, hi, k + 1)[1:])
        edges = refined
    outer_x, outer_w = panel_rule(edges, order)

    ax = np.concatenate([inner_x, outer_x])
    w = np.concatenate([inner_w, outer_w])
    return QuadratureRule(sgn * ax, w, None, floor)


@dataclass(frozen=True)
class EdgeBehavior:
    """Leading behaviour f(x) ~ plus |x|^(-1/2 + i mu) + minus |x|^(-1/2 - i mu) at 0."""

    mu: float
    plus: complex
    minus: complex


def _power_tail(r: complex, delta: float, d: np.ndarray, terms: int = 8):
    """int_0^delta s^r / (s + d) ds for delta << d."""
    out = np.zeros(d.shape, dtype=complex)
    for j in range(terms):
        out += (-1.0) ** j * delta ** (r + j + 1) / ((r + j + 1) * d ** (j + 1))
    return out


def _check_target(geom: IntervalPair, from_: int, y: np.ndarray):
    if from_ == 1:
        bad = (y >= geom.a1) & (y <= 0.0)
    else:
        bad = (y >= 0.0) & (y <= geom.a2)
    if np.any(bad):
        raise PrincipalValueError(
            f"target point inside the closed source interval I{from_}; principal values are not supported"
        )


def fht_apply(f, geom: IntervalPair, from_: int, y, *, rule: QuadratureRule | None = None,
              edge: EdgeBehavior | None = None, values=None):
    """(H_from f)(y) = (1/pi) int_{I_from} f(x)/(x - y) dx.

    ``f`` is evaluated once on the quadrature nodes (or ``values`` is used
    directly).  The piece |x| < ``rule.floor`` is added analytically: from
    the leading singular behaviour ``edge`` when given, otherwise treating f
    as constant there.
    """
    _check_id(from_)
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    _check_target(geom, from_, ys)
    if rule is None:
        rule = interval_rule(geom, from_)
    fv = np.asarray(f(rule.nodes) if values is None else values)
    kernel = 1.0 / (rule.nodes[None, :] - ys[:, None])
    out = kernel @ (rule.weights * fv) / math.pi
    if rule.floor > 0.0:
        delta = rule.floor
        d = np.abs(ys)
        sign = -1.0 if from_ == 1 else 1.0
        if edge is not None:
            r = complex(-0.5, edge.mu)
            tail = edge.plus * _power_tail(r, delta, d) + edge.minus * _power_tail(r.conjugate(), delta, d)
        else:
            # treat f as constant on |x| < floor, using the node nearest 0
            tail = fv[np.argmin(np.abs(rule.nodes))] * np.log1p(delta / d)
        extra = sign * tail / math.pi
        if not np.iscomplexobj(out):
            extra = extra.real
        out = out + extra
    if np.ndim(y) == 0:
        return out[0]
    return out


def halfline_power_fht(mu: float, y: float, truncation_T: float = 100.0, *,
                       per_decade: int = 16, order: int = 20) -> complex:
    """(1/pi) int_{-inf}^0 (-x)^(-1/2 + i mu) / (x - y) dx for y > 0.

    The integral over (-T, 0) is done by quadrature in u = sqrt(-x); the
    piece (-inf, -T) is added from the expansion of 1/(x - y) in powers of
    y/x (six terms).
    """
    mu, y, T = float(mu), float(y), float(truncation_T)
    if not y > 0:
        raise DomainError("y must be positive")
    if mu < 0:
        raise ParameterError("mu must be non-negative")
    if T < 10.0 * y:
        raise DomainError(f"truncation T = {T} must be at least 10 y = {10 * y}")
    r = complex(-0.5, mu)
    p = 2j * mu  # u^(2r+1)
    u0 = 1e-4 * math.sqrt(y)
    head = 0.0j
    for j in range(6):
        head += (-1.0 / y) ** j / y * u0 ** (p + 2 * j + 1) / (p + 2 * j + 1)
    uT = math.sqrt(T)
    n_pan = math.ceil(math.log10(uT / u0) * per_decade)
    u, w = panel_rule(np.geomspace(u0, uT, n_pan + 1), order)
    body = np.sum(w * np.exp(p * np.log(u)) / (u * u + y))
    tail = 0.0j
    for j in range(6):
        tail += (-y) ** j * T ** (r - j) / (j - r)
    return -(2.0 / math.pi) * (head + body) - tail / math.pi


def commutation_residual(geom: IntervalPair, f, y_probes, *, from_: int = 1,
                         satisfies_conditions: bool = True, h: float | None = None,
                         rule: QuadratureRule | None = None) -> float:
    """max over probes of |H(Lf) - L(Hf)| / (1 + |H(Lf)|).

    ``f(x)`` returns (f, f', f'').  The caller declares that f is bounded at
    the regular endpoint and that f = o(1/|x|), f' = o(1/x^2) at 0; L(Hf)
    is formed from five-point finite differences of the quadrature values.
    """
    if not satisfies_conditions:
        raise PreconditionError("f must be bounded at a_j with f = o(1/|x|), f' = o(1/x^2) at 0")
    rule = rule or interval_rule(geom, from_)
    nodes = rule.nodes
    fv = f(nodes)[0]
    lf = apply_L(geom, f, nodes)
    ys = np.asarray(y_probes, dtype=float)
    worst = 0.0
    for yv in ys:
        step = h if h is not None else 0.02 * abs(yv)
        stencil = yv + step * np.arange(-2, 3)
        g = fht_apply(None, geom, from_, stencil, rule=rule, values=fv)
        g1 = (g[0] - 8 * g[1] + 8 * g[3] - g[4]) / (12 * step)
        g2 = (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * step * step)
        P, Pp, Q = geom.P(yv), geom.dP(yv), geom.Q(yv)
        l_hf = P * g2 + Pp * g1 + Q * g[2]
        h_lf = fht_apply(None, geom, from_, yv, rule=rule, values=lf)
        worst = max(worst, abs(h_lf - l_hf) / (1.0 + abs(h_lf)))
    return float(worst)


def _svd_axis(L: float, n: int, levels: int = 40):
    """Corner-graded Gauss rule on (0, L) and the orthonormal Legendre basis on it."""
    edges = np.concatenate([[0.0], 0.5 ** np.arange(levels, -1, -1)])
    lengths = np.diff(edges)
    orders = np.minimum(n + 10, np.maximum(12, np.ceil(0.75 * n * np.sqrt(2 * lengths)).astype(int) + 10))
    t, w = panel_rule(edges, orders)
    V = legendre.legvander(2.0 * t - 1.0, n - 1) * np.sqrt(2 * np.arange(n) + 1.0)
    return L * t, L * w, V / math.sqrt(L)


def discretized_svd(geom: IntervalPair, n: int) -> np.ndarray:
    """Singular values of the Galerkin matrix of H_1 : L2(I1) -> L2(I2).

    Both spaces use orthonormal Legendre polynomials of degree < n; the
    kernel 1/(pi (x - y)) is integrated with panels graded towards the
    common corner x = y = 0.
    """
    if n < 16:
        raise ParameterError("n must be at least 16")
    sx, wx, Vx = _svd_axis(-geom.a1, n)  # |x| for x in I1
    sy, wy, Vy = _svd_axis(geom.a2, n)
    K = -1.0 / (math.pi * (sx[None, :] + sy[:, None]))  # 1/(pi (x - y)), x = -sx
    A = (Vy * wy[:, None]).T @ K @ (Vx * wx[:, None])
    return np.linalg.svd(A, compute_uv=False)


def svd_tail_fit(s, noise: float = 1e-13):
    """Least-squares fit of ln s_k against k over the tail of the resolved spectrum.

    The resolved spectrum is s_k >= noise * s_1 (below that the values are
    roundoff); its second half is the tail.  Returns (r_squared, slope, k_lo, k_hi)
    with 1-based k.
    """
    s = np.asarray(s, dtype=float)
    resolved = int(np.count_nonzero(s >= noise * s[0]))
    if resolved < 6:
        raise ParameterError("too few resolved singular values for a tail fit")
    k = np.arange(resolved // 2, resolved) + 1
    y = np.log(s[k - 1])
    slope, icpt = np.polyfit(k, y, 1)
    res = y - (slope * k + icpt)
    r2 = 1.0 - float(np.sum(res ** 2)) / float(np.sum((y - y.mean()) ** 2))
    return r2, float(slope), int(k[0]), int(k[-1])
