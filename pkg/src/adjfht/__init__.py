"""Numerical diagonalization of the finite Hilbert transform between (a1, 0) and (0, a2)."""
from .errors import (
    AccuracyError,
    BelowThresholdError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    FHTError,
    GeometryError,
    MatchingPointError,
    ParameterError,
)
from .fht import discretized_svd, fht_apply, halfline_power_fht
from .operator import IntervalPair, SpectralPoint, lambda_of_mu, mu_of_lambda
from .solve import nu_sigma, solve_interval, spectral_density
from .symmetric import SymmetricGeometry, phi_sym, rho_sym

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "BelowThresholdError", "ConsistencyError", "ConvergenceError",
    "DomainError", "FHTError", "GeometryError", "MatchingPointError", "ParameterError",
    "IntervalPair", "SpectralPoint", "SymmetricGeometry",
    "discretized_svd", "fht_apply", "halfline_power_fht", "lambda_of_mu", "mu_of_lambda",
    "nu_sigma", "phi_sym", "rho_sym", "solve_interval", "spectral_density",
]
