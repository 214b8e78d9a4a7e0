"""Command-line front end: CSV/JSON tables of spectral data and a verification run.

Exit codes: 0 success, 1 verification failure, 2 usage or invalid
geometry, 3 numerical failure (the message names the offending lambda).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .asymptotics import in_wkb_window, rho_sigma_asymptotic, wkb_eigenfunction
from .errors import FHTError, GeometryError, ParameterError
from .fht import discretized_svd
from .operator import IntervalPair, lambda_of_mu, mu_of_lambda
from .solve import nu_sigma, solve_interval
from .symmetric import SymmetricGeometry, phi_sym, phi_sym_asymptotic, rho_sym

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SPECTRUM_COLUMNS = ("lambda", "mu", "rho1_numeric", "rho2_numeric", "rho1_asymptotic",
                    "rho2_asymptotic", "rho_closed_form")
SIGMA_COLUMNS = ("lambda", "mu", "nu_quadrature", "nu_coefficient", "sigma",
                 "sigma_paper_asymptotic", "sigma_recomputed_asymptotic", "constancy_defect")
EIGEN_COLUMNS = ("x", "phi_exact_or_numeric", "phi_wkb", "phi_stationary_phase")
SVD_COLUMNS = ("k", "singular_value")
AUDIT_MU = 4.0


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def _failure(lam: float, exc: Exception) -> NumericalFailure:
    msg = str(exc)
    return NumericalFailure(msg if "lambda = " in msg else f"lambda = {lam!r}: {msg}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    a1: float
    a2: float
    mu_min: float | None = None
    mu_max: float | None = None
    lambda_min: float | None = None
    lambda_max: float | None = None
    lam: float | None = None
    interval: int = 2
    n_points: int = 8
    order_n: int = 200
    output_path: str | None = None
    format: str = "csv"
    workers: int = 1

    def geometry(self) -> IntervalPair:
        if not (math.isfinite(self.a1) and math.isfinite(self.a2) and self.a1 < 0 < self.a2):
            raise GeometryError(f"need a1 < 0 < a2, got a1 = {self.a1}, a2 = {self.a2}")
        return IntervalPair(self.a1, self.a2)


def fmt(v) -> str:
    """17 significant digits in scientific notation; '' for missing values."""
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return "%.16e" % float(v)


def mu_sweep(cfg: RunConfig, geom: IntervalPair) -> np.ndarray:
    """Log-spaced mu values from either the mu or the lambda range."""
    if cfg.n_points < 2:
        raise UsageError("--n must be at least 2")
    if cfg.mu_min is not None or cfg.mu_max is not None:
        if cfg.lambda_min is not None or cfg.lambda_max is not None:
            raise UsageError("give either a mu range or a lambda range, not both")
        lo, hi = cfg.mu_min, cfg.mu_max
    elif cfg.lambda_min is not None and cfg.lambda_max is not None:
        for lam in (cfg.lambda_min, cfg.lambda_max):
            if not lam > geom.lambda_min:
                raise UsageError(f"lambda = {lam} must exceed lambda_min = {geom.lambda_min}")
        lo = mu_of_lambda(geom, cfg.lambda_min).mu
        hi = mu_of_lambda(geom, cfg.lambda_max).mu
    else:
        raise UsageError("a range is required: --mu-min/--mu-max or --lambda-min/--lambda-max")
    if lo is None or hi is None or not (0 < lo < hi) or not math.isfinite(hi):
        raise UsageError(f"need 0 < mu_min < mu_max, got {lo}, {hi}")
    return np.geomspace(lo, hi, cfg.n_points)


def _spectrum_row(args):
    a1, a2, mu = args
    geom = IntervalPair(a1, a2)
    sp = lambda_of_mu(geom, mu)
    try:
        r1 = solve_interval(geom, sp.lam, 1).connection.im_m / math.pi
        r2 = solve_interval(geom, sp.lam, 2).connection.im_m / math.pi
    except FHTError as exc:
        raise _failure(sp.lam, exc) from exc
    ref = rho_sigma_asymptotic(geom, sp)
    closed = rho_sym(SymmetricGeometry(a2), sp.lam) if geom.is_symmetric else None
    return dict(zip(SPECTRUM_COLUMNS, (sp.lam, sp.mu, r1, r2, ref.rho1, ref.rho2, closed)))


def _sigma_row(args):
    a1, a2, mu = args
    geom = IntervalPair(a1, a2)
    sp = lambda_of_mu(geom, mu)
    try:
        d = nu_sigma(geom, sp)
    except FHTError as exc:
        raise _failure(sp.lam, exc) from exc
    ref = rho_sigma_asymptotic(geom, sp)
    return dict(zip(SIGMA_COLUMNS, (sp.lam, sp.mu, d.nu_quadrature, d.nu_coefficient, d.sigma,
                                    ref.sigma_stated, ref.sigma_recomputed, d.constancy_defect)))


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))  # results come back in input order


def cmd_spectrum(cfg: RunConfig):
    geom = cfg.geometry()
    mus = mu_sweep(cfg, geom)
    rows = _map(_spectrum_row, [(geom.a1, geom.a2, float(m)) for m in mus], cfg.workers)
    return SPECTRUM_COLUMNS, rows, {}


def prefactor_audit(geom: IntervalPair, rows) -> dict:
    """Compare sigma cosh(mu pi) at the row nearest mu = 4 with the two large-lambda constants."""
    stated = geom.a2 ** 3 / geom.a1
    recomputed = -geom.a2 / -geom.a1
    row = min(rows, key=lambda r: abs(r["mu"] - AUDIT_MU))
    scaled = row["sigma"] * math.cosh(math.pi * row["mu"])
    dev_stated = abs(scaled / stated - 1.0)
    dev_recomputed = abs(scaled / recomputed - 1.0)
    agrees = [name for name, dev in (("stated", dev_stated), ("recomputed", dev_recomputed)) if dev <= 0.05]
    return {
        "constant_stated": stated,
        "constant_recomputed": recomputed,
        "audit_mu": row["mu"],
        "sigma_times_cosh": scaled,
        "relative_deviation_stated": dev_stated,
        "relative_deviation_recomputed": dev_recomputed,
        "agrees_within_5_percent": ",".join(agrees) if agrees else "none",
    }


def audit_text(audit: dict) -> str:
    return "\n".join([
        "prefactor audit: sigma(lambda) ~ C / cosh(mu pi)",
        f"  C as stated   a2^3/a1  = {fmt(audit['constant_stated'])}",
        f"  C recomputed  -a2/|a1| = {fmt(audit['constant_recomputed'])}",
        f"  at mu = {audit['audit_mu']:.6g}: sigma cosh(mu pi) = {fmt(audit['sigma_times_cosh'])}",
        f"  relative deviation from stated    C: {audit['relative_deviation_stated']:.3e}",
        f"  relative deviation from recomputed C: {audit['relative_deviation_recomputed']:.3e}",
        f"  quadrature sigma agrees within 5% with: {audit['agrees_within_5_percent']}",
    ])


def cmd_sigma(cfg: RunConfig):
    geom = cfg.geometry()
    mus = mu_sweep(cfg, geom)
    rows = _map(_sigma_row, [(geom.a1, geom.a2, float(m)) for m in mus], cfg.workers)
    return SIGMA_COLUMNS, rows, {"audit": prefactor_audit(geom, rows)}


def eigenfunction_grid(geom: IntervalPair, interval_id: int, n: int) -> np.ndarray:
    """Increasing grid from the endpoint a_j to 1e-3 |a_j| (I1) or the reverse (I2)."""
    a = geom.endpoint(interval_id)
    x = a * np.linspace(1e-3, 1.0, n)
    return x[::-1] if interval_id == 1 else x


def cmd_eigenfunction(cfg: RunConfig):
    geom = cfg.geometry()
    if cfg.lam is None:
        raise UsageError("--lambda is required")
    if cfg.interval not in (1, 2):
        raise UsageError("--interval must be 1 or 2")
    if cfg.n_points < 2:
        raise UsageError("--n must be at least 2")
    if not cfg.lam > geom.lambda_min:
        raise UsageError(f"lambda = {cfg.lam} must exceed lambda_min = {geom.lambda_min}")
    sp = mu_of_lambda(geom, cfg.lam)
    j = cfg.interval
    x = eigenfunction_grid(geom, j, cfg.n_points)
    a = geom.endpoint(j)
    try:
        if geom.is_symmetric:
            phi = phi_sym(SymmetricGeometry(geom.a2), sp.lam, np.abs(x))
        else:
            inner = x != a
            phi = np.ones_like(x)
            phi[inner] = solve_interval(geom, sp.lam, j).phi(x[inner])
    except FHTError as exc:
        raise _failure(sp.lam, exc) from exc
    win = in_wkb_window(geom, j, x)
    wkb = np.full(x.shape, np.nan)
    if win.any():
        wkb[win] = wkb_eigenfunction(geom, sp, j, x[win])
    stat = np.full(x.shape, np.nan)
    if geom.is_symmetric and sp.mu >= 5.0:
        ax = np.abs(x)
        ok = (ax >= 0.1 * geom.a2) & (ax <= 0.9 * geom.a2)
        if ok.any():
            stat[ok] = phi_sym_asymptotic(SymmetricGeometry(geom.a2), sp.lam, ax[ok])
    nan_none = lambda v: None if math.isnan(v) else float(v)
    rows = [dict(zip(EIGEN_COLUMNS, (float(xi), float(p), nan_none(w), nan_none(s))))
            for xi, p, w, s in zip(x, phi, wkb, stat)]
    return EIGEN_COLUMNS, rows, {}


def cmd_svd(cfg: RunConfig):
    geom = cfg.geometry()
    if cfg.order_n < 16:
        raise UsageError("--order-n must be at least 16")
    s = discretized_svd(geom, cfg.order_n)
    rows = [{"k": k, "singular_value": float(v)} for k, v in enumerate(s, start=1)]
    return SVD_COLUMNS, rows, {}


def render_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(fmt(r[c]) for c in columns) for r in rows]
    return "\n".join(lines) + "\n"


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    return fmt(v)


def _json_object(d: dict) -> str:
    return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in d.items()) + "}"


def render_json(cfg: RunConfig, columns, rows, extra) -> str:
    parts = ['{\n  "config": ' + json.dumps(asdict(cfg), sort_keys=True)]
    for key, block in extra.items():
        parts.append(f'  {json.dumps(key)}: {_json_object(block)}')
    body = ",\n".join("    " + _json_object({c: r[c] for c in columns}) for r in rows)
    parts.append('  "rows": [\n' + body + "\n  ]")
    return ",\n".join(parts) + "\n}\n"


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sigma": cmd_sigma,
    "eigenfunction": cmd_eigenfunction,
    "svd": cmd_svd,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adjfht", allow_abbrev=False,
                                     description="Spectral data of the finite Hilbert transform "
                                                 "between (a1, 0) and (0, a2).")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--a1", type=float, default=-1.0)
        p.add_argument("--a2", type=float, default=1.0)
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    def sweep(p):
        p.add_argument("--mu-min", type=float)
        p.add_argument("--mu-max", type=float)
        p.add_argument("--lambda-min", type=float)
        p.add_argument("--lambda-max", type=float)
        p.add_argument("--n", type=int, default=8, help="number of log-spaced mu values")
        p.add_argument("--workers", type=int, default=1)

    for name, helptext in (("spectrum", "rho1', rho2' with asymptotic and closed-form references"),
                           ("sigma", "nu and sigma by two routes, with the prefactor audit on stderr")):
        p = sub.add_parser(name, help=helptext, allow_abbrev=False)
        common(p)
        sweep(p)
    p = sub.add_parser("eigenfunction", help="phi_j(x, lambda) with WKB and stationary-phase forms",
                       allow_abbrev=False)
    common(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--interval", type=int, choices=(1, 2), default=2)
    p.add_argument("--n", type=int, default=101)
    p = sub.add_parser("svd", help="singular values of the discretized transform", allow_abbrev=False)
    common(p)
    p.add_argument("--order-n", type=int, default=200)
    p = sub.add_parser("verify", help="run the invariant suite", allow_abbrev=False)
    p.add_argument("--tolerance-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def config_from_args(args) -> RunConfig:
    kw = dict(command=args.command, a1=args.a1, a2=args.a2, output_path=args.out, format=args.format)
    for name in ("mu_min", "mu_max", "lambda_min", "lambda_max", "lam", "interval", "workers"):
        if hasattr(args, name):
            kw[name] = getattr(args, name)
    if hasattr(args, "n"):
        kw["n_points"] = args.n
    if hasattr(args, "order_n"):
        kw["order_n"] = args.order_n
    return RunConfig(**kw)


def run(cfg: RunConfig) -> str:
    """Output text of one command (the audit of ``sigma`` goes to stderr)."""
    columns, rows, extra = COMMANDS[cfg.command](cfg)
    if "audit" in extra:
        print(audit_text(extra["audit"]), file=sys.stderr)
    if cfg.format == "json":
        return render_json(cfg, columns, rows, extra)
    return render_csv(columns, rows)


def _verify(scale: float) -> int:
    from .verify import format_table, run_suite

    results = run_suite(tolerance_scale=scale)
    print(format_table(results))
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "verify":
        return _verify(args.tolerance_scale)
    try:
        cfg = config_from_args(args)
        text = run(cfg)
    except (UsageError, GeometryError, ParameterError) as exc:
        print(f"adjfht: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"adjfht: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FHTError as exc:
        print(f"adjfht: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
