"""Batch driver: ``landau-clusters <command> --config <path> [--out <path>] [--format csv|json] [--threads N]``."""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import clusters, landau, radon, specfun, symbols
from .errors import ConfigError, DomainError, LandauClustersError
from .potentials import Bump, Potential

COMMANDS = ("radon", "spectrum", "moments", "distribution", "symbols", "semiclassical", "appendix", "strongfield")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

TOLERANCES = {
    "cutoff_rtol": landau.CUTOFF_RTOL,
    "quadrature_tol": landau.QuadratureSpec().tolerance,
    "nyquist_tol": symbols.NYQUIST_TOL,
    "radon_eps_floor": radon.EPS_FLOOR,
    "atom_tol": clusters.ATOM_TOL,
}


@dataclass
class Table:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)


# -- config helpers --------------------------------------------------------------
def _get(cfg: dict, key: str, kind: Callable = float, default=None, required: bool = False):
    if key not in cfg:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        if kind is list:
            val = cfg[key]
            if not isinstance(val, list) or not val:
                raise TypeError
            return val
        return kind(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"key {key!r} has invalid value {cfg[key]!r}") from None


def _int_list(cfg, key, required=True, default=None):
    vals = _get(cfg, key, list, default, required)
    if vals is None:
        return None
    try:
        out = [int(v) for v in vals]
    except (TypeError, ValueError):
        raise ConfigError(f"{key!r} must be a list of integers") from None
    if any(v < 0 for v in out):
        raise ConfigError(f"{key!r} entries must be non-negative")
    return out


def _float_list(cfg, key, required=True, default=None):
    vals = _get(cfg, key, list, default, required)
    if vals is None:
        return None
    try:
        return [float(v) for v in vals]
    except (TypeError, ValueError):
        raise ConfigError(f"{key!r} must be a list of numbers") from None


def _potential(cfg) -> Potential:
    desc = cfg.get("potential")
    if not isinstance(desc, dict) or "family" not in desc:
        raise ConfigError("'potential' must be an object with a 'family' key")
    try:
        return Potential.from_descriptor(desc)
    except KeyError as exc:
        raise ConfigError(f"potential descriptor is missing {exc}") from None
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid potential descriptor: {exc}") from None


def _field(cfg) -> float:
    B = _get(cfg, "B", float, 1.0)
    if not B > 0:
        raise ConfigError("B must be positive")
    return B


def _bump(d) -> Bump:
    if not isinstance(d, dict):
        raise ConfigError("bumps must be objects with 'center' and 'half_width'")
    try:
        return Bump(float(d["center"]), float(d["half_width"]))
    except KeyError as exc:
        raise ConfigError(f"bump is missing {exc}") from None


def _check_threshold(V: Potential, ells):
    for ell in ells:
        radon.require_threshold(V.rho, ell)


def _quad(cfg):
    q = cfg.get("quadrature", {})
    return landau.QuadratureSpec(
        radial_order=q.get("radial_order"),
        angular_nodes=q.get("angular_nodes"),
        margin=float(q.get("margin", 8.0)),
        tolerance=float(q.get("tolerance", TOLERANCES["quadrature_tol"])),
    )


# -- commands --------------------------------------------------------------------
def cmd_radon(cfg, workers) -> Table:
    V = _potential(cfg)
    n_om = _get(cfg, "omega_count", int, 8)
    b_max = _get(cfg, "b_max", float, 5.0)
    n_b = _get(cfg, "b_count", int, 101)
    if n_om < 1 or n_b < 2 or not b_max > 0:
        raise ConfigError("omega_count >= 1, b_count >= 2 and b_max > 0 are required")
    prof = radon.radon_profile(V, n_om, np.linspace(-b_max, b_max, n_b))
    rows = [[w, b, prof.values[i, j]] for i, w in enumerate(prof.omega) for j, b in enumerate(prof.b)]
    meta = {"decay_constant": radon.decay_check(prof, V)}
    ells = _int_list(cfg, "ellList", required=False)
    if ells:
        _check_threshold(V, ells)
        meta["gamma"] = {str(e): radon.gamma_moment(V, _field(cfg), e) for e in ells}
    return Table(["omega", "b", "value"], rows, meta)


def cmd_spectrum(cfg, workers) -> Table:
    V = _potential(cfg)
    B = _field(cfg)
    quad = _quad(cfg)
    if "qList" in cfg:
        qs = _int_list(cfg, "qList")
        ell = _get(cfg, "ell", float, 2.0)
        _check_threshold(V, [ell])
        norms = landau.norm_scaling_table(V, B, qs, quad=quad, workers=workers)
        schat = landau.schatten_scaling_table(V, B, ell, qs, quad=quad, workers=workers)
        rows = [[q, n, s, int(c1 and c2)] for (q, n, c1), (_, s, c2) in zip(norms, schat)]
        vals = np.array([[r[1], r[2]] for r in rows])
        ratio = (vals.max(axis=0) / vals.min(axis=0)).tolist() if np.all(vals > 0) else [math.nan, math.nan]
        return Table(["q", "scaled_norm", "scaled_schatten", "converged"], rows,
                     {"ell": ell, "max_min_ratio": ratio})
    q = _get(cfg, "q", int, required=True)
    if q < 0:
        raise ConfigError("q must be non-negative")
    if "load_matrix" in cfg:
        T = landau.load_matrix(cfg["load_matrix"])
    else:
        T = landau.toeplitz_matrix(V, B, q, quad=quad, m_max=_get(cfg, "m_max", int))
    if "dump_matrix" in cfg:
        landau.dump_matrix(T, cfg["dump_matrix"])
    ev = T.eigenvalues()
    count = _get(cfg, "count", int, ev.size)
    lam = T.spec.lambda_q
    rows = [[i, e, math.sqrt(lam) * e] for i, e in enumerate(ev[:count])]
    meta = {"m_min": T.range.m_min, "m_max": T.range.m_max, "converged": T.converged}
    if V.integrable and "load_matrix" not in cfg:
        meta["trace"] = T.trace()
        meta["trace_identity_residual"] = landau.trace_identity_residual(T, V)
    return Table(["index", "eigenvalue", "scaled_shift"], rows, meta)


def _report_table(rep: clusters.ConvergenceReport) -> Table:
    rows = [[r["q"], r["functional"], r["lhs"], r["rhs"], r["residual"]] for r in rep.rows]
    return Table(list(rep.columns), rows, dict(rep.meta, slopes=rep.slopes(), passed=rep.passed()))


def cmd_moments(cfg, workers) -> Table:
    V = _potential(cfg)
    ells = _int_list(cfg, "ellList")
    _check_threshold(V, ells)
    rep = clusters.moment_convergence(V, _field(cfg), _int_list(cfg, "qList"), ells, workers=workers)
    return _report_table(rep)


def cmd_distribution(cfg, workers) -> Table:
    V = _potential(cfg)
    bumps = [_bump(b) for b in _get(cfg, "bumps", list, required=True)]
    rep = clusters.distribution_convergence(V, _field(cfg), _int_list(cfg, "qList"), bumps, workers=workers)
    return _report_table(rep)


def cmd_symbols(cfg, workers) -> Table:
    table = cfg.get("table", "gaps")
    B = _field(cfg)
    if table == "delta_sup":
        rho = _get(cfg, "rho", float, 2.0)
        if not rho > 1:
            raise ConfigError("rho must exceed 1")
        rows = [list(r) for r in symbols.delta_conv_sup(rho, B, _float_list(cfg, "kList"))]
        return Table(["k", "scaled_sup", "argmax_radius"], rows, {"rho": rho})
    V = _potential(cfg)
    qs = _int_list(cfg, "qList")
    if table == "gaps":
        rows = [[q, *symbols.symbol_gap_norms(V, B, q)] for q in qs]
        return Table(["q", "l1_fourier_gap", "l2_gap", "scaled_op", "scaled_hs"], rows)
    if table == "hs_oracle":
        rows = []
        for q in qs:
            hs = symbols.hs_trace_oracle(V, B, math.sqrt(2 * q + 1))
            tr2 = landau.toeplitz_matrix(V, B, q).power_sum(2)[0]
            lam = B * (2 * q + 1)
            rows.append([q, hs, tr2, math.sqrt(lam) * abs(hs - tr2)])
        return Table(["q", "hs_oracle", "trace_sq", "scaled_gap"], rows)
    raise ConfigError(f"unknown symbols table {table!r} (gaps, delta_sup, hs_oracle)")


def cmd_semiclassical(cfg, workers) -> Table:
    V = _potential(cfg)
    bump = _bump(cfg.get("bump"))
    rows = radon.semiclassical_limit_residual(V, bump, _field(cfg), _float_list(cfg, "Elist"))
    return Table(["E", "lhs", "target", "residual"], [list(r) for r in rows])


def cmd_appendix(cfg, workers) -> Table:
    rows = []
    for q in _int_list(cfg, "wignerQ", required=False, default=list(range(9))):
        rows.append(["wigner_fourier", q, specfun.wigner_fourier_residual(q), math.nan])
    xs = np.linspace(_get(cfg, "x_min", float, 1e-3), _get(cfg, "x_max", float, 40.0), _get(cfg, "x_count", int, 4000))
    for q in _int_list(cfg, "besselQ", required=False, default=[4, 16, 64, 256]):
        if q < 1:
            raise ConfigError("besselQ entries must be >= 1")
        gap, bound = specfun.laguerre_bessel_gap(q, xs)
        ratio = gap / bound
        i = int(np.argmax(ratio))
        rows.append(["laguerre_bessel_ratio", q, float(ratio[i]), float(xs[i])])
    return Table(["check", "q", "value", "aux"], rows)


def cmd_strongfield(cfg, workers) -> Table:
    V = _potential(cfg)
    q = _get(cfg, "q", int, 0)
    ell = _get(cfg, "ell", int, 2)
    if ell < 1:
        raise ConfigError("ell must be a positive integer")
    _check_threshold(V, [ell])
    rows = landau.strong_field_check(V, q, ell, _float_list(cfg, "Blist"), quad=_quad(cfg), workers=workers)
    return Table(["B", "trace_power", "trace_of_power", "integral"], [list(r) for r in rows])


HANDLERS = {
    "radon": cmd_radon,
    "spectrum": cmd_spectrum,
    "moments": cmd_moments,
    "distribution": cmd_distribution,
    "symbols": cmd_symbols,
    "semiclassical": cmd_semiclassical,
    "appendix": cmd_appendix,
    "strongfield": cmd_strongfield,
}


# -- output ----------------------------------------------------------------------
def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    return v


def render(command: str, table: Table, digest: str, fmt: str) -> str:
    if fmt == "json":
        doc = {"command": command, "config_sha256": digest, "tolerances": TOLERANCES,
               "columns": table.columns, "rows": table.rows, "meta": table.meta}
        return json.dumps(_jsonable(doc), indent=2) + "\n"
    lines = [
        f"# landau-clusters {command}",
        f"# config_sha256: {digest}",
        f"# tolerances: {json.dumps(TOLERANCES, sort_keys=True)}",
    ]
    if table.meta:
        lines.append(f"# meta: {json.dumps(_jsonable(table.meta), sort_keys=True)}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def run(command: str, config: dict, workers: int = 1) -> Table:
    """Validate ``config`` and run one command; raises LandauClustersError subclasses on failure."""
    if command not in HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    declared = config.get("command")
    if declared is not None and declared != command:
        raise ConfigError(f"config is for {declared!r}, not {command!r}")
    return HANDLERS[command](config, workers)


def _error_record(command, exc) -> str:
    kind = getattr(exc, "kind", "error")
    return json.dumps({"status": "error", "command": command, "kind": kind, "message": str(exc)})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="landau-clusters", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=1, help="worker threads for parameter sweeps")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, "rb") as fh:
            raw = fh.read()
        try:
            config = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        table = run(args.command, config, args.threads)
    except OSError as exc:
        print(_error_record(args.command, ConfigError(str(exc))), file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(_error_record(args.command, exc), file=sys.stderr)
        return EXIT_CONFIG
    except LandauClustersError as exc:
        print(_error_record(args.command, exc), file=sys.stderr)
        return EXIT_CONFIG if exc.kind in ("domain", "threshold") else EXIT_NUMERIC
    text = render(args.command, table, hashlib.sha256(raw).hexdigest(), args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
