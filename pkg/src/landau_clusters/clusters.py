"""Empirical cluster measures built from Toeplitz spectra and their convergence reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, TruncationError
from .landau import LandauSpec, _map, toeplitz_matrix
from .potentials import Bump, Potential
from .radon import (
    LimitMeasure,
    gamma_moment,
    interval_mass,
    limit_measure,
    radon_values,
    require_threshold,
)

ATOM_TOL = 1e-3
NOISE_FLOOR = 1e-10


@dataclass
class ClusterMeasure:
    """Counting measure of lambda_q^{1/2} times the eigenvalues of P_q V P_q."""

    spec: LandauSpec
    scaled_shifts: np.ndarray
    cutoff_converged: bool

    @property
    def lambda_q(self) -> float:
        return self.spec.lambda_q

    @property
    def width(self) -> float:
        return float(np.max(np.abs(self.scaled_shifts))) if self.scaled_shifts.size else 0.0


def cluster_measure(V: Potential, B: float, q: int, quad=None) -> ClusterMeasure:
    T = toeplitz_matrix(V, B, q, quad=quad)
    shifts = math.sqrt(T.spec.lambda_q) * T.eigenvalues()
    return ClusterMeasure(T.spec, np.sort(shifts), T.converged)


def test_functional(m: ClusterMeasure, rho_fn: Callable) -> float:
    """lambda_q^{-1/2} sum over shifts of rho_fn(shift)."""
    return float(np.sum(rho_fn(m.scaled_shifts))) / math.sqrt(m.lambda_q)


test_functional.__test__ = False  # not a pytest test


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x (nan if any y vanishes)."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if x.size < 2 or np.any(y <= 0):
        return math.nan
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


@dataclass
class ConvergenceReport:
    """Rows (q, functional, lhs, rhs, residual) plus metadata."""

    rows: list
    meta: dict = field(default_factory=dict)

    columns = ("q", "functional", "lhs", "rhs", "residual")

    def functionals(self) -> list:
        seen = []
        for r in self.rows:
            if r["functional"] not in seen:
                seen.append(r["functional"])
        return seen

    def series(self, functional: str):
        sel = [r for r in self.rows if r["functional"] == functional]
        return np.array([r["q"] for r in sel], float), np.array([r["residual"] for r in sel], float)

    def slope(self, functional: str) -> float:
        return loglog_slope(*self.series(functional))

    def slopes(self) -> dict:
        return {f: self.slope(f) for f in self.functionals()}

    def passed(self) -> bool:
        """Every functional has a negative residual trend (or residuals at rounding level)."""
        for f in self.functionals():
            _, res = self.series(f)
            if np.all(res <= NOISE_FLOOR):
                continue
            if not self.slope(f) < 0:
                return False
        return True

    def to_csv(self, header: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(self.columns)
        for r in self.rows:
            wr.writerow([r["q"], r["functional"], f"{r['lhs']:.17g}", f"{r['rhs']:.17g}", f"{r['residual']:.17g}"])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"meta": self.meta, "slopes": self.slopes(), "rows": self.rows}, indent=2, default=float)


# -- limiting side ---------------------------------------------------------------
def _b_extent(V: Potential, B: float, level: float) -> float:
    """|b| beyond which |B R(w, b)| stays below ``level``."""
    if V.fast_decay:
        return V.effective_radius(1e-20) + 1.0
    # R is bounded by C <b>^{1-rho}; walk outward until the profile drops below level
    b = 8.0
    while b < 1e7:
        om = np.linspace(0.0, 2.0 * math.pi, 1 if V.is_radial else 16, endpoint=False)
        if np.max(np.abs(B * radon_values(V, om, np.array([-b, b])))) < level:
            return b
        b *= 2.0
    raise TruncationError("Radon profile does not fall below the bump supports")


def default_limit_measure(V: Potential, B: float, floor: float, b_step: float = 2.5e-4, omega_count: int | None = None):
    """Limit measure resolving all values of modulus above ``floor``."""
    b_max = _b_extent(V, B, floor)
    n_b = int(math.ceil(2.0 * b_max / b_step))
    n_om = omega_count or (1 if V.is_radial else 128)
    return limit_measure(V, B, n_om, n_b, b_max, eps_floor=floor)


def _support_floor(bumps: Iterable[Bump]) -> float:
    return 0.5 * min(min(abs(a), abs(b)) for a, b in (bump.support for bump in bumps))


def atom_mass(mu: LimitMeasure, t: float, delta: float | None = None) -> float:
    """mu([t - delta, t + delta]): a small value means no atom at t."""
    delta = 1e-6 * max(1.0, abs(t)) if delta is None else delta
    return mu.mass(t - delta, t + delta)


def distribution_convergence(
    V: Potential,
    B: float,
    q_list: Sequence[int],
    bumps: Sequence[Bump],
    mu: LimitMeasure | None = None,
    workers: int = 1,
) -> ConvergenceReport:
    """Compare lambda_q^{-1/2} sum bump(shift) with the integral of the bump against mu."""
    if not bumps:
        raise DomainError("at least one bump is required")
    mu = mu or default_limit_measure(V, B, _support_floor(bumps))
    rhs = [mu.integrate(b) for b in bumps]
    flags = [[atom_mass(mu, e) > ATOM_TOL for e in b.support] for b in bumps]
    measures = _map(lambda q: cluster_measure(V, B, q), list(q_list), workers)
    rows = []
    for m in measures:
        for j, bump in enumerate(bumps):
            lhs = test_functional(m, bump)
            rows.append({"q": m.spec.q, "functional": f"bump[{bump.center:g},{bump.half_width:g}]",
                         "lhs": lhs, "rhs": rhs[j], "residual": abs(lhs - rhs[j])})
    meta = {"potential": V.descriptor(), "B": B, "bumps": [b.descriptor() for b in bumps],
            "boundary_atoms": flags, "cutoff_converged": [m.cutoff_converged for m in measures]}
    return ConvergenceReport(rows, meta)


def moment_convergence(V: Potential, B: float, q_list: Sequence[int], ell_list: Sequence[int],
                       workers: int = 1) -> ConvergenceReport:
    """lambda_q^{(ell-1)/2} Tr (P_q V P_q)^ell against the moment of the limit measure."""
    for ell in ell_list:
        if not V.fast_decay:
            require_threshold(V.rho, ell)
    rhs = {ell: gamma_moment(V, B, ell) for ell in ell_list}

    def row(q):
        T = toeplitz_matrix(V, B, q)
        lam = T.spec.lambda_q
        return q, T.converged, {ell: lam ** ((ell - 1) / 2) * T.power_sum(ell)[0] for ell in ell_list}

    rows, conv = [], []
    for q, ok, lhs in _map(row, list(q_list), workers):
        conv.append(ok)
        for ell in ell_list:
            rows.append({"q": q, "functional": f"moment[{ell}]", "lhs": lhs[ell], "rhs": rhs[ell],
                         "residual": abs(lhs[ell] - rhs[ell])})
    return ConvergenceReport(rows, {"potential": V.descriptor(), "B": B, "ells": list(ell_list),
                                    "cutoff_converged": conv})


def interval_count(V: Potential, B: float, q: int, alpha: float, beta: float,
                   mu: LimitMeasure | None = None, delta: float | None = None):
    """(lambda_q^{-1/2} #{shifts in [alpha, beta]}, mu([alpha, beta]), boundary sensitivity)."""
    if alpha <= 0.0 <= beta:
        raise DomainError("interval must exclude 0")
    m = cluster_measure(V, B, q)
    inside = (m.scaled_shifts >= alpha) & (m.scaled_shifts <= beta)
    count = float(np.count_nonzero(inside)) / math.sqrt(m.lambda_q)
    mu = mu or default_limit_measure(V, B, 0.5 * min(abs(alpha), abs(beta)))
    mass, sens = interval_mass(mu, alpha, beta, delta)
    return count, mass, sens
