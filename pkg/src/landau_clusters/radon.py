"""Radon transform of potentials, the limiting measure and its moments, orbit averages.

Conventions: omega = (cos w, sin w), omega_perp = (-sin w, cos w) and

    Radon[V](w, b) = (1 / 2 pi) int V(b omega + t omega_perp) dt.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, QuadratureError, ThresholdError, TruncationError
from .potentials import Bump, Potential
from .quadrature import composite_gauss_legendre, sinh_sinh

EPS_FLOOR = 1e-12


def _line_offset(V: Potential, w: float) -> float:
    cx, cy = V.center
    return -math.sin(w) * cx + math.cos(w) * cy


def radon_transform(V: Potential, omega: float, b: float, tol: float = 1e-9) -> float:
    """Line integral of V (divided by 2 pi) by adaptive quadrature."""
    if V.is_zero:
        return 0.0
    if not V.fast_decay and V.rho <= 1:
        raise DomainError("lines integrals need rho > 1")
    c, s = math.cos(omega), math.sin(omega)
    f = lambda t: float(V(b * c - t * s, b * s + t * c))
    t0 = _line_offset(V, omega)
    T = V.effective_radius(1e-20) if V.fast_decay else math.inf
    lo, hi = (t0 - T - abs(b), t0 + T + abs(b)) if math.isfinite(T) else (-math.inf, math.inf)
    total, err = 0.0, 0.0
    for a, z in ((lo, t0), (t0, hi)):
        v, e = integrate.quad(f, a, z, epsabs=0.1 * tol, epsrel=1e-12, limit=500)
        total += v
        err += e
    if err > tol * 2 * math.pi:
        raise QuadratureError(f"line integral error estimate {err:.2e} exceeds tolerance")
    return total / (2.0 * math.pi)


def _line_rule(V: Potential, step: float = 1.0 / 16):
    """Nodes and weights in t for vectorised line integrals."""
    if V.fast_decay:
        T = V.effective_radius(1e-20)
        h = V.length_scale
        return composite_gauss_legendre(-T, T, 20, panel=max(0.5 * h, 0.05))
    t, w = sinh_sinh(step, 4.5)
    return t * V.length_scale, w * V.length_scale


def radon_values(V: Potential, omegas, bs, step: float = 1.0 / 16) -> np.ndarray:
    """Radon transform on the tensor grid omegas x bs (shape (len(omegas), len(bs)))."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    bs = np.atleast_1d(np.asarray(bs, dtype=float))
    out = np.zeros((omegas.size, bs.size))
    if V.is_zero:
        return out
    t, w = _line_rule(V, step)
    rows = [0] if V.is_radial else range(omegas.size)
    chunk = max(1, 2_000_000 // max(t.size, 1))
    for i in rows:
        om = omegas[i]
        c, s = math.cos(om), math.sin(om)
        tt = t + _line_offset(V, om)
        for j in range(0, bs.size, chunk):
            b = bs[j:j + chunk, None]
            out[i, j:j + chunk] = V(b * c - tt[None, :] * s, b * s + tt[None, :] * c) @ w
    if V.is_radial:
        out[:] = out[0]
    return out / (2.0 * math.pi)


@dataclass
class RadonProfile:
    omega: np.ndarray
    b: np.ndarray
    values: np.ndarray
    rho: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["omega", "b", "value"])
        for i, w in enumerate(self.omega):
            for j, b in enumerate(self.b):
                wr.writerow([f"{w:.17g}", f"{b:.17g}", f"{self.values[i, j]:.17g}"])
        return buf.getvalue()

    def evenness_residual(self) -> float:
        """max |R(w, b) - R(w + pi, -b)| over grid pairs (needs an even omega count)."""
        n = self.omega.size
        if n % 2:
            raise DomainError("evenness check needs an even number of angles")
        if not np.allclose(self.b, -self.b[::-1]):
            raise DomainError("evenness check needs a symmetric b grid")
        shifted = np.roll(self.values, -n // 2, axis=0)[:, ::-1]
        return float(np.max(np.abs(self.values - shifted)))


def radon_profile(V: Potential, omega_count: int, b_grid) -> RadonProfile:
    """Radon transform sampled on equispaced angles in [0, 2 pi) and the given b grid."""
    omegas = 2.0 * math.pi * np.arange(omega_count) / omega_count
    bs = np.asarray(b_grid, dtype=float)
    return RadonProfile(omegas, bs, radon_values(V, omegas, bs), V.rho)


def decay_check(profile: RadonProfile, V: Potential) -> float:
    """sup |R| <b>^{rho-1} / ||V||_{X_rho} over the profile grid."""
    norm = V.xrho_norm()
    if norm == 0.0:
        return 0.0
    weight = (1.0 + profile.b ** 2) ** (0.5 * (profile.rho - 1.0))
    return float(np.max(np.abs(profile.values) * weight[None, :]) / norm)


# -- limiting measure --------------------------------------------------------------
@dataclass
class LimitMeasure:
    """Weighted point cloud: values B*R(w_i, b_j), weights dw db / (2 pi)."""

    values: np.ndarray
    weights: np.ndarray
    B: float
    rho: float
    support_bound: float
    meta: dict = field(default_factory=dict)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def mass(self, alpha: float, beta: float) -> float:
        """mu([alpha, beta]) from the cloud."""
        sel = (self.values >= alpha) & (self.values <= beta)
        return float(self.weights[sel].sum())

    def integrate(self, fn: Callable) -> float:
        return float(np.dot(self.weights, fn(self.values)))


def _cell_grid(count: int, b_max: float):
    db = 2.0 * b_max / count
    return -b_max + (np.arange(count) + 0.5) * db, db


def limit_measure(
    V: Potential,
    B: float,
    omega_count: int,
    b_count: int,
    b_max: float,
    eps_floor: float = EPS_FLOOR,
    check_truncation: bool = True,
) -> LimitMeasure:
    """Push (1/2 pi) Lebesgue on T x [-b_max, b_max] forward under (w, b) -> B R(w, b)."""
    omegas = 2.0 * math.pi * np.arange(omega_count) / omega_count
    bs, db = _cell_grid(b_count, b_max)
    vals = B * radon_values(V, omegas, bs)
    if check_truncation and not V.is_zero:
        edge = np.max(np.abs(B * radon_values(V, omegas, np.array([-b_max, b_max]))))
        if edge > eps_floor:
            raise TruncationError(f"B*R = {edge:.3e} at |b| = b_max exceeds the floor {eps_floor:.1e}")
    w = np.full(vals.shape, (2.0 * math.pi / omega_count) * db / (2.0 * math.pi))
    bound = float(np.max(np.abs(vals))) if vals.size else 0.0
    return LimitMeasure(vals.ravel(), w.ravel(), B, V.rho, bound,
                        {"omega_count": omega_count, "b_count": b_count, "b_max": b_max})


def limit_measure_from_profile(profile: Callable, B: float, b_count: int, b_max: float, rho: float = math.inf,
                               omega_count: int = 1) -> LimitMeasure:
    """Measure of an omega-independent synthetic profile a(b) (values B*a(b))."""
    bs, db = _cell_grid(b_count, b_max)
    vals = np.tile(B * np.asarray(profile(bs), dtype=float), omega_count)
    w = np.full(vals.shape, db / omega_count)
    return LimitMeasure(vals, w, B, rho, float(np.max(np.abs(vals))),
                        {"omega_count": omega_count, "b_count": b_count, "b_max": b_max, "synthetic": True})


def moment_threshold(rho: float) -> float:
    return 1.0 / (rho - 1.0)


def require_threshold(rho: float, ell: float):
    if math.isfinite(rho) and not ell > moment_threshold(rho):
        raise ThresholdError(f"ell = {ell} violates ell > 1/(rho - 1) = {moment_threshold(rho):.6g}")


def measure_moment(mu: LimitMeasure, ell: float, signed: bool = False, check_threshold: bool = True) -> float:
    """sum weight |value|^ell (or value^ell when ``signed``)."""
    if check_threshold:
        require_threshold(mu.rho, ell)
    v = mu.values ** ell if signed else np.abs(mu.values) ** ell
    return float(np.dot(mu.weights, v))


def interval_mass(mu: LimitMeasure, alpha: float, beta: float, delta: float | None = None):
    """(mu([alpha, beta]), boundary sensitivity under +-delta endpoint moves)."""
    if alpha <= 0.0 <= beta:
        raise DomainError("interval must exclude 0")
    if beta < alpha:
        raise DomainError("empty interval")
    delta = 1e-3 * (beta - alpha) if delta is None else delta
    m = mu.mass(alpha, beta)
    wide = mu.mass(alpha - delta, beta + delta)
    narrow = mu.mass(alpha + delta, beta - delta)
    return m, max(wide - m, m - narrow)


def gamma_moment(V: Potential, B: float, ell: int, check_threshold: bool = True, tol: float = 1e-12) -> float:
    """(B^ell / 2 pi) double integral of R(w, b)^ell db dw."""
    if check_threshold and not V.fast_decay:
        require_threshold(V.rho, ell)
    if V.is_zero:
        return 0.0
    if V.fast_decay:
        R = V.effective_radius(1e-20)
        bs, wb = composite_gauss_legendre(-R, R, 24, panel=max(0.25 * V.length_scale, 0.05))
        cx, cy = V.center
        bs = bs + 0.0
    else:
        bs, wb = sinh_sinh(1.0 / 32, 4.5)

    def at(n):
        omegas = 2.0 * math.pi * np.arange(n) / n
        if V.fast_decay:
            # lines through the centre's projection
            vals = np.stack([
                radon_values(V, [om], bs + (math.cos(om) * cx + math.sin(om) * cy))[0] for om in omegas
            ]) if not V.is_radial else radon_values(V, omegas[:1], bs)
        else:
            vals = radon_values(V, omegas if not V.is_radial else omegas[:1], bs)
        per = (vals ** ell) @ wb
        return float(np.mean(per)) * B ** ell

    if V.is_radial:
        return at(1)
    n, prev = 32, None
    while True:
        cur = at(n)
        if prev is not None and abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        if n >= 2048:
            raise QuadratureError("angular quadrature of the moment did not settle")
        prev, n = cur, 2 * n


# -- classical averages ------------------------------------------------------------
def orbit_average(V: Potential, c, E: float, B: float, tol: float = 1e-13) -> float:
    """Mean of V over the cyclotron circle of radius sqrt(E)/B centred at c."""
    if not E > 0:
        raise DomainError("energy must be positive")
    c = np.atleast_2d(np.asarray(c, dtype=float))
    out = _orbit_average(V, c[:, 0], c[:, 1], math.sqrt(E) / B, tol)
    return out if out.size > 1 else float(out[0])


def _orbit_average(V, cx, cy, R, tol=1e-13, n0=64, nmax=1 << 16):
    n, prev = n0, None
    while True:
        th = 2.0 * math.pi * np.arange(n) / n
        cur = V(cx[:, None] + R * np.cos(th)[None, :], cy[:, None] + R * np.sin(th)[None, :]).mean(axis=1)
        if prev is not None and np.max(np.abs(cur - prev)) <= tol:
            return cur
        if n >= nmax:
            raise QuadratureError("orbit average did not converge")
        prev, n = cur, 2 * n


def _radon_support(V: Potential) -> float:
    if V.fast_decay:
        return V.effective_radius(1e-20)
    raise DomainError("semiclassical comparison needs a fast-decaying potential")


def semiclassical_target(V: Potential, bump: Bump, B: float, b_nodes: int = 4000, omega_count: int = 64) -> float:
    """(1/2 pi) double integral of bump(B R(w, b)) db dw."""
    Rb = _radon_support(V)
    if V.is_zero or Rb == 0.0:
        return 0.0
    cx, cy = V.center
    bs, wb = composite_gauss_legendre(-Rb, Rb, 16, panel=2.0 * Rb * 16 / b_nodes)
    n = 1 if V.is_radial else omega_count
    omegas = 2.0 * math.pi * np.arange(n) / n
    acc = 0.0
    for om in omegas:
        shift = math.cos(om) * cx + math.sin(om) * cy
        acc += bump(B * radon_values(V, [om], bs + shift)[0]) @ wb
    return float(acc / n)


def semiclassical_lhs(V: Potential, bump: Bump, B: float, E: float, p_nodes: int = 4000, omega_count: int = 64):
    """E^{-1/2} (1/2 pi) int bump(sqrt(E) <V>(c, E)) B dc and the boundary mass fraction."""
    R = math.sqrt(E) / B
    Rb = _radon_support(V)
    if V.is_zero or Rb == 0.0:
        return 0.0, 0.0
    cx, cy = V.center
    lo, hi = max(R - Rb, 0.0), R + Rb
    p, wp = composite_gauss_legendre(lo, hi, 16, panel=(hi - lo) * 16 / p_nodes)
    n = 1 if V.is_radial else omega_count
    total, edge = 0.0, 0.0
    for k in range(n):
        om = 2.0 * math.pi * k / n
        avg = _orbit_average(V, cx + p * math.cos(om), cy + p * math.sin(om), R)
        f = bump(math.sqrt(E) * avg) * p * wp
        total += f.sum()
        edge += f[:32].sum() + f[-32:].sum()
    scale = B / math.sqrt(E) / n
    return total * scale, abs(edge * scale)


def semiclassical_limit_residual(V: Potential, bump: Bump, B: float, E_list: Sequence[float], tol: float = 1e-8):
    """Rows (E, lhs, target, residual) for the orbit-average form of the limiting measure."""
    target = semiclassical_target(V, bump, B)
    rows = []
    for E in E_list:
        lhs, edge = semiclassical_lhs(V, bump, B, E)
        if edge > tol:
            raise TruncationError(f"orbit-centre domain cuts mass {edge:.2e} at E = {E}")
        rows.append((E, lhs, target, abs(lhs - target)))
    return rows
