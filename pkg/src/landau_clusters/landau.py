"""Landau-level basis and Berezin-Toeplitz matrices ``P_q V P_q``.

The q-th level is spanned by symmetric-gauge states psi_{q,m}, m >= -q.
Every matrix entry reduces to a one-dimensional integral in s = sqrt(B r^2/2):

    <psi_{q,i}, V psi_{q,j}> = int_0^inf g_i(s) g_j(s) v_{m_i - m_j}(s) ds

where g_m is the L^2(ds)-normalised radial profile (independent of B) and
v_d(s) is the d-th angular Fourier coefficient of V on the circle of radius
r = s sqrt(2/B).  Radial potentials only have v_0 and give diagonal matrices,
which are stored as their diagonal.
"""
from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, QuadratureError, TruncationError
from .potentials import Potential
from .quadrature import composite_gauss_legendre, gauss_legendre, richardson_limit
from .specfun import laguerre_scaled

EPS_FLOOR = 1e-17
CUTOFF_RTOL = 1e-8
MAX_CUTOFF = 1 << 15


@dataclass(frozen=True)
class LandauSpec:
    """Field strength and level index; ``lambda_q = B (2q + 1)``."""

    B: float
    q: int

    def __post_init__(self):
        if not self.B > 0:
            raise DomainError(f"B must be positive, got {self.B}")
        if self.q < 0 or int(self.q) != self.q:
            raise DomainError(f"q must be a non-negative integer, got {self.q}")

    @property
    def lambda_q(self) -> float:
        return self.B * (2 * self.q + 1)


@dataclass(frozen=True)
class BasisRange:
    m_min: int
    m_max: int

    def __post_init__(self):
        if self.m_max < self.m_min:
            raise DomainError("empty angular-momentum range")

    @classmethod
    def for_level(cls, q: int, m_max: int) -> "BasisRange":
        return cls(-q, m_max)

    @property
    def count(self) -> int:
        return self.m_max - self.m_min + 1

    @property
    def ms(self) -> np.ndarray:
        return np.arange(self.m_min, self.m_max + 1)

    def check(self, q: int):
        if self.m_min < -q:
            raise DomainError(f"angular momentum {self.m_min} below the floor -q = {-q}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Radial Gauss-Legendre panels in s = sqrt(B r^2 / 2) and a periodic angular rule.

    ``radial_order`` is the number of nodes per unit length in s (``None``:
    chosen from the oscillation rate sqrt(4q + 2) of the profiles);
    ``margin`` pads each profile's classically allowed window in s.
    """

    radial_order: int | None = None
    angular_nodes: int | None = None
    margin: float = 8.0
    tolerance: float = 1e-10
    radial_map: str = "s = sqrt(B r^2 / 2)"

    def order_for(self, q: int) -> int:
        if self.radial_order is not None:
            return int(self.radial_order)
        return int(math.ceil(math.sqrt(4 * q + 2))) + 16

    def angular_for(self, q: int, rng: BasisRange) -> int:
        need = 4 * (q + max(abs(rng.m_min), abs(rng.m_max))) + 16
        n = max(need, self.angular_nodes or 0)
        return 1 << int(math.ceil(math.log2(n)))


@dataclass
class ToeplitzMatrix:
    """Compression of V to a truncated range of the q-th Landau level.

    ``data`` is the dense Hermitian matrix, or only its diagonal when V is
    radial.  For potentials with algebraic decay ``tail_exponent`` holds
    rho/2 and power sums are extrapolated in the cutoff (see ``power_sum``).
    """

    spec: LandauSpec
    range: BasisRange
    data: np.ndarray
    assembly_tolerance: float
    converged: bool = True
    tail_exponent: float | None = None
    notes: dict = field(default_factory=dict)

    @property
    def is_diagonal(self) -> bool:
        return self.data.ndim == 1

    @property
    def size(self) -> int:
        return self.range.count

    @property
    def entries(self) -> np.ndarray:
        """Dense complex matrix (materialised from the diagonal if needed)."""
        if self.is_diagonal:
            return np.diag(self.data.astype(complex))
        return self.data

    def eigenvalues(self) -> np.ndarray:
        """Spectrum sorted by decreasing absolute value."""
        ev = self.data.real.copy() if self.is_diagonal else np.linalg.eigvalsh(self.data)
        return ev[np.argsort(-np.abs(ev), kind="stable")]

    def power_sum(self, ell: float, absolute: bool = False) -> tuple[float, float]:
        """``sum eig^ell`` (or ``sum |eig|^ell``) and an error estimate.

        For algebraically decaying radial V the partial sums over the
        diagonal are extrapolated in the cutoff M with exponents
        rho ell / 2 - 1 + j, j = 0, 1, ...
        """
        ev = self.data.real if self.is_diagonal else np.linalg.eigvalsh(self.data)
        f = np.abs(ev) ** ell if absolute else ev ** ell if float(ell).is_integer() else np.abs(ev) ** ell
        total = float(np.sum(f))
        if self.tail_exponent is None or not self.is_diagonal or not np.any(f):
            return total, 0.0
        p0 = self.tail_exponent * ell - 1.0
        if p0 <= 0:
            return math.inf, math.inf
        npos = self.range.m_max + 1
        offset = self.range.count - npos
        cuts = [npos // 8, npos // 4, npos // 2, npos]
        csum = np.cumsum(f)
        vals = [csum[offset + c - 1] for c in cuts]
        return richardson_limit(cuts, vals, [p0 + j for j in range(3)])

    def trace(self) -> float:
        return self.power_sum(1)[0]

    def operator_norm(self) -> float:
        ev = self.eigenvalues()
        return float(abs(ev[0])) if ev.size else 0.0

    def schatten_norm(self, ell: float) -> float:
        return self.power_sum(ell, absolute=True)[0] ** (1.0 / ell)


# -- radial profiles -----------------------------------------------------------
def _degree_order(q: int, m):
    m = np.asarray(m, dtype=np.int64)
    alpha = np.abs(m)
    n = np.where(m >= 0, q, q + m)
    if np.any(n < 0):
        raise DomainError(f"angular momentum below -q = {-q}")
    return n, alpha


def radial_profile(q: int, m, s):
    """L^2(ds)-normalised radial profile g_m(s) of psi_{q,m}; broadcasts over m and s."""
    n, alpha = _degree_order(q, m)
    s = np.asarray(s, dtype=float)
    n, alpha, s = np.broadcast_arrays(n, alpha, s)
    mant, logs = laguerre_scaled(n, alpha, s * s)
    with np.errstate(divide="ignore"):
        logpre = 0.5 * (math.log(2.0) + gammaln(n + 1.0) - gammaln(n + alpha + 1.0)) + (alpha + 0.5) * np.log(s) - 0.5 * s * s
    out = mant * np.exp(logpre + logs)
    return np.where(s > 0, out, 0.0)


def basis_eval(spec: LandauSpec, m: int, r, theta):
    """psi_{q,m}(r, theta) in the symmetric gauge, normalised in L^2(R^2)."""
    if m < -spec.q:
        raise DomainError(f"angular momentum {m} below -q = {-spec.q}")
    n, alpha = _degree_order(spec.q, m)
    n, alpha = int(n), int(alpha)
    r = np.asarray(r, dtype=float)
    s = np.sqrt(0.5 * spec.B) * r
    mant, logs = laguerre_scaled(n, alpha, s * s)
    with np.errstate(divide="ignore"):
        logabs = (0.5 * (math.log(spec.B / (2 * math.pi)) + gammaln(n + 1.0) - gammaln(n + alpha + 1.0))
                  + (alpha * np.log(s) if alpha else 0.0) - 0.5 * s * s + logs)
    mag = mant * np.exp(logabs)
    if alpha > 0:
        mag = np.where(s > 0, mag, 0.0)
    out = mag * np.exp(1j * m * np.asarray(theta, dtype=float))
    return out if out.ndim else complex(out)


def turning_points(q: int, m):
    """Classically allowed window [s_-, s_+] of g_m in the s variable."""
    n, alpha = _degree_order(q, m)
    nu = 4.0 * n + 2.0 * alpha + 2.0
    disc = np.sqrt(np.maximum(nu * nu - 4.0 * alpha * alpha, 0.0))
    return np.sqrt(0.5 * (nu - disc)), np.sqrt(0.5 * (nu + disc))


def peak_radius(spec: LandauSpec, m: int = 0, points: int = 20001) -> float:
    """Radius maximising the radial probability density r |psi_{q,m}|^2."""
    _, sp = turning_points(spec.q, m)
    s = np.linspace(1e-9, float(sp) + 4.0, points)
    g2 = radial_profile(spec.q, m, s) ** 2
    return float(s[np.argmax(g2)] * math.sqrt(2.0 / spec.B))


def rms_radius(spec: LandauSpec, m: int = 0) -> float:
    """sqrt(<r^2>) of psi_{q,m}; equals sqrt((4q + 2)/B) for m = 0."""
    sm, sp = turning_points(spec.q, m)
    s, w = composite_gauss_legendre(max(float(sm) - 8.0, 0.0), float(sp) + 8.0, 40, panel=1.0)
    g2 = radial_profile(spec.q, m, s) ** 2
    return math.sqrt(float(np.dot(w, g2 * s * s)) * 2.0 / spec.B)


# -- potential support ---------------------------------------------------------
def _support_s(V: Potential, B: float) -> float:
    """s beyond which V is below the floor (inf for algebraic decay)."""
    R = V.effective_radius(EPS_FLOOR)
    return R * math.sqrt(0.5 * B) if math.isfinite(R) else math.inf


def _windows(q: int, ms, margin: float, s_cap: float):
    sm, sp = turning_points(q, ms)
    a = np.maximum(sm - margin, 0.0)
    b = np.minimum(sp + margin, s_cap)
    return a, b


def _diagonal_block(q: int, ms, vfun, order: int, margin: float, s_cap: float) -> np.ndarray:
    """Diagonal entries int g_m^2 v_0 ds for a block of m (per-m windows)."""
    ms = np.asarray(ms)
    a, b = _windows(q, ms, margin, s_cap)
    out = np.zeros(ms.size)
    live = b > a
    if not live.any():
        return out
    a, b, ml = a[live], b[live], ms[live]
    npan = int(math.ceil(float(np.max(b - a))))
    x, w = gauss_legendre(0.0, 1.0, order)
    edges = np.arange(npan)[:, None] + x[None, :]
    t = (edges / npan).ravel()
    wt = np.tile(w, npan) / npan
    s = a[:, None] + (b - a)[:, None] * t[None, :]
    ws = (b - a)[:, None] * wt[None, :]
    g = radial_profile(q, ml[:, None], s)
    out[live] = np.sum(ws * g * g * vfun(s), axis=1)
    return out


def _radial_vfun(V: Potential, B: float):
    c = math.sqrt(2.0 / B)
    return lambda s: V.radial(s * c)


def _diagonal(q: int, ms, vfun, order: int, margin: float, s_cap: float, block: int = 256) -> np.ndarray:
    ms = np.asarray(ms)
    return np.concatenate([
        _diagonal_block(q, ms[i:i + block], vfun, order, margin, s_cap) for i in range(0, ms.size, block)
    ]) if ms.size else np.zeros(0)


def _check_refinement(q, ms, vfun, order, margin, s_cap, diag, tol):
    """Doubling the nodes on a sample of m must not move the entries."""
    idx = np.unique(np.linspace(0, ms.size - 1, min(ms.size, 24)).astype(int))
    fine = _diagonal(q, ms[idx], vfun, 2 * order, margin, s_cap)
    scale = max(float(np.max(np.abs(diag))), EPS_FLOOR)
    err = float(np.max(np.abs(fine - diag[idx])))
    if err > tol * scale:
        raise QuadratureError(f"radial quadrature moved by {err:.3e} under node doubling")
    return err


def _dense(spec: LandauSpec, V: Potential, rng: BasisRange, quad: QuadratureSpec) -> np.ndarray:
    q, B = spec.q, spec.B
    ms = rng.ms
    order = quad.order_for(q)
    a, b = _windows(q, ms, quad.margin, _support_s(V, B))
    lo, hi = float(np.min(a)), float(np.max(b))
    if hi <= lo:
        return np.zeros((rng.count, rng.count), dtype=complex)
    s, ws = composite_gauss_legendre(lo, hi, order, panel=1.0)
    G = radial_profile(q, ms[:, None], s[None, :])
    ntheta = quad.angular_for(q, rng)
    theta = 2.0 * math.pi * np.arange(ntheta) / ntheta
    r = s * math.sqrt(2.0 / B)
    X = r[:, None] * np.cos(theta)[None, :]
    Y = r[:, None] * np.sin(theta)[None, :]
    coeff = np.fft.fft(V(X, Y), axis=1) / ntheta  # coeff[:, d] = v_d(s)
    vmax = float(np.max(np.abs(coeff[:, 0]))) or float(np.max(np.abs(coeff)))
    T = np.zeros((rng.count, rng.count), dtype=complex)
    for d in range(rng.count):
        vd = coeff[:, d % ntheta]
        if np.max(np.abs(vd)) <= EPS_FLOOR * vmax:
            continue
        # entries (i, i - d) couple m_i - m_j = d
        vals = (G[d:] * G[: rng.count - d] * (ws * vd)[None, :]).sum(axis=1)
        idx = np.arange(d, rng.count)
        T[idx, idx - d] = vals
        if d:
            T[idx - d, idx] = np.conj(vals)
    return 0.5 * (T + T.conj().T)


def assemble_toeplitz(spec: LandauSpec, V: Potential, rng: BasisRange, quad: QuadratureSpec | None = None) -> ToeplitzMatrix:
    """Matrix of <psi_{q,m_i}, V psi_{q,m_j}> on the given range (no cutoff search)."""
    quad = quad or QuadratureSpec()
    rng.check(spec.q)
    tail = None if V.fast_decay else 0.5 * V.rho
    if V.is_zero:
        return ToeplitzMatrix(spec, rng, np.zeros(rng.count), quad.tolerance, True, None)
    if V.is_radial:
        order = quad.order_for(spec.q)
        s_cap = _support_s(V, spec.B)
        vfun = _radial_vfun(V, spec.B)
        diag = _diagonal(spec.q, rng.ms, vfun, order, quad.margin, s_cap)
        err = _check_refinement(spec.q, rng.ms, vfun, order, quad.margin, s_cap, diag, quad.tolerance)
        return ToeplitzMatrix(spec, rng, diag, quad.tolerance, True, tail, {"refinement_error": err})
    T = _dense(spec, V, rng, quad)
    return ToeplitzMatrix(spec, rng, T, quad.tolerance, True, tail)


def initial_cutoff(spec: LandauSpec, V: Potential) -> int:
    return 4 * spec.q + 64


def toeplitz_matrix(
    V: Potential,
    B: float,
    q: int,
    quad: QuadratureSpec | None = None,
    m_max: int | None = None,
    rtol: float = CUTOFF_RTOL,
    max_cutoff: int = MAX_CUTOFF,
) -> ToeplitzMatrix:
    """Assemble ``P_q V P_q`` with the cutoff doubled until trace and sum |eig|^2 settle.

    For algebraically decaying V the settled quantities are the extrapolated
    power sums (sum |eig|^2 only, if V is not integrable).
    """
    spec = LandauSpec(B, q)
    quad = quad or QuadratureSpec()
    if m_max is not None:
        return assemble_toeplitz(spec, V, BasisRange.for_level(q, m_max), quad)
    if V.is_zero:
        return assemble_toeplitz(spec, V, BasisRange.for_level(q, 0), quad)

    def summary(T: ToeplitzMatrix):
        vals = [T.power_sum(2, absolute=True)[0]]
        if V.integrable:
            vals.append(T.power_sum(1)[0])
        return np.array(vals)

    M = initial_cutoff(spec, V)
    if V.is_radial:
        return _radial_cutoff_loop(spec, V, quad, M, rtol, max_cutoff)
    T = assemble_toeplitz(spec, V, BasisRange.for_level(q, M), quad)
    prev = summary(T)
    while 2 * M <= max_cutoff:
        M *= 2
        T = assemble_toeplitz(spec, V, BasisRange.for_level(q, M), quad)
        cur = summary(T)
        if _settled(prev, cur, rtol):
            return T
        prev = cur
    T.converged = False
    return T


def _settled(prev, cur, rtol) -> bool:
    """Changes below rtol, the trace measured against the Hilbert-Schmidt norm."""
    scale = np.maximum(np.abs(cur), EPS_FLOOR)
    if cur.size > 1:
        scale[1] = max(scale[1], math.sqrt(cur[0]))
    return bool(np.all(np.abs(cur - prev) <= rtol * scale))


def _radial_cutoff_loop(spec, V, quad, M, rtol, max_cutoff):
    """Radial V: extend the diagonal block by block; entries do not depend on the cutoff."""
    q, B = spec.q, spec.B
    order = quad.order_for(q)
    s_cap = _support_s(V, B)
    vfun = _radial_vfun(V, B)
    diag = _diagonal(q, np.arange(-q, M + 1), vfun, order, quad.margin, s_cap)
    err = _check_refinement(q, np.arange(-q, M + 1), vfun, order, quad.margin, s_cap, diag, quad.tolerance)
    tail = None if V.fast_decay else 0.5 * V.rho

    def make(d, m_max, ok):
        return ToeplitzMatrix(spec, BasisRange(-q, m_max), d, quad.tolerance, ok, tail, {"refinement_error": err})

    def summary(T):
        vals = [T.power_sum(2, absolute=True)[0]]
        if V.integrable:
            vals.append(T.power_sum(1)[0])
        return np.array(vals)

    T = make(diag, M, True)
    prev = summary(T)
    while 2 * M <= max_cutoff:
        ext = _diagonal(q, np.arange(M + 1, 2 * M + 1), vfun, order, quad.margin, s_cap)
        diag = np.concatenate([diag, ext])
        M *= 2
        T = make(diag, M, True)
        cur = summary(T)
        if _settled(prev, cur, rtol):
            return T
        prev = cur
    T.converged = False
    return T


# -- derived quantities --------------------------------------------------------
def toeplitz_trace(T: ToeplitzMatrix) -> float:
    return T.trace()


def trace_identity_residual(T: ToeplitzMatrix, V: Potential, B: float | None = None) -> float:
    """|Tr T - (B / 2 pi) int V| with the integral from an independent 2D quadrature."""
    B = T.spec.B if B is None else B
    if not V.integrable:
        raise DomainError(f"trace identity needs an integrable V (rho > 2), got rho={V.rho}")
    return abs(toeplitz_trace(T) - B / (2.0 * math.pi) * V.integral())


def toeplitz_eigs(T: ToeplitzMatrix) -> np.ndarray:
    return T.eigenvalues()


def cutoff_stable_eigs(V: Potential, B: float, q: int, count: int = 10, tol: float = 1e-8, quad=None):
    """Leading eigenvalues and whether doubling the cutoff moves none of them by more than tol."""
    T = toeplitz_matrix(V, B, q, quad=quad)
    ev = T.eigenvalues()[:count]
    T2 = toeplitz_matrix(V, B, q, quad=quad, m_max=2 * T.range.m_max)
    ev2 = T2.eigenvalues()[:count]
    n = min(ev.size, ev2.size)
    return ev, bool(np.all(np.abs(ev[:n] - ev2[:n]) <= tol))


def _map(fn, items, workers: int):
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def norm_scaling_table(V: Potential, B: float, q_list: Iterable[int], quad=None, workers: int = 1):
    """Rows (q, lambda_q^{1/2} B^{-1} ||P_q V P_q||, converged)."""
    def row(q):
        T = toeplitz_matrix(V, B, q, quad=quad)
        lam = T.spec.lambda_q
        return (q, math.sqrt(lam) / B * T.operator_norm(), T.converged)
    return _map(row, list(q_list), workers)


def check_threshold(rho: float, ell: float):
    from .errors import ThresholdError

    if not ell > 1.0 / (rho - 1.0):
        raise ThresholdError(f"ell = {ell} violates ell > 1/(rho - 1) = {1.0 / (rho - 1.0):.6g}")


def schatten_scaling_table(V: Potential, B: float, ell: float, q_list: Iterable[int], quad=None, workers: int = 1):
    """Rows (q, lambda_q^{(ell-1)/(2 ell)} B^{-1} ||P_q V P_q||_ell, converged)."""
    if not V.fast_decay:
        check_threshold(V.rho, ell)

    def row(q):
        T = toeplitz_matrix(V, B, q, quad=quad)
        lam = T.spec.lambda_q
        return (q, lam ** ((ell - 1) / (2 * ell)) / B * T.schatten_norm(ell), T.converged)
    return _map(row, list(q_list), workers)


def strong_field_check(V: Potential, q: int, ell: int, B_list: Sequence[float], quad=None, workers: int = 1):
    """Rows (B, B^{-1} Tr (P_q V P_q)^ell, B^{-1} Tr P_q V^ell P_q, (1/2 pi) int V^ell)."""
    Vl = V.pow(ell)
    target = Vl.integral() / (2.0 * math.pi)

    def row(B):
        T = toeplitz_matrix(V, B, q, quad=quad)
        Tl = toeplitz_matrix(Vl, B, q, quad=quad)
        return (B, T.power_sum(ell)[0] / B, Tl.trace() / B, target)
    return _map(row, list(B_list), workers)


# -- binary dump ---------------------------------------------------------------
_HEADER = struct.Struct("<dqqq")


def dump_matrix(T: ToeplitzMatrix, path) -> None:
    """Header (B: f64, q, m_min, m_max: i64, little-endian) then row-major complex128."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(float(T.spec.B), int(T.spec.q), int(T.range.m_min), int(T.range.m_max)))
        fh.write(np.ascontiguousarray(T.entries, dtype="<c16").tobytes())


def load_matrix(path, tolerance: float = 0.0) -> ToeplitzMatrix:
    with open(path, "rb") as fh:
        raw = fh.read()
    B, q, m_min, m_max = _HEADER.unpack_from(raw)
    rng = BasisRange(m_min, m_max)
    body = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    if body.size != rng.count ** 2:
        raise TruncationError(f"matrix body has {body.size} entries, expected {rng.count ** 2}")
    return ToeplitzMatrix(LandauSpec(B, q), rng, body.reshape(rng.count, rng.count).astype(complex), tolerance)
