"""Phase-space symbols of the Landau-level compressions on uniform FFT grids.

The compression of V to the q-th level is unitarily equivalent to a Weyl
operator with symbol s_q = V_B * Psi_q, where V_B(x, y) = V(-y/sqrt(B), -x/sqrt(B)).
For large q this symbol is close to t_k = V_B * delta_k (circle average at
radius k = sqrt(2q + 1)).  Both convolutions are Fourier multipliers:

    s_q^ = V_B^ . L_q(|z|^2/2) e^{-|z|^2/4},     t_k^ = V_B^ . J0(k |z|)

with the unitary transform f^(z) = (1/2 pi) int f(x) e^{-i x.z} dx.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError, QuadratureError
from .potentials import Potential
from .radon import _orbit_average
from .specfun import bessel_j0, centered_grid, fourier2, inverse_fourier2, laguerre_weighted

EPS_FLOOR = 1e-17
NYQUIST_TOL = 1e-12
MAX_SIZE = 4096


@dataclass
class SymbolGrid:
    """Samples on [-L, L)^2 (``size`` points per axis) and their unitary Fourier transform."""

    half_width: float
    size: int
    values: np.ndarray
    fourier_values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.size

    @property
    def dzeta(self) -> float:
        return math.pi / self.half_width

    def axes(self):
        return centered_grid(self.half_width, self.size)

    def l2_norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2)) * self.dx ** 2)

    def fourier_l2_norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.fourier_values) ** 2)) * self.dzeta ** 2)

    def parseval_residual(self) -> float:
        a, b = self.l2_norm(), self.fourier_l2_norm()
        return abs(a - b) / max(a, b) if max(a, b) > 0 else 0.0

    def conjugate_symmetry_residual(self) -> float:
        """max |F(z) - conj F(-z)| (index -k maps to N - k in shifted order)."""
        F = self.fourier_values
        R = np.conj(np.roll(F[::-1, ::-1], 1, axis=(0, 1)))
        return float(np.max(np.abs(F - R)))

    def nyquist_energy(self) -> float:
        return nyquist_energy(self.fourier_values)


def nyquist_energy(F: np.ndarray, shell: float = 0.9) -> float:
    """Fraction of |F|^2 carried by frequencies beyond ``shell`` times the Nyquist radius."""
    n = F.shape[0]
    k = np.arange(n) - n // 2
    K = np.maximum(np.abs(k)[:, None], np.abs(k)[None, :])
    tot = float(np.sum(np.abs(F) ** 2))
    if tot == 0.0:
        return 0.0
    return float(np.sum(np.abs(F[K >= shell * (n // 2)]) ** 2)) / tot


def _vb_values(V: Potential, B: float, x, y):
    c = 1.0 / math.sqrt(B)
    return V(-c * y, -c * x)


def vb_function(V: Potential, B: float):
    """Pointwise V_B."""
    return lambda x, y: _vb_values(V, B, np.asarray(x, float), np.asarray(y, float))


def _support_radius(V: Potential, B: float) -> float:
    R = V.effective_radius(EPS_FLOOR)
    if not math.isfinite(R):
        raise DomainError("symbol grids need a fast-decaying potential")
    return math.sqrt(B) * R


def _pow2(n: float) -> int:
    return 1 << max(3, int(math.ceil(math.log2(max(n, 8)))))


def grid_params(V: Potential, B: float, radius: float = 0.0, margin: float = 12.0) -> tuple[float, int]:
    """Half-width covering V_B and a ring of the given radius; spacing from V_B's length scale."""
    L = max(_support_radius(V, B) if not V.is_zero else 0.0, radius + margin)
    dx = 0.25 * min(1.0, math.sqrt(B) * V.length_scale)
    return L, _pow2(2.0 * L / dx)


def _transform(V: Potential, B: float, L: float, N: int):
    x, _ = centered_grid(L, N)
    X, Y = np.meshgrid(x, x, indexing="ij")
    vals = _vb_values(V, B, X, Y)
    return vals, fourier2(vals, L)


def vb_symbol(V: Potential, B: float, half_width: float | None = None, size: int | None = None,
              tol: float = NYQUIST_TOL) -> SymbolGrid:
    """V_B on a grid, with the Fourier scaling law checked against the B = 1 transform.

    ``meta['scaling_residual']`` is max |V_B^(z) - B V_1^(sqrt(B) z)|, the B = 1
    transform taken on the grid of half-width L / sqrt(B) whose frequency
    nodes are exactly sqrt(B) z.
    """
    if half_width is None or size is None:
        L0, N0 = grid_params(V, B)
        half_width = half_width or L0
        size = size or N0
    if size & (size - 1):
        raise DomainError("grid size must be a power of two")
    if not V.is_zero and half_width < _support_radius(V, B):
        raise DomainError(f"half-width {half_width} does not cover the support of V_B")
    while True:
        vals, F = _transform(V, B, half_width, size)
        if nyquist_energy(F) <= tol or size >= MAX_SIZE:
            break
        size *= 2
    if nyquist_energy(F) > tol:
        raise QuadratureError("V_B is not resolved: Nyquist-shell energy above tolerance")
    _, F1 = _transform(V, 1.0, half_width / math.sqrt(B), size)
    scaling = float(np.max(np.abs(F - B * F1)))
    return SymbolGrid(half_width, size, vals, F, {"B": B, "scaling_residual": scaling})


def _radius(zeta_axis):
    return np.hypot(zeta_axis[:, None], zeta_axis[None, :])


def laguerre_gauss_multiplier(q: int, zabs):
    """L_q(|z|^2 / 2) e^{-|z|^2 / 4}: Fourier multiplier of convolution with Psi_q."""
    return laguerre_weighted(q, 0.5 * zabs * zabs)


def bessel_multiplier(k: float, zabs):
    """J0(k |z|): Fourier multiplier of the normalised circle average at radius k."""
    return bessel_j0(k * zabs)


def _apply(base: SymbolGrid, mult: np.ndarray, tol: float, label: str) -> SymbolGrid:
    F = base.fourier_values * mult
    if nyquist_energy(F) > tol:
        raise QuadratureError(f"{label}: aliasing, Nyquist-shell energy above tolerance")
    vals = inverse_fourier2(F, base.half_width).real
    return SymbolGrid(base.half_width, base.size, vals, F, dict(base.meta, symbol=label))


def _base_for(V, B, radius, half_width, size):
    if half_width is None or size is None:
        L, N = grid_params(V, B, radius)
        half_width, size = half_width or L, size or N
    return vb_symbol(V, B, half_width, size)


def symbol_sq(V: Potential, B: float, q: int, half_width: float | None = None, size: int | None = None,
              tol: float = NYQUIST_TOL) -> SymbolGrid:
    """s_q = V_B * Psi_q via the Laguerre-Gauss multiplier."""
    base = _base_for(V, B, math.sqrt(2 * q + 1), half_width, size)
    _, z = base.axes()
    return _apply(base, laguerre_gauss_multiplier(q, _radius(z)), tol, f"s_{q}")


def symbol_tk(V: Potential, B: float, k: float, half_width: float | None = None, size: int | None = None,
              tol: float = NYQUIST_TOL) -> SymbolGrid:
    """t_k = V_B * delta_k via the J0 multiplier."""
    base = _base_for(V, B, k, half_width, size)
    _, z = base.axes()
    return _apply(base, bessel_multiplier(k, _radius(z)), tol, f"t_{k:g}")


def symbol_gap_norms(V: Potential, B: float, q: int, half_width: float | None = None, size: int | None = None):
    """(l1 Fourier gap, l2 gap, scaled op bound, scaled HS gap) between s_q and t_{sqrt(2q+1)}.

    l1 = (2 pi)^{-1} ||s^ - t^||_1 bounds the operator norm of the difference;
    l2 = (2 pi)^{-1/2} ||s - t||_2 is its Hilbert-Schmidt norm.  The scaled
    columns multiply by lambda_q^{3/4} / B.
    """
    if V.is_zero:
        return 0.0, 0.0, 0.0, 0.0
    k = math.sqrt(2 * q + 1)
    if half_width is None or size is None:
        L, N = grid_params(V, B, k)
        # doubled box: the sum over the frequency grid then resolves J0(k|z|)
        half_width, size = half_width or 2.0 * L, size or 2 * N
    base = vb_symbol(V, B, half_width, size)
    _, z = base.axes()
    zr = _radius(z)
    diff = base.fourier_values * (laguerre_gauss_multiplier(q, zr) - bessel_multiplier(k, zr))
    if nyquist_energy(diff) > NYQUIST_TOL:
        raise QuadratureError("gap symbol not resolved on the grid")
    dz2 = base.dzeta ** 2
    l1 = float(np.sum(np.abs(diff))) * dz2 / (2.0 * math.pi)
    l2 = math.sqrt(float(np.sum(np.abs(diff) ** 2)) * dz2 / (2.0 * math.pi))
    lam = B * (2 * q + 1)
    s = lam ** 0.75 / B
    return l1, l2, s * l1, s * l2


def hs_trace_oracle(V: Potential, B: float, k: float, half_width: float | None = None, size: int | None = None) -> float:
    """Tr Op(t_k)^2 = (2 pi)^{-1} ||t_k||_2^2 (Parseval on the Fourier side)."""
    if V.is_zero:
        return 0.0
    t = symbol_tk(V, B, k, half_width, size)
    return float(np.sum(np.abs(t.fourier_values) ** 2)) * t.dzeta ** 2 / (2.0 * math.pi)


def hs_trace_sq(V: Potential, B: float, q: int, half_width: float | None = None, size: int | None = None) -> float:
    """(2 pi)^{-1} ||s_q||_2^2, which equals Tr (P_q V P_q)^2 exactly."""
    if V.is_zero:
        return 0.0
    s = symbol_sq(V, B, q, half_width, size)
    return float(np.sum(np.abs(s.fourier_values) ** 2)) * s.dzeta ** 2 / (2.0 * math.pi)


# -- circle averages of <x>^{-rho} ---------------------------------------------------
def circle_average(V: Potential, B: float, k: float, z):
    """t_k(z) = mean of V_B over the circle of radius k about z (direct angular quadrature)."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    # V_B is V composed with a linear map; average V over the mapped circle
    c = 1.0 / math.sqrt(B)
    return _orbit_average(V, -c * z[:, 1], -c * z[:, 0], c * k)


def delta_conv_sup(rho: float, B: float, k_list, points: int = 2001):
    """Rows (k, k B^{-1/2} sup_z t_k(z), argmax |z|) for V = <x>^{-rho}.

    V_B is radial, so t_k is radial too and the supremum is taken over a
    dense radial grid, then polished with a bounded scalar search.
    """
    V = Potential.power_decay(rho)
    rows = []
    for k in k_list:
        r = np.linspace(0.0, 2.0 * k + 4.0 * math.sqrt(B), points)
        vals = circle_average(V, B, k, np.stack([r, np.zeros_like(r)], axis=1))
        i = int(np.argmax(vals))
        lo, hi = r[max(i - 1, 0)], r[min(i + 1, r.size - 1)]
        f = lambda x: -float(circle_average(V, B, k, [[x, 0.0]])[0])
        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
        best, arg = (-res.fun, res.x) if -res.fun >= vals[i] else (vals[i], r[i])
        rows.append((k, k / math.sqrt(B) * best, float(arg)))
    return rows
