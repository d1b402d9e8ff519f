"""Special functions: Laguerre/Hermite families, Bessel J0/Y0, Wigner functions.

Everything here is vectorised over numpy arrays.  Polynomials that are only
ever used inside an exponentially weighted combination are evaluated with a
running log-scale so that degrees in the hundreds do not overflow.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = [
    "laguerre",
    "glaguerre",
    "laguerre_scaled",
    "laguerre_weighted",
    "hermite",
    "hermite_fn",
    "bessel_j0",
    "bessel_y0",
    "wigner_psi",
    "wigner_fourier_residual",
    "laguerre_bessel_gap",
]

_RESCALE = 1e150
EULER_GAMMA = 0.57721566490153286061


def laguerre(q: int, x):
    """Laguerre polynomial L_q(x) by the forward three-term recurrence."""
    return glaguerre(q, 0.0, x)


def glaguerre(q: int, alpha: float, x):
    """Generalised Laguerre polynomial L_q^{(alpha)}(x)."""
    if q < 0:
        raise DomainError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if q == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for k in range(1, q):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_scaled(n, alpha, x):
    """L_n^{(alpha)}(x) as ``(mantissa, log_scale)`` with L = mantissa * exp(log_scale).

    ``n``, ``alpha`` and ``x`` broadcast against each other; ``n`` may differ
    per element.  The recurrence is renormalised whenever the iterate grows
    past 1e150, so arbitrary degrees and orders are safe.
    """
    n, alpha, x = np.broadcast_arrays(
        np.asarray(n, dtype=np.int64), np.asarray(alpha, dtype=float), np.asarray(x, dtype=float)
    )
    if np.any(n < 0):
        raise DomainError("degree must be non-negative")
    prev = np.ones(x.shape)
    cur = np.where(n >= 1, 1.0 + alpha - x, prev)
    logs = np.zeros(x.shape)
    nmax = int(n.max()) if n.size else 0
    for k in range(1, nmax):
        active = n > k
        nxt = ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
        prev = np.where(active, cur, prev)
        cur = np.where(active, nxt, cur)
        big = np.abs(cur) > _RESCALE
        if big.any():
            f = np.where(big, np.abs(cur), 1.0)
            cur = cur / f
            prev = prev / f
            logs = logs + np.log(f)
    return cur, logs


def laguerre_weighted(q: int, x):
    """e^{-x/2} L_q(x), finite for every finite x and any degree."""
    x = np.asarray(x, dtype=float)
    mant, logs = laguerre_scaled(q, 0.0, x)
    with np.errstate(over="ignore", under="ignore"):
        out = mant * np.exp(logs - 0.5 * x)
    return out if out.ndim else float(out)


def hermite(q: int, x):
    """Physicists' Hermite polynomial H_q(x) (unweighted)."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if q == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * x
    for k in range(1, q):
        prev, cur = cur, 2.0 * x * cur - 2.0 * k * prev
    return cur if cur.ndim else float(cur)


def hermite_fn(q: int, x):
    """Normalised Hermite function phi_q(x) = H_q(x) e^{-x^2/2} / (sqrt(pi) 2^q q!)^{1/2}.

    Uses the orthonormal recurrence with the Gaussian factor applied at the
    end through a tracked log-scale, so large |x| or q neither overflows nor
    underflows prematurely.
    """
    if q < 0:
        raise DomainError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.full(x.shape, math.pi ** -0.25)
    logs = np.zeros(x.shape)
    cur = math.sqrt(2.0) * x * prev
    if q == 0:
        cur = prev
    for k in range(1, q):
        nxt = math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            f = np.where(big, np.abs(cur), 1.0)
            cur, prev = cur / f, prev / f
            logs = logs + np.log(f)
    with np.errstate(under="ignore"):
        out = cur * np.exp(logs - 0.5 * x * x)
    return out if out.ndim else float(out)


# --- Bessel functions -------------------------------------------------------

_SERIES_TERMS = 40
_MILLER_START = 100
_SPLIT_SERIES = 8.0
_SPLIT_ASYMPTOTIC = 25.0


def _asymptotic_coeffs(kmax: int = 40) -> np.ndarray:
    # |a_k(0)| = ((2k-1)!!)^2 / (k! 8^k)
    a = np.empty(kmax)
    a[0] = 1.0
    for k in range(1, kmax):
        a[k] = a[k - 1] * (2 * k - 1) ** 2 / (8.0 * k)
    return a


_HANKEL = _asymptotic_coeffs()


def _series_j0_y0(x):
    t = -(x * x) / 4.0
    term = np.ones_like(x)
    j0 = np.ones_like(x)
    h = 0.0
    ysum = np.zeros_like(x)
    for k in range(1, _SERIES_TERMS):
        term = term * t / (k * k)
        h += 1.0 / k
        j0 = j0 + term
        ysum = ysum - h * term
    with np.errstate(divide="ignore"):
        y0 = (2.0 / math.pi) * ((np.log(x / 2.0) + EULER_GAMMA) * j0 + ysum)
    return j0, y0


def _miller_j0_y0(x):
    # backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalised by J0 + 2 sum J_2k = 1
    jp1 = np.zeros_like(x)
    jn = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    neumann = np.zeros_like(x)
    for n in range(_MILLER_START, 0, -1):
        jm1 = (2.0 * n / x) * jn - jp1
        jp1, jn = jn, jm1
        m = n - 1
        if m > 0 and m % 2 == 0:
            norm += 2.0 * jn
            neumann += (-1) ** (m // 2) * jn / (m // 2)
    norm += jn
    j0 = jn / norm
    y0 = (2.0 / math.pi) * (np.log(x / 2.0) + EULER_GAMMA) * j0 - (4.0 / math.pi) * neumann / norm
    return j0, y0


def _hankel_j0_y0(x):
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    inv = 1.0 / x
    for k in range(len(_HANKEL)):
        term = _HANKEL[k] * inv ** k
        if k % 2 == 0:
            p += (-1) ** (k // 2) * term
        else:
            q -= (-1) ** (k // 2) * term
        if np.all(term < 1e-18):
            break
    chi = x - math.pi / 4.0
    amp = np.sqrt(2.0 / (math.pi * x))
    c, s = np.cos(chi), np.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _j0_y0(x):
    x = np.asarray(x, dtype=float)
    j0 = np.empty(x.shape)
    y0 = np.full(x.shape, np.nan)
    ax = np.abs(x)
    lo = ax <= _SPLIT_SERIES
    mid = (ax > _SPLIT_SERIES) & (ax <= _SPLIT_ASYMPTOTIC)
    hi = ax > _SPLIT_ASYMPTOTIC
    if lo.any():
        j0[lo], y0[lo] = _series_j0_y0(ax[lo])
    if mid.any():
        j0[mid], y0[mid] = _miller_j0_y0(ax[mid])
    if hi.any():
        j0[hi], y0[hi] = _hankel_j0_y0(ax[hi])
    return j0, y0


def bessel_j0(x):
    """Bessel function J0 (even, defined for all real x)."""
    j0, _ = _j0_y0(x)
    return j0 if j0.ndim else float(j0)


def bessel_y0(x):
    """Bessel function Y0 for x > 0; raises DomainError otherwise."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("bessel_y0 requires x > 0")
    _, y0 = _j0_y0(x)
    return y0 if y0.ndim else float(y0)


# --- Wigner functions ------------------------------------------------------

def wigner_psi(q: int, x, xi):
    """Psi_q(x, xi) = ((-1)^q / pi) L_q(2(x^2+xi^2)) e^{-(x^2+xi^2)}."""
    r2 = np.asarray(x, dtype=float) ** 2 + np.asarray(xi, dtype=float) ** 2
    return (-1) ** q / math.pi * laguerre_weighted(q, 2.0 * r2)


def wigner_box(q: int, tol: float = 1e-14) -> float:
    """Half-width L beyond which |Psi_q| < tol (from the Gaussian envelope)."""
    # |e^{-t/2} L_q(t)| <= 1, and decays like e^{-t/2} t^q / q! past the last zero
    r = math.sqrt(max(4.0 * q + 2.0, 1.0))
    while True:
        if abs(wigner_psi(q, r, 0.0)) < tol and abs(wigner_psi(q, r + 1.0, 0.0)) < tol:
            return r
        r += 0.5


def centered_grid(half_width: float, size: int):
    """Periodic grid on [-L, L) and its dual frequency grid (both fftshifted order)."""
    dx = 2.0 * half_width / size
    x = -half_width + dx * np.arange(size)
    dz = math.pi / half_width
    z = dz * (np.arange(size) - size // 2)
    return x, z


def fourier2(values: np.ndarray, half_width: float) -> np.ndarray:
    """Unitary 2D Fourier transform of samples on ``centered_grid``.

    Approximates (2 pi)^{-1} int e^{-i x.zeta} f(x) dx on the matching
    frequency grid; exact Parseval pairing with grid weights dx^2 / dzeta^2.
    """
    n = values.shape[0]
    dx = 2.0 * half_width / n
    f = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(values)))
    return f * dx * dx / (2.0 * math.pi)


def inverse_fourier2(fvalues: np.ndarray, half_width: float) -> np.ndarray:
    n = fvalues.shape[0]
    dx = 2.0 * half_width / n
    f = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(fvalues)))
    return f * (2.0 * math.pi) / (dx * dx)


def wigner_fourier_residual(q: int, half_width: float | None = None, size: int | None = None) -> float:
    """Max over the frequency grid of |FFT(Psi_q)(zeta) - (-1)^q Psi_q(zeta/2)/2|."""
    if half_width is None:
        half_width = wigner_box(q) + 1.0
    if size is None:
        # frequency window must reach 2*L_env for Psi_q(zeta/2) to have decayed
        need = 2.0 * wigner_box(q)
        size = 64
        while math.pi * size / (2.0 * half_width) < need:
            size *= 2
    if size & (size - 1):
        raise DomainError("grid size must be a power of two")
    x, z = centered_grid(half_width, size)
    X, Y = np.meshgrid(x, x, indexing="ij")
    psi = wigner_psi(q, X, Y)
    edge = max(np.abs(psi[0]).max(), np.abs(psi[:, 0]).max())
    if edge >= 1e-14:
        raise DomainError(f"Psi_{q} not decayed at the box edge (|Psi|={edge:.2e}); enlarge half_width")
    F = fourier2(psi, half_width)
    ZX, ZY = np.meshgrid(z, z, indexing="ij")
    target = (-1) ** q * wigner_psi(q, ZX / 2.0, ZY / 2.0) / 2.0
    return float(np.abs(F - target).max())


def laguerre_bessel_gap(q: int, x):
    """Return ``(gap, bound)`` with gap = |e^{-x/2} L_q(x) - J0(sqrt((4q+2)x))|.

    bound = q^{-3/4} x^{5/4} + q^{-1} x^3 is the shape of the uniform estimate;
    its constant is not known, callers report the empirical sup of gap/bound.
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    x = np.asarray(x, dtype=float)
    gap = np.abs(laguerre_weighted(q, x) - bessel_j0(np.sqrt((4 * q + 2) * x)))
    bound = q ** -0.75 * x ** 1.25 + x ** 3 / q
    if gap.ndim == 0:
        return float(gap), float(bound)
    return gap, bound
