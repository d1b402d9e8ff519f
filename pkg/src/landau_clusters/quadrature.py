"""Small quadrature toolkit shared by the numerical modules."""
from __future__ import annotations

import functools
import math

import numpy as np


@functools.lru_cache(maxsize=64)
def _gl(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(a: float, b: float, order: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _gl(order)
    h = 0.5 * (b - a)
    return h * x + 0.5 * (a + b), h * w


def composite_gauss_legendre(a: float, b: float, order: int, panel: float = 1.0):
    """Gauss-Legendre of fixed order on equal panels no wider than ``panel``."""
    if b <= a:
        return np.empty(0), np.empty(0)
    npan = max(1, math.ceil((b - a) / panel))
    edges = np.linspace(a, b, npan + 1)
    x, w = _gl(order)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


def sinh_sinh(step: float = 1.0 / 16, tmax: float = 4.0):
    """Double-exponential rule for integrals over the whole real line.

    t = sinh(pi/2 sinh tau), trapezoid in tau.  Algebraically decaying
    integrands become doubly-exponentially decaying, so the truncated rule
    converges geometrically in 1/step.
    """
    tau = np.arange(-tmax, tmax + 0.5 * step, step)
    u = 0.5 * math.pi * np.sinh(tau)
    nodes = np.sinh(u)
    weights = step * 0.5 * math.pi * np.cosh(tau) * np.cosh(u)
    return nodes, weights


def exp_sinh(step: float = 1.0 / 16, tmax: float = 4.0):
    """Double-exponential rule on (0, inf): t = exp(pi/2 sinh tau)."""
    tau = np.arange(-tmax, tmax + 0.5 * step, step)
    nodes = np.exp(0.5 * math.pi * np.sinh(tau))
    weights = step * 0.5 * math.pi * np.cosh(tau) * nodes
    return nodes, weights


def periodic_trapezoid(n: int):
    """Equispaced angles on [0, 2 pi) with weights 2 pi / n."""
    theta = 2.0 * math.pi * np.arange(n) / n
    return theta, np.full(n, 2.0 * math.pi / n)


def richardson_limit(cutoffs, values, exponents):
    """Extrapolate S(M) = S_inf - sum_j c_j M^{-p_j} to M -> inf.

    ``values`` are observations at ``cutoffs``; uses as many exponents as the
    data allow (len(values) - 1).  Returns (limit, error estimate), the error
    being the change against the fit with one exponent fewer.
    """
    M = np.asarray(cutoffs, dtype=float)
    S = np.asarray(values, dtype=float)
    npts = len(S)
    if npts == 1:
        return float(S[0]), float("inf")

    def fit(k):
        A = np.ones((k + 1, k + 1))
        for j in range(k):
            A[:, j + 1] = -M[-(k + 1):] ** (-exponents[j])
        sol = np.linalg.solve(A, S[-(k + 1):])
        return sol[0]

    k = min(npts - 1, len(exponents))
    best = fit(k)
    prev = fit(k - 1) if k >= 1 else S[-1]
    return float(best), float(abs(best - prev))
