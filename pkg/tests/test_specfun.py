import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from landau_clusters.errors import DomainError
from landau_clusters.specfun import (
    bessel_j0,
    bessel_y0,
    glaguerre,
    hermite,
    hermite_fn,
    laguerre,
    laguerre_bessel_gap,
    laguerre_weighted,
    wigner_fourier_residual,
    wigner_psi,
)


class TestLaguerre:
    def test_low_degrees(self):
        assert laguerre(0, 7.3) == 1.0
        for x in (0.0, 1.0, 2.0):
            assert laguerre(1, x) == pytest.approx(1.0 - x, abs=1e-15)
        assert laguerre(2, 1.0) == pytest.approx(-0.5, abs=1e-15)

    def test_matches_closed_sum(self):
        x = np.linspace(-3, 10, 41)
        for q in range(3):
            direct = sum((-1) ** k * math.comb(q, k) * x ** k / math.factorial(k) for k in range(q + 1))
            np.testing.assert_allclose(laguerre(q, x), direct, atol=1e-13)

    @pytest.mark.parametrize("q", [1, 7, 50, 200])
    def test_recurrence_residual(self, q):
        x = np.linspace(-100, 100, 401)
        lm, l0, lp = laguerre(q - 1, x), laguerre(q, x), laguerre(q + 1, x)
        res = np.abs((q + 1) * lp - (2 * q + 1 - x) * l0 + q * lm)
        scale = np.maximum(np.abs(lp), np.abs(l0)) + 1.0
        assert np.all(res < 1e-10 * scale)

    def test_glaguerre_reduces(self):
        x = np.linspace(0, 20, 33)
        np.testing.assert_allclose(glaguerre(9, 0.0, x), laguerre(9, x), rtol=1e-13, atol=1e-13)
        assert glaguerre(3, 0.0, 0.0) == pytest.approx(1.0)
        assert glaguerre(0, 2.5, 4.0) == 1.0

    @pytest.mark.parametrize("m", range(11))
    def test_half_order_hermite_identity(self, m):
        t = np.linspace(-4, 4, 81)
        lhs = glaguerre(m, -0.5, t * t)
        rhs = (-1) ** m / (math.factorial(m) * 2 ** (2 * m)) * hermite(2 * m, t)
        assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.max(np.abs(rhs)))

    @pytest.mark.parametrize("q", [0, 10, 100, 300])
    def test_weighted_against_scipy(self, q):
        x = np.linspace(0, 4 * q + 40, 257)
        ref = np.exp(-x / 2) * special.eval_laguerre(q, x)
        np.testing.assert_allclose(laguerre_weighted(q, x), ref, atol=1e-10)

    @given(st.integers(0, 40), st.floats(-0.9, 30), st.floats(0, 50))
    def test_glaguerre_vs_scipy(self, q, alpha, x):
        ref = special.eval_genlaguerre(q, alpha, x)
        assert glaguerre(q, alpha, x) == pytest.approx(ref, rel=1e-9, abs=1e-9 * (1 + abs(ref)))


class TestHermite:
    def test_values(self):
        assert hermite_fn(0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-15)
        assert hermite_fn(1, 0.0) == 0.0

    def test_no_overflow(self):
        x = np.linspace(-60, 60, 1201)
        v = hermite_fn(500, x)
        assert np.all(np.isfinite(v))
        assert np.max(np.abs(v)) < 1.0

    def test_against_scipy_polynomial(self):
        x = np.linspace(-5, 5, 21)
        for q in (0, 3, 12):
            ref = special.eval_hermite(q, x) * np.exp(-x * x / 2) / math.sqrt(math.sqrt(math.pi) * 2 ** q * math.factorial(q))
            np.testing.assert_allclose(hermite_fn(q, x), ref, atol=1e-13)

    @pytest.mark.parametrize("q", [0, 5, 50])
    def test_normalised(self, q):
        x, w = special.roots_hermite(200)
        # Gauss-Hermite weight e^{-x^2} is the square of the folded-in weight
        vals = hermite_fn(q, x) ** 2 * np.exp(x * x)
        assert np.dot(w, vals) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal(self):
        x, w = special.roots_hermite(120)
        Phi = np.array([hermite_fn(q, x) for q in range(31)]) * np.exp(x * x / 2)
        G = (Phi * w) @ Phi.T
        off = G - np.diag(np.diag(G))
        assert np.max(np.abs(off)) < 1e-8


class TestBessel:
    def test_j0_zero(self):
        assert bessel_j0(0.0) == 1.0

    @pytest.mark.parametrize("lo,hi", [(0, 8), (8, 25), (25, 200), (200, 1e4)])
    def test_against_scipy(self, lo, hi):
        x = np.linspace(lo, hi, 4001)[1:]
        assert np.max(np.abs(bessel_j0(x) - special.j0(x))) < 1e-12
        assert np.max(np.abs(bessel_y0(x) - special.y0(x))) < 1e-12

    def test_against_mpmath(self):
        with mpmath.workdps(40):
            for x in (0.5, 3.7, 7.99, 8.01, 13.0, 31.4, 250.0):
                assert abs(bessel_j0(x) - float(mpmath.besselj(0, x))) < 1e-13
                assert abs(bessel_y0(x) - float(mpmath.bessely(0, x))) < 1e-13

    def test_decay_envelope(self):
        x = np.linspace(1, 1e4, 200001)
        assert np.max(np.abs(bessel_j0(x)) * np.sqrt(x)) <= 0.8
        y = bessel_y0(x)
        assert np.all(np.isfinite(y))
        assert np.max(np.abs(y) * np.sqrt(x)) < 1.0

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_y0_domain(self, x):
        with pytest.raises(DomainError):
            bessel_y0(x)


class TestWigner:
    def test_origin(self):
        assert wigner_psi(0, 0, 0) == pytest.approx(1 / math.pi)
        assert wigner_psi(1, 0, 0) == pytest.approx(-1 / math.pi)

    @pytest.mark.parametrize("q", [0, 3, 20])
    def test_unit_integral(self, q):
        # radial: 2 pi int_0^inf Psi_q(r) r dr, Gauss-Legendre on the decayed range
        r, w = np.polynomial.legendre.leggauss(400)
        R = 3 * math.sqrt(2 * q + 1) + 8
        r, w = 0.5 * R * (r + 1), 0.5 * R * w
        total = 2 * math.pi * np.dot(w, wigner_psi(q, r, 0.0) * r)
        assert total == pytest.approx(1.0, abs=1e-8)

    @given(st.integers(0, 12), st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 2 * math.pi))
    def test_rotation_invariant(self, q, x, xi, phi):
        c, s = math.cos(phi), math.sin(phi)
        a = wigner_psi(q, x, xi)
        b = wigner_psi(q, c * x - s * xi, s * x + c * xi)
        assert a == pytest.approx(b, rel=1e-9, abs=1e-13)

    def test_fourier_gaussian(self):
        assert wigner_fourier_residual(0) < 1e-8

    def test_fourier_q5_grid(self):
        assert wigner_fourier_residual(5, 12.0, 1024) < 1e-6

    def test_fourier_q5_direct_quadrature(self, rng):
        """FFT transform at random frequencies against a direct radial Hankel quadrature."""
        zetas = rng.uniform(0, 6, size=10)
        r, w = np.polynomial.legendre.leggauss(600)
        R = 14.0
        r, w = 0.5 * R * (r + 1), 0.5 * R * w
        for z in zetas:
            # radial function: F(z) = int_0^inf Psi(r) J0(z r) r dr
            direct = np.dot(w, wigner_psi(5, r, 0.0) * special.j0(z * r) * r)
            assert direct == pytest.approx(-wigner_psi(5, z / 2, 0.0) / 2, abs=1e-10)

    @pytest.mark.parametrize("q", range(5))
    def test_fourier_at_origin(self, q):
        assert (-1) ** q * wigner_psi(q, 0, 0) / 2 == pytest.approx(1 / (2 * math.pi))

    def test_grid_checks(self):
        with pytest.raises(DomainError):
            wigner_fourier_residual(2, 12.0, 1000)
        with pytest.raises(DomainError):
            wigner_fourier_residual(2, 3.0, 256)


class TestLaguerreBessel:
    def test_small_x(self):
        gap, _ = laguerre_bessel_gap(8, 1e-9)
        assert gap < 1e-12

    def test_high_precision_value(self):
        # 50-digit mpmath evaluation of |e^{-1/2} L_16(1) - J0(sqrt(66))|
        ref = 0.0053409785066405067718485480422685069444756489770077
        gap, bound = laguerre_bessel_gap(16, 1.0)
        assert gap == pytest.approx(ref, rel=1e-11)
        assert bound == pytest.approx(16 ** -0.75 + 1 / 16)

    def test_ratio_bounded(self):
        x = np.linspace(1e-3, 40, 20000)
        sups = [float(np.max(np.divide(*laguerre_bessel_gap(q, x)))) for q in (4, 16, 64, 256)]
        assert max(sups) < 0.1
        # saturating: increments shrink along the sweep
        inc = np.diff(sups)
        assert np.all(np.abs(inc[1:]) <= np.abs(inc[:-1]))

    def test_requires_positive_q(self):
        with pytest.raises(DomainError):
            laguerre_bessel_gap(0, 1.0)
