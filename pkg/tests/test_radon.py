import math

import numpy as np
import pytest
from scipy import optimize

from conftest import GAMMA2_GAUSSIAN, GAMMA3_GAUSSIAN, gaussian_interval_mass
from landau_clusters import Bump, DomainError, Potential, ThresholdError, TruncationError
from landau_clusters.landau import toeplitz_matrix
from landau_clusters.radon import (
    decay_check,
    gamma_moment,
    interval_mass,
    limit_measure,
    limit_measure_from_profile,
    measure_moment,
    orbit_average,
    radon_profile,
    radon_transform,
    semiclassical_lhs,
    semiclassical_limit_residual,
)

SQRT_PI = math.sqrt(math.pi)


class TestTransform:
    @pytest.mark.parametrize("omega,b", [(0.0, 0.0), (0.4, 0.7), (2.0, -1.9), (5.5, 3.0)])
    def test_gaussian(self, gaussian, omega, b):
        assert radon_transform(gaussian, omega, b) == pytest.approx(math.exp(-b * b) / (2 * SQRT_PI), abs=1e-12)

    @pytest.mark.parametrize("b", [0.0, 0.5, 4.0, 40.0])
    def test_inverse_square(self, inv_square, b):
        assert radon_transform(inv_square, 1.1, b) == pytest.approx(1 / (2 * math.sqrt(1 + b * b)), abs=1e-10)

    def test_zero(self, zero):
        assert radon_transform(zero, 0.3, 0.1) == 0.0

    def test_profile_matches_scalar(self):
        V = Potential.gaussian(1.2, 0.7).translated((0.5, -0.4))
        prof = radon_profile(V, 6, np.linspace(-2, 2, 5))
        for i, w in enumerate(prof.omega):
            for j, b in enumerate(prof.b):
                assert prof.values[i, j] == pytest.approx(radon_transform(V, w, b), abs=1e-11)

    def test_profile_power_law(self, inv_cube):
        b = np.linspace(-30, 30, 13)
        prof = radon_profile(inv_cube, 2, b)
        np.testing.assert_allclose(prof.values[0], 1 / (math.pi * (1 + b * b)), rtol=1e-9)

    @pytest.mark.parametrize("V", [
        Potential.gaussian(1.0, 0.8).translated((1.0, 0.3)),
        Potential.angular_fourier([{"k": 2, "amplitude": 1.0, "phase": 0.4}]),
        Potential.power_decay(2.5).translated((0.2, 0.0)),
    ])
    def test_evenness(self, V):
        prof = radon_profile(V, 16, np.linspace(-4, 4, 33))
        assert prof.evenness_residual() < 1e-8

    def test_radial_rows_identical(self, inv_cube):
        prof = radon_profile(inv_cube, 8, np.linspace(-5, 5, 11))
        assert np.all(prof.values == prof.values[0])

    def test_csv(self, gaussian):
        text = radon_profile(gaussian, 2, [0.0, 1.0]).to_csv().splitlines()
        assert text[0] == "omega,b,value"
        assert len(text) == 5
        assert float(text[1].split(",")[2]) == pytest.approx(1 / (2 * SQRT_PI), rel=1e-15)


class TestDecay:
    def test_inverse_square_constant(self, inv_square):
        prof = radon_profile(inv_square, 4, np.linspace(-200, 200, 4001))
        assert decay_check(prof, inv_square) == pytest.approx(0.5, abs=1e-6)

    def test_zero(self, zero):
        assert decay_check(radon_profile(zero, 2, [0.0, 1.0]), zero) == 0.0

    def test_gaussian_stable(self, gaussian):
        c1 = decay_check(radon_profile(gaussian, 4, np.linspace(-8, 8, 801)), gaussian)
        c2 = decay_check(radon_profile(gaussian, 8, np.linspace(-8, 8, 1601)), gaussian)
        assert math.isfinite(c1) and c2 == pytest.approx(c1, rel=1e-4)


class TestMoments:
    def test_gamma_closed_forms(self, gaussian):
        assert gamma_moment(gaussian, 1.0, 1) == pytest.approx(0.5, abs=1e-13)
        assert gamma_moment(gaussian, 1.0, 2) == pytest.approx(GAMMA2_GAUSSIAN, abs=1e-13)
        assert gamma_moment(gaussian, 1.0, 3) == pytest.approx(GAMMA3_GAUSSIAN, abs=1e-13)
        assert gamma_moment(gaussian, 2.0, 2) == pytest.approx(4 * GAMMA2_GAUSSIAN, abs=1e-13)

    def test_zero(self, zero):
        assert gamma_moment(zero, 1.0, 2) == 0.0

    def test_threshold(self):
        with pytest.raises(ThresholdError):
            gamma_moment(Potential.power_decay(1.5), 1.0, 2)

    @pytest.mark.parametrize("V", [
        Potential.gaussian(),
        Potential.gaussian(2.0, 0.6).translated((0.7, -0.2)),
        Potential.power_decay(3.0),
        Potential.power_decay(4.0).translated((0.0, 1.0)),
    ])
    @pytest.mark.parametrize("B", [1.0, 2.0])
    def test_mass_conservation(self, V, B):
        """gamma_1 = (B / 2 pi) int V."""
        assert gamma_moment(V, B, 1) == pytest.approx(B * V.integral() / (2 * math.pi), rel=1e-9)

    @pytest.mark.parametrize("V", [Potential.gaussian(1.5, 0.8), Potential.power_decay(3.0)])
    def test_trace_bridge(self, V):
        T = toeplitz_matrix(V, 2.0, 3)
        assert gamma_moment(V, 2.0, 1) == pytest.approx(T.trace(), abs=1e-6)


@pytest.fixture(scope="module")
def fine():
    return limit_measure(Potential.gaussian(), 1.0, 1, 56000, 7.0)


class TestLimitMeasure:
    def test_radial_rows(self, gaussian):
        mu = limit_measure(gaussian, 1.0, 6, 200, 7.0)
        rows = mu.values.reshape(6, 200)
        assert np.all(rows == rows[0])
        assert mu.total_weight == pytest.approx(14.0)

    def test_support_bound(self, gaussian):
        mu = limit_measure(gaussian, 2.0, 1, 500, 7.0)
        top = 2.0 / (2 * SQRT_PI)
        assert mu.mass(top * (1 + 1e-12), np.inf) == 0.0
        assert mu.support_bound <= top

    @pytest.mark.parametrize("alpha,beta", [(0.05, 0.2), (0.01, 0.25), (0.1, 0.12)])
    def test_interval_mass_closed_form(self, fine, alpha, beta):
        assert interval_mass(fine, alpha, beta)[0] == pytest.approx(gaussian_interval_mass(alpha, beta), abs=1e-3)

    def test_interval_mass_root_solve(self, fine):
        """Independent route: solve R(b) = t for the crossing points."""
        prof = lambda b: math.exp(-b * b) / (2 * SQRT_PI)
        cross = lambda t: optimize.brentq(lambda b: prof(b) - t, 0.0, 10.0, xtol=1e-15)
        alpha, beta = 0.03, 0.21
        assert fine.mass(alpha, beta) == pytest.approx(2 * (cross(alpha) - cross(beta)), abs=1e-3)

    def test_refinement(self, gaussian):
        a = limit_measure(gaussian, 1.0, 1, 28000, 7.0).mass(0.05, 0.2)
        b = limit_measure(gaussian, 1.0, 1, 56000, 7.0).mass(0.05, 0.2)
        assert abs(a - b) < 1e-3

    def test_truncation(self, gaussian, inv_cube):
        with pytest.raises(TruncationError):
            limit_measure(gaussian, 1.0, 1, 100, 2.0)
        with pytest.raises(TruncationError):
            limit_measure(inv_cube, 1.0, 1, 100, 50.0)

    def test_moment_signed_matches_gamma(self, fine):
        assert measure_moment(fine, 2, signed=True) == pytest.approx(GAMMA2_GAUSSIAN, abs=1e-4)

    def test_moment_zero(self, zero):
        assert measure_moment(limit_measure(zero, 1.0, 2, 10, 1.0), 2) == 0.0

    def test_moment_refinement(self, gaussian):
        m1 = measure_moment(limit_measure(gaussian, 1.0, 1, 2000, 7.0), 2)
        m2 = measure_moment(limit_measure(gaussian, 1.0, 1, 4000, 7.0), 2)
        assert abs(m1 - m2) < 1e-5 * m2

    def test_moment_threshold(self, inv_cube):
        mu = limit_measure(inv_cube, 1.0, 1, 100, 10.0, check_truncation=False)
        with pytest.raises(ThresholdError):
            measure_moment(mu, 0.5)

    def test_divergence_below_threshold(self, inv_cube):
        """For <x>^{-3} moments exist iff ell > 1/2: grow without bound below, settle above."""
        def moments(ell):
            return [measure_moment(limit_measure(inv_cube, 1.0, 1, int(40 * bm), bm, check_truncation=False),
                                   ell, check_threshold=False) for bm in (100.0, 400.0, 1600.0)]

        below = moments(0.4)
        assert below[2] - below[1] > 0.9 * (below[1] - below[0]) > 0.1
        above = moments(1.5)
        assert above[2] - above[1] < 0.2 * (above[1] - above[0])
        assert above[2] - above[1] < 1e-4

    def test_interval_excludes_zero(self, fine):
        with pytest.raises(DomainError):
            interval_mass(fine, -0.1, 0.1)

    def test_atom_sensitivity(self):
        """A profile flat on |b| < 1 puts an atom of mass 2 at its plateau value."""
        def profile(b):
            a = np.abs(b)
            out = np.zeros_like(a)
            out[a <= 1] = 0.2
            mid = (a > 1) & (a < 2)
            s = a[mid] - 1
            out[mid] = 0.2 * np.exp(1 - 1 / (1 - s * s))
            return out

        mu = limit_measure_from_profile(profile, 1.0, 20000, 3.0)
        m, sens = interval_mass(mu, 0.1, 0.2)
        assert sens > 1.9
        _, quiet = interval_mass(mu, 0.05, 0.15)
        assert quiet < 0.05


class TestSemiclassical:
    def test_orbit_average_constant(self):
        assert orbit_average(lambda x, y: 0 * x + 2.5, (0.3, -1), 9.0, 2.0) == pytest.approx(2.5)

    def test_orbit_average_gaussian_centered(self, gaussian):
        for E, B in ((4.0, 1.0), (30.0, 3.0)):
            assert orbit_average(gaussian, (0, 0), E, B) == pytest.approx(math.exp(-E / B ** 2), rel=1e-13)

    def test_orbit_average_linear(self):
        assert orbit_average(lambda x, y: x, (1.7, -0.2), 5.0, 1.0) == pytest.approx(1.7, abs=1e-14)

    def test_orbit_average_domain(self, gaussian):
        with pytest.raises(DomainError):
            orbit_average(gaussian, (0, 0), 0.0, 1.0)

    def test_radial_rotation_invariant(self, gaussian):
        c = np.array([[3.0, 4.0], [5.0, 0.0], [0.0, -5.0]])
        vals = orbit_average(gaussian, c, 25.0, 1.0)
        np.testing.assert_allclose(vals, vals[0], rtol=1e-12)

    def test_zero(self, zero):
        (row,) = semiclassical_limit_residual(zero, Bump(0.15, 0.05), 1.0, [100.0])
        assert row[1] == 0.0 and row[2] == 0.0

    def test_trend(self, gaussian):
        rows = semiclassical_limit_residual(gaussian, Bump(0.15, 0.05), 1.0, [1e2, 1e3, 1e4])
        res = [r[3] for r in rows]
        assert res[2] < res[1] < res[0]

    def test_boundary_mass_small(self, gaussian):
        _, edge = semiclassical_lhs(gaussian, Bump(0.15, 0.05), 1.0, 100.0)
        assert edge < 1e-12
