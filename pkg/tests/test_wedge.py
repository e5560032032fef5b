"""Tests for wedge.py -- Cauchy data, boost kinematics, the continued
kernel and the wedge-scalar entropies."""

import math

import numpy as np
import pytest
from scipy.special import k0, k1

from petzrenyi.errors import DomainError
from petzrenyi.wedge import (
    BoostParameters,
    WedgeCauchyData,
    WedgeScalar,
    boost,
    energy_density,
    imag_H,
    in_right_wedge,
    minkowski_square,
)


def _bump(center, width):
    def value(x):
        r = (np.asarray(x, dtype=float) - center) / width
        q = np.where(np.abs(r) < 1.0, 1.0 - r * r, 1.0)
        return np.where(np.abs(r) < 1.0, np.exp(-1.0 / q), 0.0)

    return value


BUMP_G = _bump(1.5, 0.5)
BUMP_H = _bump(1.8, 0.6)


class TestCauchyData:
    def test_gauss_bump_support(self, gauss_data):
        assert gauss_data.support == (1.0, 3.0)
        assert gauss_data.phi(np.array(2.0)) == pytest.approx(math.exp(-1.0))
        assert gauss_data.pi(np.array(2.0)) == 0.0

    def test_bump_must_stay_in_half_line(self):
        with pytest.raises(DomainError):
            WedgeCauchyData.gauss_bump(0.5, 1.0)

    def test_mass_must_be_positive(self, gauss_data):
        with pytest.raises(DomainError):
            gauss_data.with_mass(0.0)

    def test_wave_packet_is_right_moving(self):
        data = WedgeCauchyData.wave_packet(2.0, 1.0)
        x = np.array([1.5, 2.3])
        np.testing.assert_allclose(data.pi(x), -data.phi_prime(x))

    def test_momentum_bump(self):
        data = WedgeCauchyData.momentum_bump(2.0, 0.5)
        assert data.phi(np.array(2.0)) == 0.0
        assert data.pi(np.array(2.0)) > 0.0

    def test_phi_prime_matches_difference(self, gauss_data):
        h = 1e-6
        x = 2.4
        diff = (gauss_data.phi(np.array(x + h)) - gauss_data.phi(np.array(x - h))) / (2 * h)
        assert gauss_data.phi_prime(np.array(x)) == pytest.approx(diff, rel=1e-6)

    def test_from_samples(self, gauss_data):
        x = np.linspace(1.0, 3.0, 161)
        data = WedgeCauchyData.from_samples(
            x, gauss_data.phi(x), gauss_data.phi_prime(x), np.zeros_like(x), mass=2.0
        )
        assert data.mass == 2.0
        assert data.support == (1.0, 3.0)
        assert data.phi(np.array(2.0)) == pytest.approx(math.exp(-1.0), abs=1e-6)
        assert data.phi(np.array(4.0)) == 0.0

    def test_from_samples_needs_four_points(self):
        with pytest.raises(DomainError):
            WedgeCauchyData.from_samples([1, 2, 3], [0, 1, 0], [0, 0, 0], [0, 0, 0])

    def test_energy_density(self, gauss_data):
        x = np.array([1.5, 2.5])
        expected = 0.5 * (gauss_data.phi_prime(x) ** 2 + gauss_data.phi(x) ** 2)
        np.testing.assert_allclose(energy_density(gauss_data, x), expected)


class TestKinematics:
    def test_boost_preserves_interval(self, rng):
        x = rng.standard_normal((5, 2))
        for t in (-0.3, 0.1, 0.8):
            np.testing.assert_allclose(minkowski_square(boost(t, x)), minkowski_square(x), atol=1e-10)

    def test_boost_group_law(self):
        x = np.array([0.2, 1.3])
        np.testing.assert_allclose(boost(0.2, boost(0.15, x)), boost(0.35, x), rtol=1e-12)

    def test_half_imaginary_boost_reflects(self):
        x = np.array([0.3, 1.0])
        np.testing.assert_allclose(boost(0.5j, x), -x, atol=1e-12)

    def test_right_wedge(self):
        assert in_right_wedge([0.0, 1.0])
        assert in_right_wedge([0.5, 0.5])
        assert not in_right_wedge([0.0, -1.0])
        assert not in_right_wedge([2.0, 1.0])

    def test_boost_parameters(self):
        params = BoostParameters.for_alpha(0.3)
        assert params.z == pytest.approx(0.35j)
        assert params.w == pytest.approx(-0.35j)
        assert params.admissible
        assert not BoostParameters(0.6j, 0.0).admissible
        assert not BoostParameters(0.2j, 0.1j).admissible

    def test_boosted_phase_is_damped_in_strip(self):
        p = np.linspace(-20.0, 20.0, 81)
        params = BoostParameters.for_alpha(0.3)
        for x, y in [([0.0, 1.0], [0.0, 2.0]), ([0.3, 1.0], [-0.5, 1.5])]:
            assert np.min(imag_H(x, y, params.z, params.w, p, 1.0)) >= -1e-12


class TestMomentumIntegrals:
    def test_half_alpha_closed_forms(self, wedge):
        delta = np.array([0.0, 0.5, -0.3])
        sigma = np.array([1.0, 2.0, 1.5])
        I0, I2, err = wedge.equal_time_momentum_integrals(delta, sigma, 0.5, 1.0)
        np.testing.assert_allclose(I0, k0(sigma) / np.pi, atol=1e-7)
        np.testing.assert_allclose(I2, k1(sigma) / (np.pi * sigma), atol=1e-7)
        assert err < 1e-6

    def test_rejects_points_outside_wedge(self, wedge):
        with pytest.raises(DomainError):
            wedge.equal_time_momentum_integrals(0.0, 0.0, 0.5, 1.0)

    def test_rejects_bad_mass(self, wedge):
        with pytest.raises(DomainError):
            wedge.equal_time_momentum_integrals(0.0, 1.0, 0.5, 0.0)

    def test_time_derivative_kernel_vanishes(self, wedge):
        assert abs(wedge.K_alpha_equal_time(1.0, 1.4, 0.4, which="dt")) < 1e-8

    def test_kernel_value_is_symmetric(self, wedge):
        a = wedge.K_alpha_equal_time(1.0, 1.4, 0.4)
        b = wedge.K_alpha_equal_time(1.4, 1.0, 0.4)
        assert isinstance(a, float)
        assert a == pytest.approx(b, rel=1e-8)

    def test_kernel_value_singular_on_diagonal(self, wedge):
        with pytest.raises(DomainError):
            wedge.K_alpha_equal_time(1.0, 1.0, 0.4)

    def test_kernel_needs_positive_points(self, wedge):
        with pytest.raises(DomainError):
            wedge.K_alpha_equal_time(-1.0, 1.0, 0.4)

    def test_unknown_component(self, wedge):
        with pytest.raises(DomainError):
            wedge.K_alpha_equal_time(1.0, 1.5, 0.4, which="dx")

    def test_kernel_array_shape(self, wedge):
        x = np.array([[1.0, 1.2], [1.5, 2.0]])
        out = wedge.K_alpha_equal_time(x, 0.7, 0.4, which="dtdt")
        assert out.shape == (2, 2)


class TestPetzRenyiWedge:
    def test_endpoint_zero(self, wedge, gauss_data):
        assert wedge.petz_renyi_wedge(gauss_data, 0.0).value == 0.0

    def test_zero_data(self, wedge, gauss_data):
        assert wedge.petz_renyi_wedge(gauss_data.scaled(0.0), 0.5).value == pytest.approx(0.0, abs=1e-12)

    def test_alpha_out_of_range(self, wedge, gauss_data):
        with pytest.raises(DomainError):
            wedge.petz_renyi_wedge(gauss_data, 1.0)

    def test_unknown_method(self, wedge, gauss_data):
        with pytest.raises(DomainError):
            wedge.petz_renyi_wedge(gauss_data, 0.5, method="lattice")

    def test_methods_agree(self, wedge, gauss_data):
        momentum = wedge.petz_renyi_wedge(gauss_data, 0.5, method="momentum").value
        kernel = wedge.petz_renyi_wedge(gauss_data, 0.5, method="kernel").value
        assert kernel == pytest.approx(momentum, rel=1e-3)

    def test_kernel_error_covers_discrepancy(self, field_quad, gauss_data):
        loose = WedgeScalar(field_quad, tol=1e-5)
        res = loose.petz_renyi_wedge(gauss_data, 0.5, method="kernel")
        momentum = loose.petz_renyi_wedge(gauss_data, 0.5).value
        assert res.converged
        assert abs(res.value - momentum) <= res.error_estimate + 1e-5

    def test_monotone_and_bounded(self, wedge, gauss_data):
        values = [wedge.petz_renyi_wedge(gauss_data, a).value for a in (0.25, 0.5, 0.75)]
        assert 0 < values[0] < values[1] < values[2]
        assert values[2] < wedge.relative_entropy_wedge(gauss_data).value

    def test_quadratic_in_amplitude(self, wedge, gauss_data):
        single = wedge.petz_renyi_wedge(gauss_data, 0.5).value
        double = wedge.petz_renyi_wedge(gauss_data.scaled(2.0), 0.5).value
        assert double == pytest.approx(4 * single, rel=1e-5)

    def test_regulator_is_irrelevant(self, wedge, gauss_data):
        assert wedge.regulator_irrelevance(gauss_data, 0.5) < 1e-8


class TestRelativeEntropy:
    def test_equals_noether_charge(self, wedge, gauss_data):
        a = wedge.relative_entropy_wedge(gauss_data).value
        b = wedge.noether_charge(gauss_data).value
        assert a > 0
        assert a == pytest.approx(b, rel=1e-10)

    def test_momentum_data(self, wedge):
        data = WedgeCauchyData.momentum_bump(2.0, 1.0)
        assert wedge.relative_entropy_wedge(data).value == pytest.approx(
            wedge.noether_charge(data).value, rel=1e-10
        )


class TestCommutator:
    def test_relations(self, wedge):
        report = wedge.commutator_kernel_checks()
        assert set(report) == {"equal_time", "time_derivative", "light_cone", "antisymmetry"}
        assert max(report.values()) < 1e-8

    @pytest.mark.parametrize("t", [0.3, 1.2, -0.8])
    def test_momentum_matches_closed_form(self, wedge, t):
        g, h = BUMP_G, BUMP_H
        mom = wedge.commutator_momentum(g, h, (1.0, 2.4), t, 1.0)
        pos = wedge.commutator_position(g, h, (1.0, 2.4), t, 1.0)
        assert mom == pytest.approx(pos, abs=1e-7)

    def test_vanishes_at_equal_time(self, wedge):
        assert wedge.commutator_position(BUMP_G, BUMP_H, (1.0, 2.4), 0.0, 1.0) == 0.0

    def test_rejects_bad_mass(self, wedge):
        with pytest.raises(DomainError):
            wedge.commutator_kernel_checks(m=-1.0)


class TestStrip:
    def test_admissible_parameters(self, wedge):
        params = BoostParameters.for_alpha(0.5)
        assert wedge.strip_admissibility(params.z, params.w, [0.0, 1.0], [0.0, 2.0])

    def test_outside_strip(self, wedge):
        assert not wedge.strip_admissibility(0.7j, -0.1j, [0.0, 1.0], [0.0, 2.0])

    def test_points_outside_wedge(self, wedge):
        with pytest.raises(DomainError):
            wedge.strip_admissibility(0.1j, -0.1j, [0.0, -1.0], [0.0, 2.0])
