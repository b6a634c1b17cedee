import math
import logging

import numpy as np
import pytest

from gascatter.errors import ConfigError
from gascatter.core.model import (
    PhenomConfig,
    PhysicalConfig,
    build_dressed_frame,
    build_rate_phase_set,
    drive_block,
    induced_phenom_config,
    phenom_to_rateset,
)
from gascatter.core.scattering import Channel, Direction, Incidence, Regime, evaluate_amplitudes

HALF_RATE_COUPLING = 1 / math.sqrt(2 * math.pi)


def physical(**overrides):
    values = dict(omega_e=600.0, omega_f=500.0, omega_d=500.0, Omega=1.5,
                  J1_mag=HALF_RATE_COUPLING, J2_mag=HALF_RATE_COUPLING,
                  J1_phase=math.pi, J2_phase=0.0, d=1.0025 * math.pi, v=1.0)
    values.update(overrides)
    return PhysicalConfig(**values)


class TestDressedFrame:

    def test_resonant_drive_gives_equal_mixing(self):
        frame = build_dressed_frame(PhysicalConfig(600, 500, 500, 1.5, 0.4, 0.4))
        assert frame.theta == pytest.approx(math.pi / 2, abs=1e-15)
        assert frame.nu_plus == pytest.approx(1.5)
        assert frame.nu_minus == pytest.approx(-1.5)
        assert frame.flags == ()

    def test_eigenenergies_diagonalize_drive_block(self):
        cfg = physical(omega_d=499.2, Omega=0.7)
        frame = build_dressed_frame(cfg)
        eigenvalues = np.linalg.eigvalsh(drive_block(cfg))
        np.testing.assert_allclose(sorted([frame.nu_minus, frame.nu_plus]), eigenvalues, atol=1e-12)

    def test_channel_couplings_split_by_mixing_angle(self):
        cfg = physical(omega_d=500.4, Omega=0.3, J2_mag=0.2)
        frame = build_dressed_frame(cfg)
        assert abs(frame.J1s) ** 2 + abs(frame.J1c) ** 2 == pytest.approx(cfg.J1_mag ** 2)
        assert abs(frame.J2s) ** 2 + abs(frame.J2c) ** 2 == pytest.approx(cfg.J2_mag ** 2)
        assert np.angle(frame.J1c) == pytest.approx(math.pi)

    @pytest.mark.parametrize("detuning, theta", [(1.0, 0.0), (-1.0, math.pi)])
    def test_undriven_limits(self, detuning, theta):
        frame = build_dressed_frame(physical(Omega=0.0, omega_d=500.0 - detuning))
        assert frame.theta == pytest.approx(theta)

    def test_degenerate_drive_is_flagged(self, caplog):
        with caplog.at_level(logging.WARNING):
            frame = build_dressed_frame(physical(Omega=0.0))
        assert frame.theta == 0.0
        assert 'degenerate_drive' in frame.flags
        assert 'Degenerate drive' in caplog.text


class TestRates:

    def test_rates_and_phases(self):
        cfg = physical(J1_phase=0.3, J2_phase=0.1)
        frame = build_dressed_frame(cfg)
        rp = build_rate_phase_set(frame, cfg)

        assert rp.Gamma == pytest.approx(1.0)
        assert rp.Gamma_1 == pytest.approx(0.5)
        assert rp.gamma == pytest.approx(math.cos(0.2))
        assert rp.phi_J == pytest.approx(0.2)
        assert rp.tau == pytest.approx(cfg.d)
        assert rp.phi_plus == pytest.approx((600 - 1.5) * cfg.d)
        assert rp.phi_minus == pytest.approx((600 + 1.5) * cfg.d)
        assert rp.phi == pytest.approx(1.5 * cfg.d)
        assert rp.Gamma_plus + rp.Gamma_minus == pytest.approx(rp.Gamma)
        assert rp.gamma_plus + rp.gamma_minus == pytest.approx(rp.gamma)

    def test_uncoupled_atom_has_unit_scale(self, caplog):
        cfg = physical(J1_mag=0.0, J2_mag=0.0)
        with caplog.at_level(logging.WARNING):
            rp = build_rate_phase_set(build_dressed_frame(cfg), cfg)
        assert rp.Gamma == 0.0
        assert rp.scale == 1.0
        assert 'transparent' in caplog.text

    def test_rotating_wave_warning(self, caplog):
        cfg = physical(omega_e=5.0, omega_f=3.0, omega_d=3.0)
        with caplog.at_level(logging.WARNING):
            build_rate_phase_set(build_dressed_frame(cfg), cfg)
        assert 'rotating-wave' in caplog.text

    def test_phenom_rates(self):
        frame, rp = phenom_to_rateset(PhenomConfig(Gamma=2.0, coupling_ratio=2.0, tau_Gamma=3.0,
                                                   phi_plus=0.4, phi_minus=1.0))
        assert rp.Gamma_2 / rp.Gamma_1 == pytest.approx(4.0)
        assert rp.Gamma_1 + rp.Gamma_2 == pytest.approx(2.0)
        assert rp.tau == pytest.approx(1.5)
        assert rp.phi == pytest.approx(0.3)
        assert 'energies_unset' in frame.flags
        assert not frame.has_energies

    def test_phenom_batch(self):
        cfg = PhenomConfig(theta=np.array([0.0, math.pi / 2, math.pi]))
        _, rp = phenom_to_rateset(cfg)
        np.testing.assert_allclose(rp.Gamma_plus, [0.0, 0.5, 1.0], atol=1e-15)
        np.testing.assert_allclose(rp.Gamma_minus, [1.0, 0.5, 0.0], atol=1e-15)


class TestValidation:

    @pytest.mark.parametrize("overrides", [
        {'Omega': -1.0},
        {'J1_mag': -0.1},
        {'d': -1.0},
        {'v': 0.0},
        {'omega_e': math.inf},
    ])
    def test_invalid_physical(self, overrides):
        with pytest.raises(ConfigError):
            physical(**overrides)

    @pytest.mark.parametrize("overrides", [
        {'Gamma': 0.0},
        {'theta': 4.0},
        {'tau_Gamma': -1.0},
        {'coupling_ratio': -1.0},
        {'phi_J': math.nan},
    ])
    def test_invalid_phenom(self, overrides):
        with pytest.raises(ConfigError):
            PhenomConfig(**overrides)

    def test_invalid_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            PhenomConfig(Gamma=-1.0)


class TestInducedPhenom:

    def test_induced_config_reproduces_spectrum(self):
        cfg = physical(J2_mag=0.3, J1_phase=0.7)
        induced = induced_phenom_config(cfg)
        assert induced.tau_Gamma == pytest.approx(cfg.d * (math.pi * (cfg.J1_mag ** 2 + 0.09)))

        delta = np.linspace(-3, 3, 31)
        frame = build_dressed_frame(cfg)
        rp = build_rate_phase_set(frame, cfg)
        frame_p, rp_p = phenom_to_rateset(induced)
        for direction in Direction:
            a = evaluate_amplitudes(rp, frame, Incidence(direction, Channel.MINUS, delta), Regime.EXACT)
            b = evaluate_amplitudes(rp_p, frame_p, Incidence(direction, Channel.MINUS, delta), Regime.EXACT)
            np.testing.assert_allclose(a.T, b.T, atol=1e-9)
            np.testing.assert_allclose(a.Tc, b.Tc, atol=1e-9)

    def test_missing_first_leg(self):
        with pytest.raises(ConfigError):
            induced_phenom_config(physical(J1_mag=0.0))
