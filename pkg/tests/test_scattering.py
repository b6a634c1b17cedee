import math
import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gascatter.errors import ChannelClosedError, UnsupportedIncidenceError
from gascatter.core.model import (
    PhenomConfig,
    PhysicalConfig,
    build_dressed_frame,
    build_rate_phase_set,
    phenom_to_rateset,
)
from gascatter.core.oracle import sample_phenom_points
from gascatter.core.scattering import (
    AmplitudeSet,
    Channel,
    Direction,
    Incidence,
    Regime,
    amplitudes_exact,
    amplitudes_from_s_matrix,
    amplitudes_markov,
    evaluate_amplitudes,
    excitation_amplitude,
    probabilities,
    s_matrix_reduced,
)

CAMPAIGN_POINTS = 10_000


def both(rp, frame, delta, regime, channel=Channel.MINUS):
    forward = evaluate_amplitudes(rp, frame, Incidence(Direction.FORWARD, channel, delta), regime)
    backward = evaluate_amplitudes(rp, frame, Incidence(Direction.BACKWARD, channel, delta), regime)
    return forward, backward


class TestUnitarity:

    @pytest.mark.parametrize("regime", list(Regime))
    @pytest.mark.parametrize("direction", list(Direction))
    def test_random_campaign(self, rng, regime, direction):
        cfg, delta = sample_phenom_points(rng, CAMPAIGN_POINTS)
        frame, rp = phenom_to_rateset(cfg)
        amps = evaluate_amplitudes(rp, frame, Incidence(direction, Channel.MINUS, delta), regime)
        assert np.max(np.abs(amps.T + amps.R + amps.Tc - 1)) < 1e-12

    @pytest.mark.parametrize("regime", list(Regime))
    def test_upper_channel_incidence(self, rng, regime):
        cfg, delta = sample_phenom_points(rng, 2000)
        frame, rp = phenom_to_rateset(cfg)
        for direction in Direction:
            amps = evaluate_amplitudes(rp, frame, Incidence(direction, Channel.PLUS, delta), regime)
            assert np.max(np.abs(amps.T + amps.R + amps.Tc - 1)) < 1e-10

    @settings(max_examples=200, deadline=None)
    @given(
        phi_plus=st.floats(-10, 10),
        phi_minus=st.floats(-10, 10),
        phi_J=st.floats(-10, 10),
        theta=st.floats(0, math.pi),
        tau_gamma=st.floats(0, 20),
        ratio=st.floats(0.05, 20),
        delta=st.floats(-50, 50),
    )
    def test_probabilities_are_bounded(self, phi_plus, phi_minus, phi_J, theta, tau_gamma, ratio, delta):
        frame, rp = phenom_to_rateset(PhenomConfig(
            theta=theta, phi_plus=phi_plus, phi_minus=phi_minus, phi_J=phi_J,
            tau_Gamma=tau_gamma, coupling_ratio=ratio,
        ))
        for regime in Regime:
            for direction in Direction:
                T, R, Tc = probabilities(
                    evaluate_amplitudes(rp, frame, Incidence(direction, Channel.MINUS, delta), regime)
                )
                assert abs(T + R + Tc - 1) < 1e-12
                for value in (T, R, Tc):
                    assert -1e-12 <= value <= 1 + 1e-12


class TestReciprocity:

    @pytest.mark.parametrize("regime", list(Regime))
    def test_reflection_is_reciprocal(self, rng, regime):
        cfg, delta = sample_phenom_points(rng, CAMPAIGN_POINTS)
        frame, rp = phenom_to_rateset(cfg)
        forward, backward = both(rp, frame, delta, regime)

        assert np.max(np.abs(forward.R - backward.R)) < 1e-12
        I1 = forward.T - backward.T
        I2 = forward.Tc - backward.Tc
        assert np.max(np.abs(I1 + I2)) < 1e-12

    @pytest.mark.parametrize("n", [0, 1, 2, -1])
    def test_reciprocal_at_integer_coupling_phase(self, rng, n):
        cfg, delta = sample_phenom_points(rng, 2000)
        cfg = dataclasses.replace(cfg, phi_J=np.full(2000, n * math.pi))
        frame, rp = phenom_to_rateset(cfg)
        for regime in Regime:
            forward, backward = both(rp, frame, delta, regime)
            assert np.max(np.abs(forward.T - backward.T)) < 1e-12
            assert np.max(np.abs(forward.Tc - backward.Tc)) < 1e-12


class TestMarkovianBoundStates:

    def test_upper_channel_lock_suppresses_conversion(self, phenom):
        frame, rp = phenom(phi_J=1.0, phi_minus=0.75, phi_plus=0.0)
        delta = np.linspace(-10, 10, 2001)
        forward, _ = both(rp, frame, delta, Regime.MARKOV)
        assert np.max(forward.Tc) < 1e-12

        at = -rp.Gamma_minus * math.sin(rp.phi_minus)
        assert at == pytest.approx(-math.sqrt(2) / 4)
        amps = amplitudes_markov(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, at))
        assert float(amps.R) == pytest.approx(1.0, abs=1e-9)

    def test_reflection_peak_flips_with_coupling_phase(self, phenom):
        frame, rp = phenom(phi_J=0.0, phi_minus=0.75, phi_plus=1.0)
        at = rp.Gamma_minus * math.sin(rp.phi_minus)
        amps = amplitudes_markov(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, at))
        assert float(amps.R) == pytest.approx(1.0, abs=1e-9)

    def test_lower_channel_lock_is_transparent(self, phenom):
        frame, rp = phenom(phi_J=1.0, phi_minus=0.0, phi_plus=1 / 3)
        delta = np.linspace(-10, 10, 2001)
        for amps in both(rp, frame, delta, Regime.MARKOV):
            assert np.min(amps.T) > 1 - 1e-12

    def test_reciprocal_conversion_bound(self, phenom):
        frame, rp = phenom(phi_J=0.0, phi_plus=0.5, phi_minus=1.5)
        delta = np.linspace(-10, 10, 4001)
        forward, _ = both(rp, frame, delta, Regime.MARKOV)
        assert np.max(forward.Tc) <= 0.5 + 1e-12
        assert np.max(forward.Tc) == pytest.approx(0.5, abs=1e-4)


class TestRegimes:

    def test_markov_ignores_delay(self, phenom):
        delta = np.linspace(-4, 4, 81)
        frame, short = phenom(phi_J=0.3, phi_plus=0.2, phi_minus=1.1, tau_gamma=0.0)
        _, long = phenom(phi_J=0.3, phi_plus=0.2, phi_minus=1.1, tau_gamma=7.0)
        for direction in Direction:
            inc = Incidence(direction, Channel.MINUS, delta)
            a, b = amplitudes_markov(short, frame, inc), amplitudes_markov(long, frame, inc)
            np.testing.assert_array_equal(a.t_conv, b.t_conv)
            np.testing.assert_array_equal(a.r, b.r)

    def test_exact_without_delay_is_markovian(self, phenom):
        frame, rp = phenom(phi_J=0.3, phi_plus=0.2, phi_minus=1.1)
        delta = np.linspace(-4, 4, 81)
        for direction in Direction:
            inc = Incidence(direction, Channel.MINUS, delta)
            a, b = amplitudes_exact(rp, frame, inc), amplitudes_markov(rp, frame, inc)
            for name in ('t', 'r', 't_conv', 'r_conv'):
                np.testing.assert_allclose(getattr(a, name), getattr(b, name), atol=1e-15)

    def test_markov_limit_is_first_order(self, phenom):
        delta = np.linspace(-5, 5, 201)

        def error(tau_gamma):
            frame, rp = phenom(phi_J=0.4, phi_plus=0.3, phi_minus=0.7, tau_gamma=tau_gamma)
            worst = 0.0
            for direction in Direction:
                inc = Incidence(direction, Channel.MINUS, delta)
                a, b = amplitudes_exact(rp, frame, inc), amplitudes_markov(rp, frame, inc)
                for name in ('t', 'r', 't_conv', 'r_conv'):
                    worst = max(worst, float(np.max(np.abs(getattr(a, name) - getattr(b, name)))))
            return worst

        slope = math.log(error(1e-3) / error(1e-6)) / math.log(1e-3 / 1e-6)
        assert slope == pytest.approx(1.0, abs=0.1)

    def test_far_detuned_photon_is_transmitted(self, phenom):
        frame, rp = phenom(phi_J=0.3, tau_gamma=math.pi)
        amps = amplitudes_exact(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, 1e9))
        assert float(amps.T) == pytest.approx(1.0, abs=1e-6)


class TestSMatrix:

    @pytest.mark.parametrize("regime", list(Regime))
    def test_s_matrix_matches_closed_forms(self, rng, regime):
        cfg, delta = sample_phenom_points(rng, 1000)
        frame, rp = phenom_to_rateset(cfg)
        for direction in Direction:
            inc = Incidence(direction, Channel.MINUS, delta)
            closed = evaluate_amplitudes(rp, frame, inc, regime)
            general = amplitudes_from_s_matrix(rp, frame, inc, regime)
            for name in ('t', 'r', 't_conv', 'r_conv'):
                np.testing.assert_allclose(
                    np.abs(getattr(general, name)), np.abs(getattr(closed, name)), atol=1e-12
                )

    def test_element_agrees_with_amplitude_set(self, phenom):
        frame, rp = phenom(phi_J=0.6, phi_plus=0.1, phi_minus=1.3, tau_gamma=2.0, theta=0.3)
        inc = Incidence(Direction.BACKWARD, Channel.PLUS, 0.7)
        amps = amplitudes_from_s_matrix(rp, frame, inc)
        assert s_matrix_reduced(rp, frame, inc, Channel.MINUS, Direction.FORWARD) == pytest.approx(amps.r_conv)
        assert s_matrix_reduced(rp, frame, inc, Channel.PLUS, Direction.BACKWARD) == pytest.approx(amps.t)

    def test_closed_forms_reject_upper_channel(self, phenom):
        frame, rp = phenom()
        with pytest.raises(UnsupportedIncidenceError):
            amplitudes_exact(rp, frame, Incidence(Direction.FORWARD, Channel.PLUS, 0.0))


class TestEdgeCases:

    def test_vanishing_denominator_takes_finite_limit(self, phenom):
        frame, rp = phenom(theta=0.0, phi_J=0.0, phi_minus=1.0)
        amps = amplitudes_markov(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, 0.0))
        assert bool(amps.singular)
        T, R, Tc = probabilities(amps)
        assert all(np.isfinite([T, R, Tc]))
        assert float(T) == pytest.approx(1.0, abs=1e-6)

    def test_no_upper_channel_means_no_conversion(self, phenom):
        frame, rp = phenom(theta=0.0, phi_J=0.4, phi_minus=0.3, tau_gamma=1.0)
        delta = np.linspace(-5, 5, 101)
        forward, backward = both(rp, frame, delta, Regime.EXACT)
        assert np.max(forward.Tc) == 0.0
        assert np.max(backward.Tc) == 0.0

        u = excitation_amplitude(rp, frame, Incidence(Direction.FORWARD, Channel.PLUS, delta)).u
        assert np.max(np.abs(u)) == 0.0

    def test_uncoupled_atom_is_transparent(self):
        cfg = PhysicalConfig(600, 500, 500, 1.5, 0.0, 0.0, d=1.0)
        frame = build_dressed_frame(cfg)
        rp = build_rate_phase_set(frame, cfg)
        inc = Incidence(Direction.FORWARD, Channel.MINUS, np.array([-2.0, 0.5, 3.0]))
        amps = amplitudes_exact(rp, frame, inc)
        np.testing.assert_allclose(amps.T, 1.0)
        assert np.max(np.abs(excitation_amplitude(rp, frame, inc).u)) == 0.0

    def test_closed_channel_is_rejected(self):
        cfg = PhysicalConfig(600, 500, 500, 1.5, 0.4, 0.4, d=1.0)
        frame = build_dressed_frame(cfg)
        rp = build_rate_phase_set(frame, cfg)
        with pytest.raises(ChannelClosedError):
            amplitudes_exact(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, np.array([0.0, -700.0])))

    def test_amplitude_set_probabilities(self):
        amps = AmplitudeSet(t=0.6, r=0.0, t_conv=0.8j, r_conv=0.0)
        T, R, Tc = probabilities(amps)
        assert (float(T), float(R), float(Tc)) == pytest.approx((0.36, 0.0, 0.64))
