import math

import numpy as np
import pytest

from gascatter.core.loader import build_settings
from gascatter.core.scattering import Channel, Direction, Incidence, Regime, evaluate_amplitudes
from gascatter.analysis.bic import angle_distance, locate_bics, suppression_detunings


class TestLocateBics:

    def test_positive_channel_lock(self):
        _, rp = build_settings(figure='fig1a').build()
        reports = locate_bics(rp)

        assert len(reports) == 1
        report = reports[0]
        assert report.channel is Channel.PLUS
        assert report.condition == "phi_J = pi, phi_+ = 0 (mod 2pi)"
        assert report.describe() == "positive-channel BIC: Tc≡0; R=1 at Δ=−Γ_−sinφ_−"
        assert report.reflection_delta == pytest.approx(-math.sqrt(2) / 4, abs=1e-12)

    def test_reflection_locus_is_total_reflection(self):
        frame, rp = build_settings(figure='fig1a').build()
        delta = locate_bics(rp)[0].reflection_delta
        amps = evaluate_amplitudes(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, delta),
                                   Regime.MARKOV)
        assert float(amps.R) == pytest.approx(1.0, abs=1e-12)

    def test_negative_channel_lock(self):
        _, rp = build_settings(figure='fig1g').build()
        reports = locate_bics(rp)
        assert [r.channel for r in reports] == [Channel.MINUS]
        assert reports[0].describe() == "negative-channel BIC: T≡1"
        assert reports[0].reflection_delta is None

    def test_even_coupling_phase(self, phenom):
        _, rp = phenom(phi_J=0.0, phi_minus=1.0, phi_plus=0.3)
        reports = locate_bics(rp)
        assert [r.channel for r in reports] == [Channel.MINUS]
        assert reports[0].condition == "phi_J = 0, phi_- = pi (mod 2pi)"

    def test_even_coupling_phase_reflects_at_positive_shift(self, phenom):
        _, rp = phenom(phi_J=0.0, phi_plus=1.0, phi_minus=0.5)
        report = locate_bics(rp)[0]
        assert report.channel is Channel.PLUS
        assert report.reflection_delta == pytest.approx(0.5)
        assert report.describe().endswith("R=1 at Δ=Γ_−sinφ_−")

    def test_both_channels_locked(self, phenom):
        _, rp = phenom(phi_J=1.0, phi_plus=0.0, phi_minus=2.0)
        reports = locate_bics(rp)
        assert [r.channel for r in reports] == [Channel.PLUS, Channel.MINUS]
        assert reports[0].consequences == ('Tc≡0',)
        assert reports[0].reflection_delta is None

    def test_no_lock_for_generic_coupling_phase(self, phenom):
        _, rp = phenom(phi_J=0.5, phi_plus=1.5, phi_minus=1.5)
        assert locate_bics(rp) == []

    def test_unequal_rates_break_the_lock(self, phenom):
        _, rp = phenom(phi_J=1.0, phi_minus=0.75, coupling_ratio=2.0)
        assert locate_bics(rp) == []

    def test_tolerance(self, phenom):
        _, rp = phenom(phi_J=1.0 + 1e-6, phi_minus=0.75)
        assert locate_bics(rp) == []
        assert len(locate_bics(rp, tolerance=1e-4)) == 1


class TestSuppressionDetunings:

    def test_negative_channel_family(self, phenom):
        frame, rp = phenom(phi_J=1.0, phi_minus=0.0, phi_plus=0.5, tau_gamma=math.pi)
        detunings = suppression_detunings(rp, Channel.MINUS, (-3.0, 3.0))
        np.testing.assert_allclose(detunings, [-2.0, 0.0, 2.0], atol=1e-12)

        amps = evaluate_amplitudes(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, detunings),
                                   Regime.EXACT)
        np.testing.assert_allclose(amps.T, 1.0, atol=1e-9)

    def test_positive_channel_family(self, phenom):
        _, rp = phenom(phi_J=1.0, phi_minus=0.0, phi_plus=0.5, tau_gamma=math.pi)
        detunings = suppression_detunings(rp, Channel.PLUS, (-3.0, 3.0))
        np.testing.assert_allclose(detunings, [-2.5, -0.5, 1.5], atol=1e-12)

    @pytest.mark.parametrize("overrides", [
        {'tau_gamma': 0.0},
        {'tau_gamma': math.pi, 'phi_J': 0.5},
        {'tau_gamma': math.pi, 'coupling_ratio': 3.0},
    ])
    def test_no_family(self, phenom, overrides):
        values = {'phi_J': 1.0, **overrides}
        _, rp = phenom(**values)
        assert suppression_detunings(rp, Channel.MINUS, (-5.0, 5.0)).size == 0


@pytest.mark.parametrize("a, b, expected", [
    (0.0, 2 * math.pi, 0.0),
    (0.1, 2 * math.pi - 0.1, 0.2),
    (0.0, math.pi, math.pi),
    (-0.5 * math.pi, 1.5 * math.pi, 0.0),
])
def test_angle_distance(a, b, expected):
    assert angle_distance(a, b) == pytest.approx(expected, abs=1e-12)
