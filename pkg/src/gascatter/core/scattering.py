"""
Scattering Amplitudes Module

Closed-form single-photon scattering amplitudes of the two-leg giant atom
for incidence in the lower dressed channel (exact and Markovian regimes,
both directions), the general reduced S-matrix element that also covers
incidence in the upper channel, and the atomic excitation amplitude.

Rate-unit symbol table
----------------------
The J-products of the amplitude formulas are re-expressed through the
per-leg rates ``G_j = (pi/v)|J_j|^2``, ``Lambda = sqrt(G_1 G_2)`` and the
channel split ``s = sin(theta/2)``, ``c = cos(theta/2)``:

====================================  ==================================
(pi/v) J_1c J_2c^*                    Lambda c^2 e^{i phi_J}
(pi/v) |J_jc|^2                       G_j c^2
(pi/v) J_js J_jc^* (same leg)         G_j s c
vertex of leg j, channel +/-          +s a_j / -c a_j
a_1, a_2                              sqrt(G_1), sqrt(G_2) e^{-i phi_J}
====================================  ==================================

Leg 1 sits at x = +d/2 and leg 2 at x = -d/2. The channel phases are
``psi_n = phi_n + Delta tau`` (exact) or ``psi_n = phi_n`` (Markovian), and
every amplitude shares the denominator
``D = Delta + i(Gamma_+ + gamma_+ e^{i psi_+}) + i(Gamma_- + gamma_- e^{i psi_-})``.
"""

import logging
from enum import Enum
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from gascatter.config import POLE_NUDGE, POLE_TOLERANCE
from gascatter.errors import ChannelClosedError, UnsupportedIncidenceError
from gascatter.core.model import DressedFrame, FloatLike, RatePhaseSet

logger = logging.getLogger(__name__)


# =============================================================================
# Incidence Descriptors
# =============================================================================

class Regime(str, Enum):
    """Evaluation regime: exact retardation or Markovian (e^{i Delta tau} -> 1)."""

    EXACT = 'exact'
    MARKOV = 'markov'


class Direction(str, Enum):
    """Propagation direction of the incident photon."""

    FORWARD = 'forward'
    BACKWARD = 'backward'

    @property
    def sign(self) -> int:
        return 1 if self is Direction.FORWARD else -1

    @property
    def reversed(self) -> 'Direction':
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


class Channel(str, Enum):
    """Dressed channel the atom occupies before or after scattering."""

    PLUS = 'plus'
    MINUS = 'minus'

    @property
    def other(self) -> 'Channel':
        return Channel.MINUS if self is Channel.PLUS else Channel.PLUS


@dataclass(frozen=True)
class Incidence:
    """
    Incident photon: direction, initial channel and detuning.

    ``delta`` is ``v|k| + nu_n - omega_e`` in energy units; it may be a
    numpy array to evaluate a whole spectrum at once.
    """

    direction: Direction
    channel: Channel
    delta: FloatLike


# =============================================================================
# Results
# =============================================================================

@dataclass(frozen=True)
class AmplitudeSet:
    """
    Elastic and converted amplitudes for one incidence.

    Attributes
    ----------
    t, r : complex
        Elastic transmission and reflection
    t_conv, r_conv : complex
        Converted amplitude in the incident direction and against it
    singular : bool
        True where the denominator vanished and the finite limit was taken
    """

    t: complex
    r: complex
    t_conv: complex
    r_conv: complex
    singular: bool = False

    @property
    def T(self) -> FloatLike:
        return np.abs(self.t) ** 2

    @property
    def R(self) -> FloatLike:
        return np.abs(self.r) ** 2

    @property
    def Tc(self) -> FloatLike:
        return np.abs(self.t_conv) ** 2 + np.abs(self.r_conv) ** 2


@dataclass(frozen=True)
class ExcitationAmplitude:
    """Atomic excitation amplitude in the normalization of the stationary state."""

    u: complex
    singular: bool = False


def probabilities(amps: AmplitudeSet) -> Tuple[FloatLike, FloatLike, FloatLike]:
    """
    Return ``(T, R, Tc)`` for an amplitude set.

    Examples
    --------
    >>> T, R, Tc = probabilities(AmplitudeSet(t=1.0, r=0.0, t_conv=0.0, r_conv=0.0))
    >>> float(T), float(R), float(Tc)
    (1.0, 0.0, 0.0)
    """
    return amps.T, amps.R, amps.Tc


# =============================================================================
# Shared Helpers
# =============================================================================

def _channel_split(theta: FloatLike) -> Tuple[FloatLike, FloatLike]:
    half = np.asarray(theta) / 2
    return np.sin(half), np.cos(half)


def _channel_phases(
    rp: RatePhaseSet,
    delta: np.ndarray,
    regime: Regime,
) -> Tuple[np.ndarray, np.ndarray]:
    if regime is Regime.MARKOV:
        retardation = 0.0
    else:
        retardation = delta * rp.tau
    return rp.phi_plus + retardation, rp.phi_minus + retardation


def _denominator(rp: RatePhaseSet, delta, psi_plus, psi_minus) -> np.ndarray:
    return (
        delta
        + 1j * (rp.Gamma_plus + rp.gamma_plus * np.exp(1j * psi_plus))
        + 1j * (rp.Gamma_minus + rp.gamma_minus * np.exp(1j * psi_minus))
    )


def _with_pole_guard(
    rp: RatePhaseSet,
    delta: FloatLike,
    kernel: Callable[[np.ndarray], Tuple[Tuple[np.ndarray, ...], np.ndarray]],
) -> Tuple[Tuple[np.ndarray, ...], np.ndarray]:
    """
    Evaluate ``kernel`` and replace singular samples by their finite limit.

    ``kernel(delta)`` returns ``(values, D)``. Samples with
    ``|D| < POLE_TOLERANCE * scale`` are re-evaluated at
    ``delta + POLE_NUDGE * scale``.
    """
    delta = np.asarray(delta, dtype=float)
    values, D = kernel(delta)

    scale = rp.scale
    singular = np.abs(D) < POLE_TOLERANCE * scale
    if np.any(singular):
        logger.debug(f"{int(np.count_nonzero(singular))} sample(s) at a vanishing denominator")
        nudged = np.where(singular, delta + POLE_NUDGE * scale, delta)
        values, _ = kernel(nudged)

    return tuple(np.asarray(v)[()] for v in values), np.asarray(singular)[()]


def check_open_channels(
    rp: RatePhaseSet,
    frame: DressedFrame,
    delta: FloatLike,
    channels,
) -> None:
    """Raise ChannelClosedError if v|k| <= 0 in any listed channel (physical mode)."""
    if rp.omega_e is None or not frame.has_energies:
        return

    nu = {Channel.PLUS: frame.nu_plus, Channel.MINUS: frame.nu_minus}
    for channel in dict.fromkeys(channels):
        momentum = np.asarray(delta) + rp.omega_e - nu[channel]
        if np.any(momentum <= 0):
            worst = float(np.min(np.asarray(delta)))
            raise ChannelClosedError(
                f"channel {channel.value} is closed at Delta = {worst:g} "
                f"(requires Delta > {nu[channel] - rp.omega_e:g})"
            )


def _vertices(rp: RatePhaseSet, frame: DressedFrame, channel: Channel):
    """
    Couplings (leg 1, leg 2) of a channel in rate units.

    ``w_jn = sqrt(pi/v) J_jn`` keeps the phases of the frame couplings, so
    ``|w_j+|^2 + |w_j-|^2 = Gamma_j`` and ``w_2 / w_1`` carries ``e^{-i phi_J}``.
    """
    root = np.sqrt(np.pi / rp.v)
    if channel is Channel.PLUS:
        return root * np.asarray(frame.J1s), root * np.asarray(frame.J2s)
    return -root * np.asarray(frame.J1c), -root * np.asarray(frame.J2c)


# =============================================================================
# Closed Forms (lower-channel incidence)
# =============================================================================

def _closed_form(
    rp: RatePhaseSet,
    frame: DressedFrame,
    inc: Incidence,
    regime: Regime,
) -> AmplitudeSet:
    if inc.channel is not Channel.MINUS:
        raise UnsupportedIncidenceError(
            "closed forms cover minus-channel incidence only; use s_matrix_reduced"
        )
    check_open_channels(rp, frame, inc.delta, (Channel.PLUS, Channel.MINUS))

    sin_half, cos_half = _channel_split(frame.theta)
    root_1, root_2 = np.sqrt(rp.Gamma_1), np.sqrt(rp.Gamma_2)
    Gamma_1c = rp.Gamma_1 * cos_half ** 2
    Gamma_2c = rp.Gamma_2 * cos_half ** 2
    Lambda_minus = np.sqrt(rp.Gamma_1 * rp.Gamma_2) * cos_half ** 2
    sign = inc.direction.sign

    def kernel(delta):
        psi_plus, psi_minus = _channel_phases(rp, delta, regime)
        D = _denominator(rp, delta, psi_plus, psi_minus)

        t = (
            delta
            - 2 * Lambda_minus * np.exp(1j * sign * rp.phi_J) * np.sin(psi_minus)
            + 1j * rp.Gamma_plus
            + 1j * rp.gamma_plus * np.exp(1j * psi_plus)
        ) / D
        r = -1j * (
            rp.gamma_minus
            + Gamma_1c * np.exp(1j * sign * psi_minus)
            + Gamma_2c * np.exp(-1j * sign * psi_minus)
        ) / D

        prefactor = 1j * np.exp(1j * sign * rp.phi) * sin_half * cos_half / D
        if sign > 0:
            emission = root_1 + root_2 * np.exp(-1j * (psi_minus - rp.phi_J))
            t_conv = prefactor * (root_1 + root_2 * np.exp(1j * (psi_plus - rp.phi_J))) * emission
            r_conv = prefactor * (
                root_1 * np.exp(1j * psi_plus) + root_2 * np.exp(-1j * rp.phi_J)
            ) * emission
        else:
            emission = root_1 + root_2 * np.exp(1j * (psi_minus + rp.phi_J))
            t_conv = prefactor * (root_1 + root_2 * np.exp(-1j * (psi_plus + rp.phi_J))) * emission
            r_conv = prefactor * (
                root_1 * np.exp(-1j * psi_plus) + root_2 * np.exp(-1j * rp.phi_J)
            ) * emission

        return (t, r, t_conv, r_conv), D

    (t, r, t_conv, r_conv), singular = _with_pole_guard(rp, inc.delta, kernel)
    return AmplitudeSet(t=t, r=r, t_conv=t_conv, r_conv=r_conv, singular=singular)


def amplitudes_exact(rp: RatePhaseSet, frame: DressedFrame, inc: Incidence) -> AmplitudeSet:
    """
    Exact (non-Markovian) amplitudes for minus-channel incidence.

    Forward and backward incidence differ by the sign of ``phi_J`` in the
    elastic terms, the orientation of the retardation factors and the
    global phase ``e^{+i phi}`` / ``e^{-i phi}`` of the converted amplitudes.
    The backward emission factor uses the lower-channel retardation.

    Parameters
    ----------
    rp : RatePhaseSet
        Rates and phases
    frame : DressedFrame
        Dressed frame (supplies theta and, in physical mode, nu_pm)
    inc : Incidence
        Incidence with ``channel = Channel.MINUS``

    Returns
    -------
    AmplitudeSet
        ``t, r, t_conv, r_conv``

    Raises
    ------
    UnsupportedIncidenceError
        For plus-channel incidence
    ChannelClosedError
        When a requested detuning closes a channel (physical mode)

    Examples
    --------
    >>> from gascatter.core.model import PhenomConfig, phenom_to_rateset
    >>> frame, rp = phenom_to_rateset(PhenomConfig(tau_Gamma=3.14))
    >>> amps = amplitudes_exact(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, 1e9))
    >>> round(float(amps.T), 6)
    1.0
    """
    return _closed_form(rp, frame, inc, Regime.EXACT)


def amplitudes_markov(rp: RatePhaseSet, frame: DressedFrame, inc: Incidence) -> AmplitudeSet:
    """
    Markovian amplitudes for minus-channel incidence.

    Identical to :func:`amplitudes_exact` with every ``e^{i Delta tau}``
    set to 1; the static phases ``phi_pm`` are kept and ``tau`` is never read.
    """
    return _closed_form(rp, frame, inc, Regime.MARKOV)


# =============================================================================
# Reduced S-Matrix (either incident channel)
# =============================================================================

def _leg_sums(rp, frame, delta, regime, channel, inward_sign):
    """Vertices of one channel and the half-phase factor e^{i sign psi_n / 2}."""
    w1, w2 = _vertices(rp, frame, channel)
    psi_plus, psi_minus = _channel_phases(rp, delta, regime)
    psi = psi_plus if channel is Channel.PLUS else psi_minus
    half = np.exp(0.5j * inward_sign * psi)
    return w1, w2, half


def _absorption(rp, frame, delta, regime, channel: Channel, direction: Direction):
    w1, w2, half = _leg_sums(rp, frame, delta, regime, channel, direction.sign)
    return np.conj(w1) * half + np.conj(w2) / half


def _emission(rp, frame, delta, regime, channel: Channel, direction: Direction):
    # Outgoing right-movers carry e^{-i k x_j}, left-movers e^{+i k x_j}
    w1, w2, half = _leg_sums(rp, frame, delta, regime, channel, -direction.sign)
    return w1 * half + w2 / half


def s_matrix_reduced(
    rp: RatePhaseSet,
    frame: DressedFrame,
    inc: Incidence,
    out_channel: Channel,
    out_direction: Direction,
    regime: Regime = Regime.EXACT,
) -> complex:
    """
    On-shell reduced S-matrix element between asymptotic photon states.

    The energy delta and the outgoing density of states are stripped, so
    the element is the amplitude of the outgoing plane wave for a unit
    incident wave:
    ``S = delta_{in,out} - i [sum_j w_jl e^{-i s' k_l x_j}][sum_j w_jm^* e^{i s k_m x_j}] / D``.

    Parameters
    ----------
    rp : RatePhaseSet
        Rates and phases
    frame : DressedFrame
        Dressed frame
    inc : Incidence
        Incident direction, channel and detuning (either channel)
    out_channel : Channel
        Channel of the atom after scattering
    out_direction : Direction
        Propagation direction of the outgoing photon
    regime : Regime, default=Regime.EXACT
        Evaluation regime

    Returns
    -------
    complex
        Amplitude (array when ``inc.delta`` is an array)

    Raises
    ------
    ChannelClosedError
        If the incident or outgoing channel is evanescent (physical mode)
    """
    check_open_channels(rp, frame, inc.delta, (inc.channel, out_channel))
    direct = float(out_channel is inc.channel and out_direction is inc.direction)

    def kernel(delta):
        psi_plus, psi_minus = _channel_phases(rp, delta, regime)
        D = _denominator(rp, delta, psi_plus, psi_minus)
        absorbed = _absorption(rp, frame, delta, regime, inc.channel, inc.direction)
        emitted = _emission(rp, frame, delta, regime, out_channel, out_direction)
        return (direct - 1j * emitted * absorbed / D,), D

    (amplitude,), _ = _with_pole_guard(rp, inc.delta, kernel)
    return amplitude


def amplitudes_from_s_matrix(
    rp: RatePhaseSet,
    frame: DressedFrame,
    inc: Incidence,
    regime: Regime = Regime.EXACT,
) -> AmplitudeSet:
    """
    Assemble a full AmplitudeSet from reduced S-matrix elements.

    This is the evaluator for plus-channel incidence; for minus-channel
    incidence it reproduces the closed forms.
    """
    check_open_channels(rp, frame, inc.delta, (Channel.PLUS, Channel.MINUS))
    same, other = inc.channel, inc.channel.other
    ahead, back = inc.direction, inc.direction.reversed

    def kernel(delta):
        psi_plus, psi_minus = _channel_phases(rp, delta, regime)
        D = _denominator(rp, delta, psi_plus, psi_minus)
        absorbed = _absorption(rp, frame, delta, regime, same, inc.direction)

        def element(channel, direction, direct):
            emitted = _emission(rp, frame, delta, regime, channel, direction)
            return direct - 1j * emitted * absorbed / D

        return (
            element(same, ahead, 1.0),
            element(same, back, 0.0),
            element(other, ahead, 0.0),
            element(other, back, 0.0),
        ), D

    (t, r, t_conv, r_conv), singular = _with_pole_guard(rp, inc.delta, kernel)
    return AmplitudeSet(t=t, r=r, t_conv=t_conv, r_conv=r_conv, singular=singular)


def evaluate_amplitudes(
    rp: RatePhaseSet,
    frame: DressedFrame,
    inc: Incidence,
    regime: Regime = Regime.EXACT,
) -> AmplitudeSet:
    """Dispatch to the closed forms (minus channel) or the S-matrix (plus channel)."""
    if inc.channel is Channel.MINUS:
        if regime is Regime.MARKOV:
            return amplitudes_markov(rp, frame, inc)
        return amplitudes_exact(rp, frame, inc)
    return amplitudes_from_s_matrix(rp, frame, inc, regime)


# =============================================================================
# Atomic Excitation
# =============================================================================

def excitation_amplitude(
    rp: RatePhaseSet,
    frame: DressedFrame,
    inc: Incidence,
    regime: Regime = Regime.EXACT,
) -> ExcitationAmplitude:
    """
    Amplitude of the excited atomic state in the scattering eigenstate.

    ``u = sqrt(v/pi) sum_j w_jn^* e^{i s k_n x_j} / D``; it vanishes for
    zero coupling and for plus-channel incidence at theta = 0.
    """
    check_open_channels(rp, frame, inc.delta, (inc.channel,))
    normalization = np.sqrt(rp.v / np.pi)

    def kernel(delta):
        psi_plus, psi_minus = _channel_phases(rp, delta, regime)
        D = _denominator(rp, delta, psi_plus, psi_minus)
        absorbed = _absorption(rp, frame, delta, regime, inc.channel, inc.direction)
        return (normalization * absorbed / D,), D

    (u,), singular = _with_pole_guard(rp, inc.delta, kernel)
    return ExcitationAmplitude(u=u, singular=singular)
