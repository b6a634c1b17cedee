"""
Bound-State Locks

Detects the phase locks under which one dressed channel decouples from
the waveguide (a bound state in the continuum) and lists the detunings
where retardation produces the same lock in the exact regime.

With equal leg rates, emission into channel n vanishes when
``psi_n - phi_J = pi (mod 2pi)``. For the static phases this requires
``phi_J = 0 (mod pi)``:

- plus channel locked: no conversion (Tc = 0) and total reflection at
  ``Delta = -Gamma_- sin(phi_-)`` (phi_J odd) or ``+Gamma_- sin(phi_-)``
  (phi_J even), unless the minus channel is locked as well
- minus channel locked: frequency-independent transmission (T = 1)
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from gascatter.config import config
from gascatter.core.model import RatePhaseSet
from gascatter.core.scattering import Channel

logger = logging.getLogger(__name__)

_CHANNEL_LABEL = {Channel.PLUS: 'positive', Channel.MINUS: 'negative'}


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle, in [0, pi]."""
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


@dataclass(frozen=True)
class BicReport:
    """
    A satisfied channel lock and its spectral consequences.

    Attributes
    ----------
    channel : Channel
        Decoupled channel
    condition : str
        The lock that holds, e.g. ``phi_J = pi, phi_+ = 0 (mod 2pi)``
    consequences : tuple of str
        ``Tc≡0``, ``T≡1`` and the R = 1 locus when one exists
    reflection_delta : float, optional
        Detuning (energy units) of total reflection
    """

    channel: Channel
    condition: str
    consequences: Tuple[str, ...]
    reflection_delta: Optional[float] = None

    def describe(self) -> str:
        return f"{_CHANNEL_LABEL[self.channel]}-channel BIC: " + "; ".join(self.consequences)


def _scalar(value) -> float:
    return float(np.asarray(value))


def _coupling_phase_parity(rp: RatePhaseSet, tolerance: float) -> Optional[int]:
    """1 if phi_J = pi, 0 if phi_J = 0 (mod 2pi), None otherwise."""
    phi_J = _scalar(rp.phi_J)
    if angle_distance(phi_J, math.pi) <= tolerance:
        return 1
    if angle_distance(phi_J, 0.0) <= tolerance:
        return 0
    return None


def _equal_rates(rp: RatePhaseSet, tolerance: float) -> bool:
    return abs(_scalar(rp.Gamma_1) - _scalar(rp.Gamma_2)) <= tolerance * _scalar(rp.scale)


def locate_bics(rp: RatePhaseSet, tolerance: Optional[float] = None) -> List[BicReport]:
    """
    Report every satisfied static phase lock.

    Locks are checked on the static phases ``phi_pm`` (frequency-independent
    in the Markovian regime); see :func:`suppression_detunings` for the
    discrete detunings of the exact regime.

    Parameters
    ----------
    rp : RatePhaseSet
        Rates and phases of a single instance
    tolerance : float, optional
        Angular tolerance in radians (default: ``config.bic_tolerance``);
        also bounds ``|Gamma_1 - Gamma_2| / Gamma``

    Returns
    -------
    list of BicReport
        Plus-channel report first; empty when no lock holds

    Examples
    --------
    >>> from gascatter.core.model import PhenomConfig, phenom_to_rateset
    >>> _, rp = phenom_to_rateset(PhenomConfig(phi_J=math.pi, phi_minus=0.3))
    >>> [r.channel.value for r in locate_bics(rp)]
    ['plus']
    """
    tolerance = config.bic_tolerance if tolerance is None else tolerance
    parity = _coupling_phase_parity(rp, tolerance)
    if parity is None or not _equal_rates(rp, tolerance):
        return []

    phi_J = _scalar(rp.phi_J)
    locked = {
        channel: angle_distance(_scalar(phase) - phi_J, math.pi) <= tolerance
        for channel, phase in ((Channel.PLUS, rp.phi_plus), (Channel.MINUS, rp.phi_minus))
    }
    phi_J_text = 'pi' if parity else '0'

    reports = []
    if locked[Channel.PLUS]:
        consequences = ['Tc≡0']
        reflection = None
        if not locked[Channel.MINUS]:
            sign = -1.0 if parity else 1.0
            reflection = sign * _scalar(rp.Gamma_minus) * math.sin(_scalar(rp.phi_minus))
            consequences.append(f"R=1 at Δ={'−' if parity else ''}Γ_−sinφ_−")
        reports.append(BicReport(
            channel=Channel.PLUS,
            condition=f"phi_J = {phi_J_text}, phi_+ = {'0' if parity else 'pi'} (mod 2pi)",
            consequences=tuple(consequences),
            reflection_delta=reflection,
        ))

    if locked[Channel.MINUS]:
        reports.append(BicReport(
            channel=Channel.MINUS,
            condition=f"phi_J = {phi_J_text}, phi_- = {'0' if parity else 'pi'} (mod 2pi)",
            consequences=('T≡1',),
        ))

    for report in reports:
        logger.debug(f"Lock satisfied: {report.condition}")
    return reports


def suppression_detunings(
    rp: RatePhaseSet,
    channel: Channel,
    window: Tuple[float, float],
    tolerance: Optional[float] = None,
) -> np.ndarray:
    """
    Detunings in ``window`` where retardation locks ``channel``.

    Solves ``phi_n + Delta tau - phi_J = pi (mod 2pi)``; emission into the
    channel vanishes there. Empty when ``phi_J`` is not a multiple of pi,
    the leg rates differ or ``tau = 0``.

    Parameters
    ----------
    rp : RatePhaseSet
        Rates and phases of a single instance
    channel : Channel
        Channel whose emission is suppressed
    window : tuple of float
        ``(low, high)`` detuning bounds in energy units

    Returns
    -------
    np.ndarray
        Sorted detunings (energy units)
    """
    tolerance = config.bic_tolerance if tolerance is None else tolerance
    tau = _scalar(rp.tau)
    if tau <= 0 or _coupling_phase_parity(rp, tolerance) is None or not _equal_rates(rp, tolerance):
        return np.empty(0)

    phase = _scalar(rp.phi_plus if channel is Channel.PLUS else rp.phi_minus)
    base = math.pi + _scalar(rp.phi_J) - phase
    low, high = window
    first = math.ceil((low * tau - base) / (2 * math.pi))
    last = math.floor((high * tau - base) / (2 * math.pi))
    return (base + 2 * math.pi * np.arange(first, last + 1)) / tau
