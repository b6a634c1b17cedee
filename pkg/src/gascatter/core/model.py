"""
Core Model Module

Configuration types for one atom-waveguide instance, the dressed-state
transformation of the driven {g, f} block, and the decay-rate and phase
bookkeeping consumed by every evaluator.

All quantities downstream of this module are expressed in rate units: the
coupling magnitudes only enter through the per-leg rates
``Gamma_j = (pi / v) |J_j|^2``.
"""

import math
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from gascatter.config import RWA_RATIO
from gascatter.errors import ConfigError

logger = logging.getLogger(__name__)

# Scalar or numpy array; rate sets may be batched for vectorized evaluation
FloatLike = float | np.ndarray


def _unwrap(value):
    """Return a numpy scalar for 0-d input, the array otherwise."""
    return np.asarray(value)[()]


# =============================================================================
# Configuration Types
# =============================================================================

@dataclass(frozen=True)
class PhysicalConfig:
    """
    Physical parameters of the driven giant atom and its waveguide.

    Energies share one unit (``v = 1`` is a common choice); phases are in
    radians. The drive acts on the g-f transition.

    Parameters
    ----------
    omega_e, omega_f : float
        Energies of the excited state and of the driven level f
    omega_d : float
        Drive frequency
    Omega : float
        Real, nonnegative Rabi frequency
    J1_mag, J2_mag : float
        Coupling magnitudes at x = +d/2 and x = -d/2
    J1_phase, J2_phase : float
        Coupling phases
    d : float
        Separation of the coupling points
    v : float
        Group velocity of the waveguide
    """

    omega_e: float
    omega_f: float
    omega_d: float
    Omega: float
    J1_mag: float
    J2_mag: float
    J1_phase: float = 0.0
    J2_phase: float = 0.0
    d: float = 0.0
    v: float = 1.0

    def __post_init__(self):
        for name in ('omega_e', 'omega_f', 'omega_d', 'Omega', 'J1_mag', 'J2_mag',
                     'J1_phase', 'J2_phase', 'd', 'v'):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite, got {getattr(self, name)!r}")
        if self.Omega < 0:
            raise ConfigError(f"Omega must be nonnegative, got {self.Omega}")
        if self.J1_mag < 0 or self.J2_mag < 0:
            raise ConfigError("coupling magnitudes must be nonnegative")
        if self.d < 0:
            raise ConfigError(f"d must be nonnegative, got {self.d}")
        if self.v <= 0:
            raise ConfigError(f"v must be positive, got {self.v}")


@dataclass(frozen=True)
class PhenomConfig:
    """
    Phenomenological parameterization (Gamma, theta, phases, tau*Gamma).

    Fields may be numpy arrays of a common shape to describe a batch of
    instances; validation then applies elementwise.

    Parameters
    ----------
    Gamma : float
        Total decay rate, positive
    theta : float
        Mixing angle in [0, pi]
    phi_plus, phi_minus : float
        Propagation phases of the two dressed channels (any real, mod 2pi)
    phi_J : float
        Phase difference of the two couplings
    tau_Gamma : float
        Dimensionless delay tau * Gamma, nonnegative
    coupling_ratio : float
        |J2| / |J1|, nonnegative
    """

    Gamma: FloatLike = 1.0
    theta: FloatLike = math.pi / 2
    phi_plus: FloatLike = 0.0
    phi_minus: FloatLike = 0.0
    phi_J: FloatLike = 0.0
    tau_Gamma: FloatLike = 0.0
    coupling_ratio: FloatLike = 1.0

    def __post_init__(self):
        for name in ('Gamma', 'theta', 'phi_plus', 'phi_minus', 'phi_J',
                     'tau_Gamma', 'coupling_ratio'):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ConfigError(f"{name} must be finite")
        if np.any(np.asarray(self.Gamma) <= 0):
            raise ConfigError("Gamma must be positive")
        if np.any(np.asarray(self.tau_Gamma) < 0):
            raise ConfigError("tau_Gamma must be nonnegative")
        if np.any(np.asarray(self.coupling_ratio) < 0):
            raise ConfigError("coupling_ratio must be nonnegative")
        theta = np.asarray(self.theta)
        if np.any(theta < 0) or np.any(theta > math.pi):
            raise ConfigError("theta must lie in [0, pi]")

    @property
    def phi(self) -> FloatLike:
        """Global conversion phase (phi_minus - phi_plus) / 2."""
        return (self.phi_minus - self.phi_plus) / 2


# =============================================================================
# Derived Types
# =============================================================================

@dataclass(frozen=True)
class DressedFrame:
    """
    Dressed-state frame of the driven {g, f} block.

    ``nu_plus``/``nu_minus`` are None when the frame was built from a
    phenomenological configuration (flag ``energies_unset``).
    """

    theta: FloatLike
    nu_plus: Optional[float]
    nu_minus: Optional[float]
    J1s: complex
    J2s: complex
    J1c: complex
    J2c: complex
    flags: Tuple[str, ...] = ()

    @property
    def has_energies(self) -> bool:
        return self.nu_plus is not None and self.nu_minus is not None


@dataclass(frozen=True)
class RatePhaseSet:
    """
    Every rate and phase entering the amplitude formulas.

    Attributes
    ----------
    Gamma : float
        Total decay rate, ``Gamma_1 + Gamma_2``
    gamma : float
        Signed waveguide-mediated nonlocal damping ``2 sqrt(Gamma_1 Gamma_2) cos(phi_J)``
    Gamma_plus, Gamma_minus : float
        Channel split ``Gamma sin^2(theta/2)`` and ``Gamma cos^2(theta/2)``
    gamma_plus, gamma_minus : float
        Same split of ``gamma``
    tau : float
        Travel time between the coupling points
    phi_plus, phi_minus : float
        Static propagation phases of the two channels
    phi : float
        Global conversion phase, ``(phi_minus - phi_plus) / 2``
    phi_J : float
        Coupling phase difference ``phi_1 - phi_2``
    Gamma_1, Gamma_2 : float
        Per-leg rates at x = +d/2 and x = -d/2
    v : float
        Group velocity (1 in phenomenological mode)
    omega_e : float, optional
        Excited-state energy, known in physical mode only
    """

    Gamma: FloatLike
    gamma: FloatLike
    Gamma_plus: FloatLike
    Gamma_minus: FloatLike
    gamma_plus: FloatLike
    gamma_minus: FloatLike
    tau: FloatLike
    phi_plus: FloatLike
    phi_minus: FloatLike
    phi: FloatLike
    phi_J: FloatLike
    Gamma_1: FloatLike
    Gamma_2: FloatLike
    v: float = 1.0
    omega_e: Optional[float] = None

    @property
    def scale(self) -> FloatLike:
        """Energy unit for normalization: Gamma, or 1 when uncoupled."""
        return _unwrap(np.where(np.asarray(self.Gamma) > 0, self.Gamma, 1.0))


# =============================================================================
# Dressed Frame
# =============================================================================

def drive_block(cfg: PhysicalConfig) -> np.ndarray:
    """
    Return the driven {g, f} block in the frame rotating at the drive.

    Rows and columns are ordered (g, f).
    """
    return np.array([
        [0.0, cfg.Omega],
        [cfg.Omega, cfg.omega_f - cfg.omega_d],
    ])


def build_dressed_frame(cfg: PhysicalConfig) -> DressedFrame:
    """
    Diagonalize the drive analytically and split the couplings by channel.

    Parameters
    ----------
    cfg : PhysicalConfig
        Physical configuration

    Returns
    -------
    DressedFrame
        Mixing angle ``theta = atan2(2 Omega, omega_f - omega_d)`` in [0, pi],
        eigenenergies and channel couplings ``J_js = J_j sin(theta/2)``,
        ``J_jc = J_j cos(theta/2)``

    Examples
    --------
    >>> frame = build_dressed_frame(PhysicalConfig(600, 500, 500, 1.5, 0.4, 0.4))
    >>> round(frame.theta / math.pi, 12), frame.nu_plus, frame.nu_minus
    (0.5, 1.5, -1.5)
    """
    detuning = cfg.omega_f - cfg.omega_d
    flags: Tuple[str, ...] = ()

    if cfg.Omega == 0 and detuning == 0:
        # tan(theta) = 0/0; continue with the undriven limit
        theta = 0.0
        flags = ('degenerate_drive',)
        logger.warning("Degenerate drive (Omega = 0, omega_f = omega_d): using theta = 0")
    else:
        theta = math.atan2(2.0 * cfg.Omega, detuning)

    splitting = math.hypot(detuning, 2.0 * cfg.Omega)
    nu_plus = (detuning + splitting) / 2
    nu_minus = (detuning - splitting) / 2

    J1 = cfg.J1_mag * complex(math.cos(cfg.J1_phase), math.sin(cfg.J1_phase))
    J2 = cfg.J2_mag * complex(math.cos(cfg.J2_phase), math.sin(cfg.J2_phase))
    sin_half, cos_half = math.sin(theta / 2), math.cos(theta / 2)

    return DressedFrame(
        theta=theta,
        nu_plus=nu_plus,
        nu_minus=nu_minus,
        J1s=J1 * sin_half,
        J2s=J2 * sin_half,
        J1c=J1 * cos_half,
        J2c=J2 * cos_half,
        flags=flags,
    )


# =============================================================================
# Rates and Phases
# =============================================================================

def _assemble_rates(
    Gamma_1: FloatLike,
    Gamma_2: FloatLike,
    Gamma: FloatLike,
    theta: FloatLike,
    phi_J: FloatLike,
    tau: FloatLike,
    phi_plus: FloatLike,
    phi_minus: FloatLike,
    phi: FloatLike,
    v: float,
    omega_e: Optional[float],
) -> RatePhaseSet:
    gamma = 2.0 * np.sqrt(Gamma_1 * Gamma_2) * np.cos(phi_J)
    sin2 = np.sin(np.asarray(theta) / 2) ** 2
    cos2 = np.cos(np.asarray(theta) / 2) ** 2

    return RatePhaseSet(
        Gamma=Gamma,
        gamma=_unwrap(gamma),
        Gamma_plus=_unwrap(Gamma * sin2),
        Gamma_minus=_unwrap(Gamma * cos2),
        gamma_plus=_unwrap(gamma * sin2),
        gamma_minus=_unwrap(gamma * cos2),
        tau=tau,
        phi_plus=phi_plus,
        phi_minus=phi_minus,
        phi=phi,
        phi_J=phi_J,
        Gamma_1=Gamma_1,
        Gamma_2=Gamma_2,
        v=v,
        omega_e=omega_e,
    )


def build_rate_phase_set(frame: DressedFrame, cfg: PhysicalConfig) -> RatePhaseSet:
    """
    Compute decay rates, the nonlocal damping and the propagation phases.

    Parameters
    ----------
    frame : DressedFrame
        Frame returned by :func:`build_dressed_frame` for ``cfg``
    cfg : PhysicalConfig
        Physical configuration

    Returns
    -------
    RatePhaseSet
        ``Gamma = (pi/v)(|J1|^2 + |J2|^2)``, ``gamma = (2 pi/v)|J1||J2| cos(phi_J)``,
        ``tau = d/v``, ``phi_pm = (omega_e - nu_pm) tau``,
        ``phi = (nu_plus - nu_minus) tau / 2``, ``phi_J = phi_1 - phi_2``
    """
    Gamma_1 = math.pi / cfg.v * cfg.J1_mag ** 2
    Gamma_2 = math.pi / cfg.v * cfg.J2_mag ** 2
    Gamma = Gamma_1 + Gamma_2
    tau = cfg.d / cfg.v

    if Gamma == 0:
        logger.warning("Both couplings vanish: the atom is transparent")
    elif cfg.omega_e < RWA_RATIO * Gamma:
        logger.warning(
            f"omega_e = {cfg.omega_e} is below {RWA_RATIO:g} Gamma; "
            f"rotating-wave treatment may be inaccurate"
        )

    return _assemble_rates(
        Gamma_1=Gamma_1,
        Gamma_2=Gamma_2,
        Gamma=Gamma,
        theta=frame.theta,
        phi_J=cfg.J1_phase - cfg.J2_phase,
        tau=tau,
        phi_plus=(cfg.omega_e - frame.nu_plus) * tau,
        phi_minus=(cfg.omega_e - frame.nu_minus) * tau,
        phi=(frame.nu_plus - frame.nu_minus) * tau / 2,
        v=cfg.v,
        omega_e=cfg.omega_e,
    )


def phenom_to_rateset(cfg: PhenomConfig) -> Tuple[DressedFrame, RatePhaseSet]:
    """
    Build the frame and rate set of a phenomenological configuration.

    The velocity is fixed to 1 and |J1| follows from Gamma and the coupling
    ratio. The coupling phases are placed as ``phi_1 = phi_J``, ``phi_2 = 0``.
    Dressed energies are not needed by any probability and stay unset.

    Parameters
    ----------
    cfg : PhenomConfig
        Phenomenological configuration (scalar or batched)

    Returns
    -------
    tuple of (DressedFrame, RatePhaseSet)
    """
    ratio_sq = np.asarray(cfg.coupling_ratio, dtype=float) ** 2
    Gamma_1 = _unwrap(cfg.Gamma / (1.0 + ratio_sq))
    Gamma_2 = _unwrap(cfg.Gamma * ratio_sq / (1.0 + ratio_sq))

    J1_mag = np.sqrt(Gamma_1 / math.pi)
    J2_mag = np.sqrt(Gamma_2 / math.pi)
    J1 = J1_mag * np.exp(1j * np.asarray(cfg.phi_J))
    sin_half = np.sin(np.asarray(cfg.theta) / 2)
    cos_half = np.cos(np.asarray(cfg.theta) / 2)

    frame = DressedFrame(
        theta=cfg.theta,
        nu_plus=None,
        nu_minus=None,
        J1s=_unwrap(J1 * sin_half),
        J2s=_unwrap(J2_mag * sin_half),
        J1c=_unwrap(J1 * cos_half),
        J2c=_unwrap(J2_mag * cos_half),
        flags=('energies_unset',),
    )

    rates = _assemble_rates(
        Gamma_1=Gamma_1,
        Gamma_2=Gamma_2,
        Gamma=cfg.Gamma,
        theta=cfg.theta,
        phi_J=cfg.phi_J,
        tau=_unwrap(cfg.tau_Gamma / np.asarray(cfg.Gamma)),
        phi_plus=cfg.phi_plus,
        phi_minus=cfg.phi_minus,
        phi=cfg.phi,
        v=1.0,
        omega_e=None,
    )
    return frame, rates


def induced_phenom_config(cfg: PhysicalConfig) -> PhenomConfig:
    """
    Express a physical configuration in the phenomenological parameterization.

    Raises
    ------
    ConfigError
        If |J1| = 0 (the coupling ratio is not representable) or Gamma = 0
    """
    if cfg.J1_mag == 0:
        raise ConfigError("|J1| = 0 has no phenomenological representation")

    frame = build_dressed_frame(cfg)
    rates = build_rate_phase_set(frame, cfg)
    if rates.Gamma <= 0:
        raise ConfigError("Gamma = 0 has no phenomenological representation")

    return PhenomConfig(
        Gamma=rates.Gamma,
        theta=frame.theta,
        phi_plus=rates.phi_plus,
        phi_minus=rates.phi_minus,
        phi_J=rates.phi_J,
        tau_Gamma=rates.tau * rates.Gamma,
        coupling_ratio=cfg.J2_mag / cfg.J1_mag,
    )
