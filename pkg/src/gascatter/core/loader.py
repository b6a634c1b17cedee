"""
Configuration Loading Module

Parses physics input files, provides the bundled figure presets and merges
defaults, presets, files and command-line overrides into RunSettings.

File format
-----------
One ``key = value`` pair per line, ``#`` starts a comment. Keys may be
written flat or under ``[physical]`` / ``[phenom]`` block headers; a
``mode = physical | phenom`` key selects the block that is used. Angles
(``theta``, ``phi_*``, ``J*_phase``) are in units of pi. Values may be
fractions (``1/3``) and a trailing ``pi`` multiplies by pi (``d = 1.0025pi``).
"""

import math
import logging
import dataclasses
from pathlib import Path
from fractions import Fraction
from functools import lru_cache
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple

from gascatter.errors import ConfigError
from gascatter.core.model import (
    DressedFrame,
    PhenomConfig,
    PhysicalConfig,
    RatePhaseSet,
    build_dressed_frame,
    build_rate_phase_set,
    induced_phenom_config,
    phenom_to_rateset,
)
from gascatter.core.scattering import Regime

logger = logging.getLogger(__name__)


# =============================================================================
# Keys
# =============================================================================

PHYSICAL_KEYS = (
    'omega_e', 'omega_f', 'omega_d', 'Omega',
    'J1_mag', 'J2_mag', 'J1_phase', 'J2_phase', 'd', 'v',
)
PHENOM_KEYS = (
    'Gamma', 'theta', 'phi_plus', 'phi_minus', 'phi_J', 'tau_Gamma', 'coupling_ratio',
)
COMMON_KEYS = ('mode', 'regime', 'delta_min', 'delta_max', 'points')

ANGLE_KEYS = frozenset({'theta', 'phi_plus', 'phi_minus', 'phi_J', 'J1_phase', 'J2_phase'})

MODES = ('physical', 'phenom')
_SECTIONS = ('common', 'physical', 'phenom')
_REQUIRED_PHYSICAL = ('omega_e', 'omega_f', 'omega_d', 'Omega', 'J1_mag', 'J2_mag')


# =============================================================================
# Parsed Layers
# =============================================================================

@dataclass(frozen=True)
class ConfigLayer:
    """
    One source of settings (preset, file or flags) before merging.

    Angles are already converted to radians.
    """

    common: Tuple[Tuple[str, Any], ...] = ()
    physical: Tuple[Tuple[str, float], ...] = ()
    phenom: Tuple[Tuple[str, float], ...] = ()
    source: str = '<flags>'

    @classmethod
    def from_dicts(cls, sections: Mapping[str, Mapping[str, Any]], source: str) -> 'ConfigLayer':
        return cls(**{s: tuple(sections.get(s, {}).items()) for s in _SECTIONS}, source=source)


def _parse_number(text: str, key: str, where: str) -> float:
    raw = text.strip()
    factor = 1.0
    if raw.endswith('pi'):
        raw = raw[:-2].strip() or '1'
        factor = math.pi
    try:
        value = float(Fraction(raw)) * factor
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{where}: {key} must be a number, got {text.strip()!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{where}: {key} must be finite")
    return value


def _section_of(key: str, block: Optional[str], where: str) -> str:
    if key in COMMON_KEYS:
        return 'common'
    if key in PHYSICAL_KEYS:
        section = 'physical'
    elif key in PHENOM_KEYS:
        section = 'phenom'
    else:
        raise ConfigError(f"{where}: unknown key {key!r}")
    if block is not None and block != section:
        raise ConfigError(f"{where}: key {key!r} does not belong in [{block}]")
    return section


def _convert(key: str, text: str, where: str) -> Any:
    value = text.strip()
    if key == 'mode':
        if value not in MODES:
            raise ConfigError(f"{where}: mode must be one of {MODES}, got {value!r}")
        return value
    if key == 'regime':
        try:
            return Regime(value).value
        except ValueError:
            raise ConfigError(f"{where}: regime must be exact or markov, got {value!r}") from None
    if key == 'points':
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{where}: points must be an integer, got {value!r}") from None

    number = _parse_number(value, key, where)
    return number * math.pi if key in ANGLE_KEYS else number


def parse_config_text(text: str, source: str = '<string>') -> ConfigLayer:
    """
    Parse configuration text into a ConfigLayer.

    Parameters
    ----------
    text : str
        File contents
    source : str
        Name used in error messages

    Returns
    -------
    ConfigLayer

    Raises
    ------
    ConfigError
        On unknown, duplicate or malformed keys and unknown block headers

    Examples
    --------
    >>> layer = parse_config_text("mode = phenom\\nphi_J = 0.5  # units of pi")
    >>> dict(layer.phenom)['phi_J'] == math.pi / 2
    True
    """
    sections: Dict[str, Dict[str, Any]] = {s: {} for s in _SECTIONS}
    block: Optional[str] = None

    for number, line in enumerate(text.splitlines(), start=1):
        where = f"{source}:{number}"
        content = line.split('#', 1)[0].strip()
        if not content:
            continue

        if content.startswith('[') and content.endswith(']'):
            block = content[1:-1].strip()
            if block not in MODES:
                raise ConfigError(f"{where}: unknown block [{block}]")
            continue

        key, sep, value = content.partition('=')
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{where}: expected 'key = value', got {content!r}")

        section = _section_of(key, block, where)
        if key in sections[section]:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        sections[section][key] = _convert(key, value, where)

    return ConfigLayer.from_dicts(sections, source)


def load_config_file(path: Path | str) -> ConfigLayer:
    """Read and parse a configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from None
    logger.debug(f"Loaded config file {path}")
    return parse_config_text(text, source=str(path))


# =============================================================================
# Figure Presets
# =============================================================================

@dataclass(frozen=True)
class FigurePreset:
    """Named parameter set in configuration-file syntax."""

    name: str
    description: str
    text: str


_FIG4_PHYSICAL = """
mode = physical
regime = exact
omega_e = 600
omega_f = 500
omega_d = 500
Omega = 1.5
v = 1
J1_mag = 0.3989422804014327
J2_mag = 0.3989422804014327
J1_phase = 1
J2_phase = 0
"""

PRESETS: Dict[str, FigurePreset] = {p.name: p for p in (
    FigurePreset('fig1a', 'Markovian, positive-channel BIC slice: Tc = 0, R = 1 at -sqrt(2)/4',
                 "mode = phenom\nregime = markov\nphi_J = 1\nphi_minus = 0.75\nphi_plus = 0\n"),
    FigurePreset('fig1d', 'Markovian, phi_J = 0.75 pi, phi_- = pi',
                 "mode = phenom\nregime = markov\nphi_J = 0.75\nphi_minus = 1\nphi_plus = 0\n"),
    FigurePreset('fig1g', 'Markovian, negative-channel BIC: T = 1 everywhere',
                 "mode = phenom\nregime = markov\nphi_J = 1\nphi_plus = 1/3\nphi_minus = 0\n"),
    FigurePreset('fig2', 'Markovian, reciprocal: Tc peaks at 1/2',
                 "mode = phenom\nregime = markov\nphi_J = 0\nphi_plus = 0.5\nphi_minus = 1.5\n"),
    FigurePreset('fig3a', 'Markovian, unit-contrast locus with phi_J = 0.1 pi',
                 "mode = phenom\nregime = markov\nphi_J = 0.1\nphi_minus = 1.1\nphi_plus = 0.9\n"),
    FigurePreset('fig3b', 'Markovian, unit-contrast locus with phi_J = 0.3 pi',
                 "mode = phenom\nregime = markov\nphi_J = 0.3\nphi_minus = 1.3\nphi_plus = 0.7\n"),
    FigurePreset('fig3c', 'Markovian, unit-contrast locus with phi_J = 0.5 pi',
                 "mode = phenom\nregime = markov\nphi_J = 0.5\nphi_minus = 1.5\nphi_plus = 0.5\n"),
    FigurePreset('fig4a', 'Physical, exact, tau Gamma = 1.0025 pi: unit transmission peaks',
                 _FIG4_PHYSICAL + "d = 1.0025pi\n"),
    FigurePreset('fig4b', 'Physical, exact, tau Gamma = 0.9975 pi',
                 _FIG4_PHYSICAL + "d = 0.9975pi\n"),
    FigurePreset('fig4c', 'Exact, tau Gamma = pi, phi_+ = pi/2: Tc dips from both channels',
                 "mode = phenom\nregime = exact\nphi_J = 1\ntau_Gamma = 1pi\n"
                 "phi_minus = 0\nphi_plus = 0.5\n"),
    FigurePreset('fig4d', 'Exact, tau Gamma = pi, phi_- = pi/2',
                 "mode = phenom\nregime = exact\nphi_J = 1\ntau_Gamma = 1pi\n"
                 "phi_plus = 0\nphi_minus = 0.5\n"),
    FigurePreset('fig5a', 'Exact, gamma = 0: odd conversion contrast',
                 "mode = phenom\nregime = exact\ntau_Gamma = 1pi\nphi_J = 0.5\n"
                 "phi_minus = 0\nphi_plus = 0\n"),
    FigurePreset('fig5b', 'Exact, gamma = 0: even conversion contrast reaching 1',
                 "mode = phenom\nregime = exact\ntau_Gamma = 1pi\nphi_J = 0.5\n"
                 "phi_minus = 0.5\nphi_plus = 0\n"),
    FigurePreset('fig5c', 'Exact, phi_+ - phi_- = pi: odd conversion contrast',
                 "mode = phenom\nregime = exact\ntau_Gamma = 1pi\nphi_J = 0.25\n"
                 "phi_minus = 0\nphi_plus = 1\n"),
    FigurePreset('fig5d', 'Exact, phi_+ - phi_- = pi: even contrast, Tc = 1 at Delta = 0',
                 "mode = phenom\nregime = exact\ntau_Gamma = 1pi\nphi_J = 0.5\n"
                 "phi_minus = 0.5\nphi_plus = 1.5\n"),
)}


def list_presets() -> List[str]:
    """Return one ``name: description`` line per bundled preset."""
    return [f"{p.name}: {p.description}" for p in PRESETS.values()]


@lru_cache(maxsize=None)
def load_preset(name: str) -> ConfigLayer:
    """
    Parse a bundled figure preset.

    Raises
    ------
    ConfigError
        If the preset is unknown
    """
    if name not in PRESETS:
        raise ConfigError(f"unknown figure {name!r}; available: {', '.join(PRESETS)}")
    return parse_config_text(PRESETS[name].text, source=f"preset {name}")


# =============================================================================
# Merged Settings
# =============================================================================

@dataclass(frozen=True)
class RunSettings:
    """
    Fully resolved system description for one command.

    Exactly one of ``physical`` / ``phenom`` is set, matching ``mode``.
    """

    mode: str
    regime: Regime
    physical: Optional[PhysicalConfig] = None
    phenom: Optional[PhenomConfig] = None
    delta_min: Optional[float] = None
    delta_max: Optional[float] = None
    points: Optional[int] = None
    figure: Optional[str] = None

    def build(self) -> Tuple[DressedFrame, RatePhaseSet]:
        """Return the dressed frame and rate set of the active configuration."""
        if self.mode == 'physical':
            frame = build_dressed_frame(self.physical)
            return frame, build_rate_phase_set(frame, self.physical)
        return phenom_to_rateset(self.phenom)

    def as_phenom(self) -> PhenomConfig:
        """Phenomenological view of the configuration (induced in physical mode)."""
        if self.mode == 'physical':
            return induced_phenom_config(self.physical)
        return self.phenom

    def resolved(self) -> Dict[str, Any]:
        """Active parameters after defaulting (radians), for run manifests."""
        active = self.physical if self.mode == 'physical' else self.phenom
        return {k: float(v) for k, v in dataclasses.asdict(active).items()}


def _merge(target: Dict[str, Dict[str, Any]], layer: ConfigLayer) -> None:
    for section in _SECTIONS:
        target[section].update(getattr(layer, section))


def build_settings(
    figure: Optional[str] = None,
    config_path: Optional[Path | str] = None,
    overrides: Optional[ConfigLayer] = None,
) -> RunSettings:
    """
    Merge defaults, a figure preset, a config file and flag overrides.

    Later sources win: defaults < preset < config file < overrides.
    Phenomenological overrides on a physical configuration convert it to
    its induced phenomenological configuration.

    Parameters
    ----------
    figure : str, optional
        Bundled preset name
    config_path : Path or str, optional
        Configuration file
    overrides : ConfigLayer, optional
        Values from command-line flags

    Returns
    -------
    RunSettings

    Raises
    ------
    ConfigError
        On unknown presets, unreadable or malformed files, missing physical
        parameters or invalid values
    """
    merged: Dict[str, Dict[str, Any]] = {s: {} for s in _SECTIONS}
    layers = []
    if figure:
        layers.append(load_preset(figure))
    if config_path:
        layers.append(load_config_file(config_path))
    if overrides is not None:
        layers.append(overrides)
    for layer in layers:
        _merge(merged, layer)

    common = merged['common']
    mode = common.get('mode') or ('physical' if merged['physical'] else 'phenom')
    regime = Regime(common.get('regime', Regime.EXACT.value))

    physical = phenom = None
    if mode == 'physical':
        missing = [k for k in _REQUIRED_PHYSICAL if k not in merged['physical']]
        if missing:
            raise ConfigError(f"physical mode requires {', '.join(missing)}")
        physical = PhysicalConfig(**merged['physical'])

        flag_phenom = dict(overrides.phenom) if overrides is not None else {}
        if flag_phenom:
            logger.warning(
                f"Phenomenological overrides {sorted(flag_phenom)} applied to a physical "
                f"configuration; switching to its induced phenomenological form"
            )
            phenom = dataclasses.replace(induced_phenom_config(physical), **flag_phenom)
            physical, mode = None, 'phenom'
    else:
        if merged['physical'] and 'mode' in common:
            logger.info("Ignoring physical parameters in phenom mode")
        phenom = PhenomConfig(**merged['phenom'])

    settings = RunSettings(
        mode=mode,
        regime=regime,
        physical=physical,
        phenom=phenom,
        delta_min=common.get('delta_min'),
        delta_max=common.get('delta_max'),
        points=common.get('points'),
        figure=figure,
    )
    logger.debug(f"Resolved settings: mode={settings.mode}, regime={settings.regime.value}")
    return settings
