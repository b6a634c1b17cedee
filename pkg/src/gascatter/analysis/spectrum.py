"""
Spectrum Sweep Module

Evaluates transport spectra over a detuning grid for both incidence
directions of a minus-channel photon, assembles them as an xarray Dataset
and derives the transmission and conversion contrasts.
"""

import math
import logging
import dataclasses
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import xarray as xr

from gascatter.config import (
    DEFAULT_GRID_POINTS,
    EXACT_WINDOW_PERIODS,
    MARKOV_HALF_WINDOW,
    config,
)
from gascatter.errors import ConfigError, GridError
from gascatter.core.model import DressedFrame, PhenomConfig, RatePhaseSet, phenom_to_rateset
from gascatter.core.scattering import (
    Channel,
    Direction,
    Incidence,
    Regime,
    evaluate_amplitudes,
)
from gascatter.utils.parallel import chunked_map

logger = logging.getLogger(__name__)

GRID_DIM = 'delta_over_gamma'

SPECTRUM_COLUMNS = ('T', 'R', 'Tc', 'T_b', 'R_b', 'Tc_b', 'I1', 'I2')

_LONG_NAMES = {
    'T': 'forward transmission probability',
    'R': 'forward reflection probability',
    'Tc': 'forward conversion probability',
    'T_b': 'backward transmission probability',
    'R_b': 'backward reflection probability',
    'Tc_b': 'backward conversion probability',
    'I1': 'transmission contrast T - T_b',
    'I2': 'conversion contrast Tc - Tc_b',
    'near_pole': 'sample evaluated at the limit of a vanishing denominator',
}


# =============================================================================
# Detuning Grid
# =============================================================================

@dataclass(frozen=True)
class GridSpec:
    """
    Uniform detuning grid in units of Gamma.

    A symmetric grid (``start = -stop``) yields exactly antisymmetric
    samples, so ``values()[::-1] == -values()`` holds bit for bit.
    """

    start: float
    stop: float
    points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if not isinstance(self.points, (int, np.integer)) or self.points < 1:
            raise GridError(f"grid needs at least one point, got {self.points!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise GridError("grid bounds must be finite")
        if self.points > 1 and not self.stop > self.start:
            raise GridError(f"grid must be increasing, got [{self.start}, {self.stop}]")

    def values(self) -> np.ndarray:
        """Return the grid samples (Delta / Gamma)."""
        if self.points == 1:
            return np.array([float(self.start)])
        unit = np.linspace(-1.0, 1.0, self.points)
        unit = (unit - unit[::-1]) / 2
        middle = (self.start + self.stop) / 2
        half = (self.stop - self.start) / 2
        return middle + half * unit

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.points - 1) if self.points > 1 else 0.0

    def as_dict(self) -> dict:
        return {'start': self.start, 'stop': self.stop, 'points': self.points}


def default_grid(
    rp: RatePhaseSet,
    regime: Regime,
    points: Optional[int] = None,
) -> GridSpec:
    """
    Default window: [-10, 10] Gamma (Markovian) or [-4 pi/tau, 4 pi/tau] (exact).

    The exact window falls back to the Markovian one when tau = 0.
    """
    points = points or config.grid_points
    tau_gamma = float(np.asarray(rp.tau) * np.asarray(rp.scale))
    if regime is Regime.EXACT and tau_gamma > 0:
        half = EXACT_WINDOW_PERIODS * math.pi / tau_gamma
    else:
        half = MARKOV_HALF_WINDOW
    return GridSpec(-half, half, points)


def validate_grid(values: np.ndarray) -> np.ndarray:
    """Check an explicit grid: non-empty, finite and strictly increasing."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise GridError("grid must be a non-empty one-dimensional array")
    if not np.all(np.isfinite(values)):
        raise GridError("grid contains non-finite values")
    if np.any(np.diff(values) <= 0):
        raise GridError("grid must be strictly increasing")
    return values


def _grid_values(grid: GridSpec | np.ndarray) -> np.ndarray:
    if isinstance(grid, GridSpec):
        return grid.values()
    return validate_grid(grid)


# =============================================================================
# Rows
# =============================================================================

@dataclass(frozen=True)
class SpectrumRow:
    """
    Transport probabilities at one detuning.

    ``*_tilde`` fields belong to backward incidence; ``I1 = T - T_tilde``
    and ``I2 = Tc - Tc_tilde``.
    """

    delta_over_Gamma: float
    T: float
    R: float
    Tc: float
    T_tilde: float
    R_tilde: float
    Tc_tilde: float
    I1: float
    I2: float
    flags: Tuple[str, ...] = ()


# =============================================================================
# Sweeps
# =============================================================================

def spectrum_dataset(
    rp: RatePhaseSet,
    frame: DressedFrame,
    regime: Regime,
    grid: GridSpec | np.ndarray,
    threads: Optional[int] = None,
) -> xr.Dataset:
    """
    Evaluate both incidence directions over a detuning grid.

    Parameters
    ----------
    rp : RatePhaseSet
        Rates and phases of a single instance
    frame : DressedFrame
        Dressed frame
    regime : Regime
        Evaluation regime
    grid : GridSpec or np.ndarray
        Detuning samples in units of Gamma
    threads : int, optional
        Worker threads for the chunked evaluation

    Returns
    -------
    xr.Dataset
        Variables ``T, R, Tc, T_b, R_b, Tc_b, I1, I2, near_pole`` over the
        ``delta_over_gamma`` coordinate

    Raises
    ------
    GridError
        For an invalid grid
    ChannelClosedError
        If a grid point closes a channel (physical mode)
    """
    x = _grid_values(grid)
    delta = x * rp.scale

    def evaluate(chunk: slice) -> np.ndarray:
        d = delta[chunk]
        forward = evaluate_amplitudes(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, d), regime)
        backward = evaluate_amplitudes(rp, frame, Incidence(Direction.BACKWARD, Channel.MINUS, d), regime)
        flagged = np.logical_or(forward.singular, backward.singular)
        return np.stack([
            np.broadcast_to(column, d.shape).astype(float) for column in (
                forward.T, forward.R, forward.Tc,
                backward.T, backward.R, backward.Tc,
                flagged,
            )
        ])

    data = np.concatenate(chunked_map(evaluate, x.size, threads=threads), axis=1)
    near_pole = data[6] > 0
    if np.any(near_pole):
        logger.warning(f"{int(np.count_nonzero(near_pole))} grid point(s) at a vanishing denominator")

    ds = xr.Dataset(
        {name: (GRID_DIM, data[i]) for i, name in enumerate(('T', 'R', 'Tc', 'T_b', 'R_b', 'Tc_b'))},
        coords={GRID_DIM: x},
        attrs={'regime': regime.value},
    )
    ds['I1'] = ds['T'] - ds['T_b']
    ds['I2'] = ds['Tc'] - ds['Tc_b']
    ds['near_pole'] = (GRID_DIM, near_pole)

    for name, long_name in _LONG_NAMES.items():
        ds[name].attrs['long_name'] = long_name
    ds[GRID_DIM].attrs['long_name'] = 'detuning Delta / Gamma of the lower-channel photon'

    logger.debug(f"Spectrum evaluated on {x.size} points ({regime.value})")
    return ds


def rows_from_dataset(ds: xr.Dataset) -> List[SpectrumRow]:
    """Convert a spectrum dataset into SpectrumRow records, in grid order."""
    columns = {name: ds[name].values for name in SPECTRUM_COLUMNS}
    flags = ds['near_pole'].values
    return [
        SpectrumRow(
            delta_over_Gamma=float(x),
            T=float(columns['T'][i]),
            R=float(columns['R'][i]),
            Tc=float(columns['Tc'][i]),
            T_tilde=float(columns['T_b'][i]),
            R_tilde=float(columns['R_b'][i]),
            Tc_tilde=float(columns['Tc_b'][i]),
            I1=float(columns['I1'][i]),
            I2=float(columns['I2'][i]),
            flags=('near_pole',) if flags[i] else (),
        )
        for i, x in enumerate(ds[GRID_DIM].values)
    ]


def sweep(
    rp: RatePhaseSet,
    frame: DressedFrame,
    regime: Regime,
    grid: GridSpec | np.ndarray,
    threads: Optional[int] = None,
) -> List[SpectrumRow]:
    """
    One SpectrumRow per grid point, both directions evaluated.

    Examples
    --------
    >>> from gascatter.core.model import PhenomConfig, phenom_to_rateset
    >>> frame, rp = phenom_to_rateset(PhenomConfig(phi_J=np.pi, phi_plus=np.pi / 3))
    >>> rows = sweep(rp, frame, Regime.MARKOV, GridSpec(-10, 10, 11))
    >>> min(row.T for row in rows) > 1 - 1e-12
    True
    """
    return rows_from_dataset(spectrum_dataset(rp, frame, regime, grid, threads))


def contrast_sweep(
    rp: RatePhaseSet,
    frame: DressedFrame,
    regime: Regime,
    grid: GridSpec | np.ndarray,
    threads: Optional[int] = None,
) -> List[SpectrumRow]:
    """
    Alias of :func:`sweep` for contrast studies.

    Every SpectrumRow already evaluates both directions, so ``I1 = T - T_b``
    and ``I2 = Tc - Tc_b`` are populated and no separate evaluation path
    exists. Callers that only need ``I2`` over a parameter use
    :func:`contrast_scan` instead.

    Examples
    --------
    >>> from gascatter.core.model import PhenomConfig, phenom_to_rateset
    >>> frame, rp = phenom_to_rateset(PhenomConfig(phi_J=0.0, phi_minus=np.pi / 2))
    >>> rows = contrast_sweep(rp, frame, Regime.MARKOV, GridSpec(-5, 5, 21))
    >>> max(abs(row.I2) for row in rows) < 1e-12
    True
    """
    return sweep(rp, frame, regime, grid, threads)


def contrast_scan(
    cfg: PhenomConfig,
    parameter: str,
    values: Sequence[float],
    regime: Regime,
    grid: GridSpec | np.ndarray,
    threads: Optional[int] = None,
) -> xr.DataArray:
    """
    Conversion contrast I2 for a list of values of one PhenomConfig field.

    Parameters
    ----------
    cfg : PhenomConfig
        Base configuration
    parameter : str
        PhenomConfig field to scan (e.g. ``phi_plus``), radians for angles
    values : sequence of float
        Values of ``parameter``
    regime : Regime
        Evaluation regime
    grid : GridSpec or np.ndarray
        Detuning samples in units of Gamma

    Returns
    -------
    xr.DataArray
        ``I2`` with dimensions ``(parameter, delta_over_gamma)``
    """
    names = {f.name for f in dataclasses.fields(PhenomConfig)}
    if parameter not in names:
        raise ConfigError(f"cannot scan {parameter!r}; choose one of {sorted(names)}")
    if len(values) == 0:
        raise ConfigError("scan needs at least one value")

    curves = []
    for value in values:
        frame, rp = phenom_to_rateset(dataclasses.replace(cfg, **{parameter: value}))
        curves.append(spectrum_dataset(rp, frame, regime, grid, threads)['I2'])

    scan = xr.concat(curves, dim=xr.DataArray(np.asarray(values, dtype=float), dims=parameter, name=parameter))
    scan.name = 'I2'
    logger.debug(f"Scanned I2 over {len(values)} value(s) of {parameter}")
    return scan
