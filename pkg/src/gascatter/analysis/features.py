"""
Spectral Feature Extraction

Finds peaks and dips of one transport coefficient along a sweep, refines
their positions below the grid spacing and measures their widths.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import xarray as xr
from scipy.signal import find_peaks, peak_widths

from gascatter.config import FLAT_TOLERANCE, config
from gascatter.errors import ConfigError, InsufficientDataError
from gascatter.analysis.spectrum import GRID_DIM, SpectrumRow

logger = logging.getLogger(__name__)

COEFFICIENTS = ('T', 'R', 'Tc', 'T_tilde', 'R_tilde', 'Tc_tilde', 'I1', 'I2')
CONTRASTS = ('I1', 'I2')

# Dataset variable of each row coefficient
_DATASET_NAMES = {'T_tilde': 'T_b', 'R_tilde': 'R_b', 'Tc_tilde': 'Tc_b'}


@dataclass(frozen=True)
class Feature:
    """One extremum: location (Delta/Gamma), value and width at half prominence."""

    location: float
    value: float
    width: float


@dataclass(frozen=True)
class FeatureSet:
    """Peaks and dips of one coefficient, each sorted by location."""

    coefficient: str
    peaks: Tuple[Feature, ...] = ()
    dips: Tuple[Feature, ...] = ()

    @property
    def count(self) -> int:
        return len(self.peaks) + len(self.dips)


def _series(data: Sequence[SpectrumRow] | xr.Dataset, coefficient: str) -> Tuple[np.ndarray, np.ndarray]:
    if coefficient not in COEFFICIENTS:
        raise ConfigError(f"unknown coefficient {coefficient!r}; choose one of {COEFFICIENTS}")
    if isinstance(data, xr.Dataset):
        name = _DATASET_NAMES.get(coefficient, coefficient)
        return data[GRID_DIM].values.astype(float), data[name].values.astype(float)
    x = np.array([row.delta_over_Gamma for row in data], dtype=float)
    y = np.array([getattr(row, coefficient) for row in data], dtype=float)
    return x, y


def _refine(x: np.ndarray, y: np.ndarray, index: int) -> Tuple[float, float]:
    """Vertex of the parabola through the three samples around ``index``."""
    window = slice(index - 1, index + 2)
    a, b, c = np.polyfit(x[window] - x[index], y[window], 2)
    if a >= 0:
        return float(x[index]), float(y[index])
    offset = np.clip(-b / (2 * a), x[index - 1] - x[index], x[index + 1] - x[index])
    return float(x[index] + offset), float(np.polyval((a, b, c), offset))


def _maxima(x: np.ndarray, y: np.ndarray, prominence: float):
    indices, _ = find_peaks(y, prominence=prominence)
    if indices.size == 0:
        return []
    _, _, left, right = peak_widths(y, indices, rel_height=0.5)
    samples = np.arange(x.size)
    widths = np.interp(right, samples, x) - np.interp(left, samples, x)
    return [(*_refine(x, y, int(i)), float(w)) for i, w in zip(indices, widths)]


def extract_features(
    data: Sequence[SpectrumRow] | xr.Dataset,
    coefficient: str,
    prominence: Optional[float] = None,
) -> FeatureSet:
    """
    Locate peaks and dips of a coefficient.

    Parameters
    ----------
    data : list of SpectrumRow or xr.Dataset
        Sweep output, ordered by detuning
    coefficient : str
        One of ``T, R, Tc, T_tilde, R_tilde, Tc_tilde, I1, I2``
    prominence : float, optional
        Minimum prominence (default: ``config.feature_prominence``)

    Returns
    -------
    FeatureSet
        Empty when the curve is constant within 1e-12

    Raises
    ------
    InsufficientDataError
        With fewer than three samples
    """
    x, y = _series(data, coefficient)
    if x.size < 3:
        raise InsufficientDataError(f"feature extraction needs at least 3 rows, got {x.size}")
    if np.ptp(y) < FLAT_TOLERANCE:
        logger.debug(f"{coefficient} is flat; no features")
        return FeatureSet(coefficient)

    prominence = config.feature_prominence if prominence is None else prominence
    low, high = (-1.0, 1.0) if coefficient in CONTRASTS else (0.0, 1.0)

    peaks = tuple(
        Feature(loc, float(np.clip(val, low, high)), width)
        for loc, val, width in _maxima(x, y, prominence)
    )
    dips = tuple(
        Feature(loc, float(np.clip(-val, low, high)), width)
        for loc, val, width in _maxima(x, -y, prominence)
    )
    logger.debug(f"{coefficient}: {len(peaks)} peak(s), {len(dips)} dip(s)")
    return FeatureSet(coefficient, peaks, dips)
