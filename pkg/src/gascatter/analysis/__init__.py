"""
gascatter Analysis

Detuning sweeps, contrasts, bound-state locks, feature extraction and the
conversion optimizer.
"""

from gascatter.analysis.spectrum import (
    GridSpec,
    SpectrumRow,
    default_grid,
    spectrum_dataset,
    sweep,
    contrast_sweep,
    contrast_scan,
)
from gascatter.analysis.bic import BicReport, locate_bics, suppression_detunings
from gascatter.analysis.features import Feature, FeatureSet, extract_features
from gascatter.analysis.optimize import (
    OptimizationCandidate,
    OptimizationResult,
    optimize_conversion,
)

__all__ = [
    # Spectra
    'GridSpec',
    'SpectrumRow',
    'default_grid',
    'spectrum_dataset',
    'sweep',
    'contrast_sweep',
    'contrast_scan',
    # Bound states
    'BicReport',
    'locate_bics',
    'suppression_detunings',
    # Features
    'Feature',
    'FeatureSet',
    'extract_features',
    # Optimizer
    'OptimizationCandidate',
    'OptimizationResult',
    'optimize_conversion',
]
