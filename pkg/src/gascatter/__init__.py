"""
gascatter - Driven Giant-Atom Scattering Engine

Single-photon scattering of a driven three-level giant atom coupled to a
waveguide at two points, in the Markovian and the retarded (exact) regime.

This package provides:
- Closed-form transmission, reflection and frequency-conversion amplitudes
- A real-space linear-system oracle for cross-checking them
- Detuning sweeps, nonreciprocity contrasts and bound-state lock detection
- A conversion optimizer over the phase parameters
- The ``gascatter`` command-line tool writing CSV datasets

Quick Start
-----------
>>> import math
>>> from gascatter import PhenomConfig, Regime, GridSpec, phenom_to_rateset, sweep
>>>
>>> frame, rp = phenom_to_rateset(PhenomConfig(phi_J=math.pi, phi_plus=math.pi / 3))
>>> rows = sweep(rp, frame, Regime.MARKOV, GridSpec(-10, 10, 201))
>>> min(row.T for row in rows) > 1 - 1e-12
True

Or from the shell:

    $ gascatter spectrum --figure fig1g -o fig1g.csv
"""

__version__ = "0.1.0"

# Configuration and errors
from gascatter.config import config, GascatterConfig
from gascatter.errors import (
    GascatterError,
    ConfigError,
    GridError,
    EmptySearchBoxError,
    ChannelClosedError,
    UnsupportedIncidenceError,
    InsufficientDataError,
    ToleranceBreachError,
)

# Model and scattering
from gascatter.core.model import (
    PhysicalConfig,
    PhenomConfig,
    DressedFrame,
    RatePhaseSet,
    build_dressed_frame,
    build_rate_phase_set,
    phenom_to_rateset,
)
from gascatter.core.scattering import (
    Regime,
    Direction,
    Channel,
    Incidence,
    AmplitudeSet,
    evaluate_amplitudes,
    amplitudes_exact,
    amplitudes_markov,
    s_matrix_reduced,
    excitation_amplitude,
)
from gascatter.core.oracle import solve_real_space, compare, run_equivalence_campaign

# Analysis
from gascatter.analysis.spectrum import GridSpec, SpectrumRow, sweep, contrast_sweep
from gascatter.analysis.bic import locate_bics
from gascatter.analysis.features import extract_features
from gascatter.analysis.optimize import optimize_conversion

__all__ = [
    # Version
    '__version__',
    # Config
    'config',
    'GascatterConfig',
    # Errors
    'GascatterError',
    'ConfigError',
    'GridError',
    'EmptySearchBoxError',
    'ChannelClosedError',
    'UnsupportedIncidenceError',
    'InsufficientDataError',
    'ToleranceBreachError',
    # Model
    'PhysicalConfig',
    'PhenomConfig',
    'DressedFrame',
    'RatePhaseSet',
    'build_dressed_frame',
    'build_rate_phase_set',
    'phenom_to_rateset',
    # Scattering
    'Regime',
    'Direction',
    'Channel',
    'Incidence',
    'AmplitudeSet',
    'evaluate_amplitudes',
    'amplitudes_exact',
    'amplitudes_markov',
    's_matrix_reduced',
    'excitation_amplitude',
    # Oracle
    'solve_real_space',
    'compare',
    'run_equivalence_campaign',
    # Analysis
    'GridSpec',
    'SpectrumRow',
    'sweep',
    'contrast_sweep',
    'locate_bics',
    'extract_features',
    'optimize_conversion',
]
