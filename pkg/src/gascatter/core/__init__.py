"""
gascatter Core

System model, closed-form scattering amplitudes, the real-space oracle and
configuration loading.
"""

from gascatter.core.model import (
    PhysicalConfig,
    PhenomConfig,
    DressedFrame,
    RatePhaseSet,
    build_dressed_frame,
    build_rate_phase_set,
    phenom_to_rateset,
    induced_phenom_config,
)
from gascatter.core.scattering import (
    Regime,
    Direction,
    Channel,
    Incidence,
    AmplitudeSet,
    ExcitationAmplitude,
    probabilities,
    amplitudes_exact,
    amplitudes_markov,
    s_matrix_reduced,
    amplitudes_from_s_matrix,
    evaluate_amplitudes,
    excitation_amplitude,
)
from gascatter.core.oracle import (
    OracleSolution,
    ComparisonReport,
    CampaignReport,
    solve_real_space,
    compare,
    run_equivalence_campaign,
)
from gascatter.core.loader import (
    ConfigLayer,
    RunSettings,
    PRESETS,
    parse_config_text,
    load_config_file,
    load_preset,
    list_presets,
    build_settings,
)

__all__ = [
    # Model
    'PhysicalConfig',
    'PhenomConfig',
    'DressedFrame',
    'RatePhaseSet',
    'build_dressed_frame',
    'build_rate_phase_set',
    'phenom_to_rateset',
    'induced_phenom_config',
    # Scattering
    'Regime',
    'Direction',
    'Channel',
    'Incidence',
    'AmplitudeSet',
    'ExcitationAmplitude',
    'probabilities',
    'amplitudes_exact',
    'amplitudes_markov',
    's_matrix_reduced',
    'amplitudes_from_s_matrix',
    'evaluate_amplitudes',
    'excitation_amplitude',
    # Oracle
    'OracleSolution',
    'ComparisonReport',
    'CampaignReport',
    'solve_real_space',
    'compare',
    'run_equivalence_campaign',
    # Loader
    'ConfigLayer',
    'RunSettings',
    'PRESETS',
    'parse_config_text',
    'load_config_file',
    'load_preset',
    'list_presets',
    'build_settings',
]
