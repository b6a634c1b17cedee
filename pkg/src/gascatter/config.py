"""
gascatter Configuration Module

This module contains all global configuration, constants, and default settings
for the gascatter engine: grid defaults, numerical tolerances, analysis
thresholds and the worker-thread budget.
"""

import os
import logging
from pathlib import Path
from dataclasses import dataclass, fields
from typing import Optional

logger = logging.getLogger(__name__)


# =============================================================================
# Environment
# =============================================================================

# Caps the number of worker threads used by sweeps, seeding and refinement
THREADS_ENV_VAR = "GASCATTER_THREADS"


# =============================================================================
# Detuning Grid Defaults
# =============================================================================

DEFAULT_GRID_POINTS = 2001

# Markovian window is [-10, 10] in units of Gamma
MARKOV_HALF_WINDOW = 10.0

# Exact window is [-N pi/tau, N pi/tau]
EXACT_WINDOW_PERIODS = 4

# Points per chunk when a sweep is split across workers
SWEEP_CHUNK_SIZE = 4096


# =============================================================================
# Numerical Tolerances
# =============================================================================

# |D| below POLE_TOLERANCE * scale marks a sample as singular
POLE_TOLERANCE = 1e-13

# Singular samples are evaluated at delta + POLE_NUDGE * scale
POLE_NUDGE = 1e-7

# Rotating-wave validity: warn when omega_e < RWA_RATIO * Gamma
RWA_RATIO = 20.0


# =============================================================================
# Analysis Settings
# =============================================================================

FEATURE_PROMINENCE = 1e-6
FLAT_TOLERANCE = 1e-12
BIC_ANGLE_TOLERANCE = 1e-9

OPTIMIZER_RESOLUTION = 64
OPTIMIZER_XATOL = 1e-10
OPTIMIZER_TIE_TOLERANCE = 1e-9
OPTIMIZER_REFINE_SEEDS = 8
OPTIMIZER_MAX_SEED_POINTS = 2 ** 22
OPTIMIZER_SEED_CHUNK_SIZE = 65536

# Bandwidth scan: Delta in [-10, 10] Gamma with step 1e-3 Gamma
BANDWIDTH_HALF_WINDOW = 10.0
BANDWIDTH_STEP = 1e-3
ROBUSTNESS_FRACTION = 0.9


# =============================================================================
# Oracle Settings
# =============================================================================

ORACLE_TOLERANCE = 1e-9

# Pass threshold of Markovian closed forms against the exact oracle
MARKOV_VERIFY_TOLERANCE = 1e-4
ORACLE_CONDITION_LIMIT = 1e10
VERIFY_POINTS = 10_000
VERIFY_SEED = 7


# =============================================================================
# Configuration Dataclass
# =============================================================================

@dataclass
class GascatterConfig:
    """
    gascatter runtime settings with sensible defaults.

    Values can be overridden from a ``[gascatter]`` table in a TOML file;
    physics parameters live in separate input files (see
    :mod:`gascatter.core.loader`).
    """

    threads: Optional[int] = None
    grid_points: int = DEFAULT_GRID_POINTS
    sweep_chunk_size: int = SWEEP_CHUNK_SIZE
    feature_prominence: float = FEATURE_PROMINENCE
    bic_tolerance: float = BIC_ANGLE_TOLERANCE
    optimizer_resolution: int = OPTIMIZER_RESOLUTION
    oracle_tolerance: float = ORACLE_TOLERANCE
    condition_limit: float = ORACLE_CONDITION_LIMIT

    @classmethod
    def load_from_file(cls, config_path: Path | None = None) -> 'GascatterConfig':
        """
        Load configuration from TOML file if exists, otherwise use defaults.

        Parameters
        ----------
        config_path : Path, optional
            Path to configuration file. If None, searches for gascatter.toml
            in current directory or ~/.gascatter/config.toml

        Returns
        -------
        GascatterConfig
            Configuration instance
        """
        # Search paths: specified path -> ./gascatter.toml -> ~/.gascatter/config.toml
        search_paths = [
            config_path,
            Path.cwd() / 'gascatter.toml',
            Path.home() / '.gascatter' / 'config.toml'
        ]

        known = {f.name for f in fields(cls)}

        for path in search_paths:
            if path and path.exists():
                try:
                    import tomllib
                    with open(path, 'rb') as f:
                        data = tomllib.load(f)
                    table = data.get('gascatter', {})

                    unknown = sorted(set(table) - known)
                    if unknown:
                        logger.warning(f"Ignoring unknown settings in {path}: {unknown}")

                    return cls(**{k: v for k, v in table.items() if k in known})
                except Exception as e:
                    logger.warning(f"Failed to load config from {path}: {e}")
                    # Fall through to use defaults

        # No config file found or loading failed, use defaults
        return cls()

    def update_from(self, other: 'GascatterConfig') -> None:
        """Copy every setting of ``other`` into this instance."""
        for f in fields(self):
            setattr(self, f.name, getattr(other, f.name))


# =============================================================================
# Worker Threads
# =============================================================================

def resolve_threads(requested: Optional[int] = None) -> int:
    """
    Resolve the number of worker threads.

    ``GASCATTER_THREADS`` caps every other source: an explicit request,
    then ``config.threads``, then the CPU count.

    Parameters
    ----------
    requested : int, optional
        Thread count asked for by the caller

    Returns
    -------
    int
        Thread count, at least 1
    """
    threads = requested or config.threads or os.cpu_count() or 1

    raw = os.environ.get(THREADS_ENV_VAR)
    if raw:
        try:
            cap = int(raw)
            if cap < 1:
                raise ValueError(raw)
            threads = min(threads, cap)
        except ValueError:
            logger.warning(f"Ignoring invalid {THREADS_ENV_VAR}={raw!r}")

    return max(1, int(threads))


# =============================================================================
# Global Config Instance
# =============================================================================

# Default configuration instance (can be overridden by loading from file)
config = GascatterConfig()
