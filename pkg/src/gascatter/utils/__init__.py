"""
gascatter Utilities

Parallel evaluation helpers, run manifests and output writers.
"""

from gascatter.utils.parallel import (
    EvaluationMetrics,
    chunked_map,
    pool_map,
    get_evaluation_metrics,
)
from gascatter.utils.manifest import RunManifest, format_number
from gascatter.utils.output import (
    open_output,
    write_csv,
    write_report,
    write_netcdf,
)

__all__ = [
    # Parallel
    'EvaluationMetrics',
    'chunked_map',
    'pool_map',
    'get_evaluation_metrics',
    # Manifest
    'RunManifest',
    'format_number',
    # Output
    'open_output',
    'write_csv',
    'write_report',
    'write_netcdf',
]
