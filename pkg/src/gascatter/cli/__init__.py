"""
gascatter Command-Line Interface

Argument parser factories for the ``gascatter`` command.
"""

from gascatter.cli.parser import (
    COMMANDS,
    create_parser,
    create_grid_options,
    create_output_options,
    create_system_options,
    parse_arguments,
    free_range,
    locked_value,
    parameter_name,
    scan_spec,
    tie_spec,
)

__all__ = [
    # Parser
    'COMMANDS',
    'create_parser',
    'create_grid_options',
    'create_output_options',
    'create_system_options',
    'parse_arguments',
    # Argument types
    'free_range',
    'locked_value',
    'parameter_name',
    'scan_spec',
    'tie_spec',
]
