"""
Command-Line Parser Module

Factory functions for the argparse parser of the ``gascatter`` command and
the argument types of its constrained options.

Angles on the command line are in units of pi; detunings are in units of
Gamma.
"""

import re
import argparse
import logging
from typing import List, Optional, Tuple

from gascatter import __version__
from gascatter.config import VERIFY_POINTS, VERIFY_SEED
from gascatter.analysis.optimize import OBJECTIVES, PARAMETERS

logger = logging.getLogger(__name__)

COMMANDS = ('spectrum', 'contrast', 'bic', 'optimize', 'verify')

# SOURCE, then an optional signed offset; names may themselves contain dashes
_TIE_RHS = re.compile(
    r"\s*([A-Za-z][\w-]*?)\s*(?:([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?\s*"
)


# =============================================================================
# Argument Types
# =============================================================================

def parameter_name(text: str) -> str:
    """
    Normalize a parameter name: ``phi-plus`` and ``phi_plus`` are the same.

    Examples
    --------
    >>> parameter_name('phi-J')
    'phi_J'
    """
    name = text.strip().replace('-', '_')
    if name not in PARAMETERS:
        choices = ', '.join(p.replace('_', '-') for p in PARAMETERS)
        raise argparse.ArgumentTypeError(f"unknown parameter {text!r} (choose from {choices})")
    return name


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def free_range(text: str) -> Tuple[str, float, float]:
    """Parse ``NAME=LO:HI``."""
    name, sep, bounds = text.partition('=')
    low, colon, high = bounds.partition(':')
    if not sep or not colon:
        raise argparse.ArgumentTypeError(f"expected NAME=LO:HI, got {text!r}")
    return parameter_name(name), _number(low), _number(high)


def locked_value(text: str) -> Tuple[str, float]:
    """Parse ``NAME=VALUE``."""
    name, sep, value = text.partition('=')
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    return parameter_name(name), _number(value)


def tie_spec(text: str) -> Tuple[str, str, float]:
    """Parse ``NAME=SOURCE+OFFSET`` or ``NAME=SOURCE-OFFSET`` (offset optional)."""
    name, sep, rhs = text.partition('=')
    match = _TIE_RHS.fullmatch(rhs) if sep else None
    if match is None:
        raise argparse.ArgumentTypeError(f"expected NAME=SOURCE+OFFSET, got {text!r}")
    source, sign, number = match.groups()
    offset = 0.0 if sign is None else _number(sign + number)
    return parameter_name(name), parameter_name(source), offset


def scan_spec(text: str) -> Tuple[str, List[str]]:
    """Parse ``NAME=A,B,C``; the values stay strings for column labels."""
    name, sep, values = text.partition('=')
    items = [v.strip() for v in values.split(',') if v.strip()]
    if not sep or not items:
        raise argparse.ArgumentTypeError(f"expected NAME=A,B,..., got {text!r}")
    for item in items:
        _number(item)
    key = name.strip().replace('-', '_')
    if key not in ('phi_plus', 'phi_minus', 'phi_J', 'theta', 'tau_gamma'):
        raise argparse.ArgumentTypeError(f"cannot scan {name!r}")
    return key, items


# =============================================================================
# Option Groups
# =============================================================================

def create_logging_options() -> argparse.ArgumentParser:
    """Verbosity flags accepted before or after the subcommand."""
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('logging')
    group.add_argument('-v', '--verbose', action='store_true', default=argparse.SUPPRESS,
                       help='log debug messages')
    group.add_argument('-q', '--quiet', action='store_true', default=argparse.SUPPRESS,
                       help='log warnings and errors only')
    return parent


def create_system_options() -> argparse.ArgumentParser:
    """Options describing the atom-waveguide system."""
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('system (angles in units of pi)')
    group.add_argument('--config', metavar='PATH', help='physics configuration file')
    group.add_argument('--figure', metavar='NAME', help='start from a bundled figure preset')
    group.add_argument('--list-figures', action='store_true', default=argparse.SUPPRESS,
                       help='list figure presets and exit')
    group.add_argument('--mode', choices=('physical', 'phenom'), help='parameterization')
    group.add_argument('--regime', choices=('exact', 'markov'), help='evaluation regime')
    group.add_argument('--gamma', type=float, metavar='G', help='total decay rate Gamma')
    group.add_argument('--theta', type=float, metavar='A', help='mixing angle')
    group.add_argument('--phi-plus', type=float, metavar='A', help='upper-channel phase')
    group.add_argument('--phi-minus', type=float, metavar='A', help='lower-channel phase')
    group.add_argument('--phi-J', type=float, metavar='A', help='coupling phase difference')
    group.add_argument('--tau-gamma', type=float, metavar='X', help='dimensionless delay tau*Gamma')
    group.add_argument('--coupling-ratio', type=float, metavar='X', help='|J2| / |J1|')
    return parent


def create_grid_options() -> argparse.ArgumentParser:
    """Detuning grid options (units of Gamma)."""
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('detuning grid (units of Gamma)')
    group.add_argument('--delta-min', type=float, metavar='X', help='first grid point')
    group.add_argument('--delta-max', type=float, metavar='X', help='last grid point')
    group.add_argument('--points', type=int, metavar='N', help='number of grid points')
    return parent


def create_output_options(netcdf: bool = False) -> argparse.ArgumentParser:
    """Output destination options."""
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('output')
    group.add_argument('-o', '--output', default='-', metavar='PATH',
                       help="output file, '-' for stdout (default)")
    if netcdf:
        group.add_argument('--netcdf', metavar='PATH', help='also write the spectrum as netCDF')
    return parent


# =============================================================================
# Parser
# =============================================================================

def create_parser() -> argparse.ArgumentParser:
    """
    Create the ``gascatter`` argument parser.

    Returns
    -------
    argparse.ArgumentParser
        Parser with the subcommands ``spectrum``, ``contrast``, ``bic``,
        ``optimize`` and ``verify``

    Examples
    --------
    >>> args = create_parser().parse_args(['spectrum', '--figure', 'fig1g'])
    >>> args.command, args.figure
    ('spectrum', 'fig1g')
    """
    parser = argparse.ArgumentParser(
        prog='gascatter',
        description='Single-photon scattering of a driven two-leg giant atom in a waveguide.',
    )
    parser.add_argument('--version', action='version', version=f"gascatter {__version__}")
    parser.add_argument('-v', '--verbose', action='store_true', help='log debug messages')
    parser.add_argument('-q', '--quiet', action='store_true', help='log warnings and errors only')
    parser.add_argument('--list-figures', action='store_true', help='list figure presets and exit')

    logging_options = create_logging_options()
    system = create_system_options()
    grid = create_grid_options()

    commands = parser.add_subparsers(dest='command', metavar='COMMAND')

    commands.add_parser(
        'spectrum',
        parents=[logging_options, system, grid, create_output_options(netcdf=True)],
        help='transport spectra for both incidence directions',
    )

    contrast = commands.add_parser(
        'contrast',
        parents=[logging_options, system, grid, create_output_options(netcdf=True)],
        help='nonreciprocity contrasts I1 and I2',
    )
    contrast.add_argument('--scan', type=scan_spec, metavar='NAME=A,B,...',
                          help='one I2 column per value of an angle (units of pi) or tau-gamma')

    commands.add_parser(
        'bic',
        parents=[logging_options, system, create_output_options()],
        help='report satisfied bound-state locks',
    )

    optimize = commands.add_parser(
        'optimize',
        parents=[logging_options, system, create_output_options()],
        help='maximize conversion over a parameter box',
    )
    group = optimize.add_argument_group('search')
    group.add_argument('--objective', choices=OBJECTIVES, default='Tc', help='quantity to maximize')
    group.add_argument('--free', type=free_range, action='append', default=[], metavar='NAME=LO:HI',
                       help='search range (angles in units of pi, delta in Gamma)')
    group.add_argument('--lock', type=locked_value, action='append', default=[], metavar='NAME=VALUE',
                       help='pin a parameter')
    group.add_argument('--tie', type=tie_spec, action='append', default=[], metavar='NAME=SOURCE+OFFSET',
                       help='tie a parameter to another one')
    group.add_argument('--resolution', type=int, metavar='N', help='seed points per free axis')

    verify = commands.add_parser(
        'verify',
        parents=[logging_options, create_output_options()],
        help='compare closed forms with the real-space solver',
    )
    group = verify.add_argument_group('campaign')
    group.add_argument('--points', type=int, default=VERIFY_POINTS, metavar='N', help='random points')
    group.add_argument('--seed', type=int, default=VERIFY_SEED, metavar='N', help='generator seed')
    group.add_argument('--regime', choices=('exact', 'markov'), default='exact', help='closed-form regime')
    group.add_argument('--tau-gamma', type=float, metavar='X', help='fix tau*Gamma for every point')
    group.add_argument('--tolerance', type=float, metavar='X', help='pass threshold')

    return parser


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse ``argv``; argparse exits with status 2 on usage errors."""
    return create_parser().parse_args(argv)
