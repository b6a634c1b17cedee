"""
Run Manifest Utilities

Builds the provenance header embedded in every output: the command, the
resolved configuration, regime, grid, options, tool version and a content
hash of the inputs.
"""

import json
import hashlib
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from gascatter import __version__


def format_number(value: Any) -> str:
    """
    Format a number with 17 significant digits.

    Examples
    --------
    >>> format_number(0.1)
    '0.10000000000000001'
    >>> format_number(2)
    '2'
    """
    return format(float(value), '.17g')


def _canonical(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, float)) or hasattr(value, '__float__'):
        return format_number(value)
    return str(value)


@dataclass(frozen=True)
class RunManifest:
    """
    Provenance of one command invocation.

    Parameters
    ----------
    command : str
        Subcommand name
    mode : str
        Parameterization, ``physical`` or ``phenom``
    regime : str
        ``exact`` or ``markov``
    config : dict
        Resolved parameters after defaulting (radians)
    grid : dict, optional
        ``start``, ``stop`` (Delta/Gamma) and ``points``
    options : dict
        Command-specific options
    figure : str, optional
        Preset the run started from
    version : str
        Tool version
    """

    command: str
    mode: str
    regime: str
    config: Dict[str, Any]
    grid: Optional[Dict[str, Any]] = None
    options: Dict[str, Any] = field(default_factory=dict)
    figure: Optional[str] = None
    version: str = __version__

    @property
    def input_hash(self) -> str:
        """SHA-256 of the canonical JSON form of every input field."""
        payload = {
            'command': self.command,
            'mode': self.mode,
            'regime': self.regime,
            'config': self.config,
            'grid': self.grid,
            'options': self.options,
            'figure': self.figure,
        }
        text = json.dumps(_canonical(payload), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    def entries(self) -> List[tuple]:
        """Ordered ``(key, value)`` pairs with values already formatted."""
        items = [
            ('tool', f"gascatter {self.version}"),
            ('command', self.command),
            ('figure', self.figure or '-'),
            ('mode', self.mode),
            ('regime', self.regime),
        ]
        if self.grid is not None:
            items += [(f"grid.{k}", str(_canonical(v))) for k, v in self.grid.items()]
        items += [(f"config.{k}", str(_canonical(v))) for k, v in self.config.items()]
        items += [(f"option.{k}", str(_canonical(v))) for k, v in sorted(self.options.items())]
        items.append(('input_sha256', self.input_hash))
        return items

    def header_lines(self) -> List[str]:
        """Comment lines (``# key: value``) for text and CSV outputs."""
        return [f"# {key}: {value}" for key, value in self.entries()]

    def attrs(self) -> Dict[str, str]:
        """Manifest as string attributes for netCDF output."""
        return {key: value for key, value in self.entries()}
