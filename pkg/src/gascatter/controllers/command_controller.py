"""
gascatter Command Controller

This module provides the CommandController class that turns parsed
command-line arguments into library calls and writes their outputs.

The controller keeps the layers apart:
- Parsing (argument factories) - in gascatter.cli
- Physics and analysis - in gascatter.core and gascatter.analysis
- Controller (this module) - resolves settings, dispatches, writes outputs
"""

import sys
import math
import time
import logging
import argparse
from typing import Any, Callable, Dict, List, Optional, Tuple

from gascatter.config import MARKOV_VERIFY_TOLERANCE, config
from gascatter.errors import ConfigError, ToleranceBreachError
from gascatter.core.loader import ConfigLayer, RunSettings, build_settings, list_presets
from gascatter.core.model import RatePhaseSet
from gascatter.core.oracle import run_equivalence_campaign
from gascatter.core.scattering import Channel, Regime
from gascatter.analysis.bic import locate_bics, suppression_detunings
from gascatter.analysis.optimize import PARAMETERS, optimize_conversion
from gascatter.analysis.spectrum import (
    SPECTRUM_COLUMNS,
    GridSpec,
    contrast_scan,
    default_grid,
    spectrum_dataset,
)
from gascatter.utils.manifest import RunManifest
from gascatter.utils.output import open_output, write_csv, write_netcdf, write_report

logger = logging.getLogger(__name__)

# Parameters given in units of pi on the command line
ANGLE_PARAMETERS = frozenset({'phi_plus', 'phi_minus', 'phi_J', 'theta'})

# Command-line flag -> phenomenological config key
_PHENOM_FLAGS = {
    'gamma': 'Gamma',
    'theta': 'theta',
    'phi_plus': 'phi_plus',
    'phi_minus': 'phi_minus',
    'phi_J': 'phi_J',
    'tau_gamma': 'tau_Gamma',
    'coupling_ratio': 'coupling_ratio',
}

# Scannable contrast parameter -> PhenomConfig field
_SCAN_FIELDS = {
    'phi_plus': 'phi_plus',
    'phi_minus': 'phi_minus',
    'phi_J': 'phi_J',
    'theta': 'theta',
    'tau_gamma': 'tau_Gamma',
}

CONTRAST_COLUMNS = ('Tc', 'Tc_b', 'I1', 'I2')

OPTIMIZE_COLUMNS = (
    'value', 'phi_plus', 'phi_minus', 'phi_J', 'delta_over_gamma', 'tau_gamma', 'theta', 'Tc', 'I2',
)

# Default optimizer box when no --free is given
_DEFAULT_FREE = {
    'phi_plus': (0.0, 2 * math.pi),
    'phi_minus': (0.0, 2 * math.pi),
    'phi_J': (0.0, 2 * math.pi),
    'delta': (-5.0, 5.0),
}


def _in_radians(name: str, value: float) -> float:
    return value * math.pi if name in ANGLE_PARAMETERS else value


def _in_pi(name: str, value: float) -> float:
    return value / math.pi if name in ANGLE_PARAMETERS else value


class CommandController:
    """
    Dispatches one parsed ``gascatter`` invocation.

    Parameters
    ----------
    args : argparse.Namespace
        Result of :func:`gascatter.cli.create_parser` parsing

    Attributes
    ----------
    handlers : dict
        Subcommand name -> handler method
    """

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.handlers: Dict[str, Callable[[], None]] = {
            'spectrum': self.cmd_spectrum,
            'contrast': self.cmd_contrast,
            'bic': self.cmd_bic,
            'optimize': self.cmd_optimize,
            'verify': self.cmd_verify,
        }

    # =========================================================================
    # Entry Point
    # =========================================================================

    def run(self) -> int:
        """
        Run the selected subcommand.

        Returns
        -------
        int
            0 on success; library errors propagate to the caller
        """
        if getattr(self.args, 'list_figures', False):
            for line in list_presets():
                print(line)
            return 0

        command = self.args.command
        if command not in self.handlers:
            raise ConfigError(f"unknown command {command!r}")

        start = time.perf_counter()
        logger.info(f"Running {command}")
        self.handlers[command]()
        logger.info(f"{command} finished in {time.perf_counter() - start:.2f}s")
        return 0

    # =========================================================================
    # Settings
    # =========================================================================

    def overrides(self) -> ConfigLayer:
        """Collect the system and grid flags into a ConfigLayer (radians)."""
        common: Dict[str, Any] = {}
        for name in ('mode', 'regime', 'delta_min', 'delta_max', 'points'):
            value = getattr(self.args, name, None)
            if value is not None:
                common[name] = value

        phenom: Dict[str, float] = {}
        for flag, key in _PHENOM_FLAGS.items():
            value = getattr(self.args, flag, None)
            if value is not None:
                phenom[key] = _in_radians(flag, value)

        return ConfigLayer.from_dicts({'common': common, 'phenom': phenom}, source='<flags>')

    def settings(self) -> RunSettings:
        """Merge preset, config file and flags."""
        return build_settings(
            figure=getattr(self.args, 'figure', None),
            config_path=getattr(self.args, 'config', None),
            overrides=self.overrides(),
        )

    @staticmethod
    def grid(settings: RunSettings, rp: RatePhaseSet) -> GridSpec:
        """Default window of the regime with explicit bounds and size applied."""
        window = default_grid(rp, settings.regime)
        start = window.start if settings.delta_min is None else settings.delta_min
        stop = window.stop if settings.delta_max is None else settings.delta_max
        points = config.grid_points if settings.points is None else settings.points
        return GridSpec(start, stop, points)

    @staticmethod
    def manifest(
        command: str,
        settings: RunSettings,
        grid: Optional[GridSpec] = None,
        options: Optional[Dict[str, Any]] = None,
    ) -> RunManifest:
        return RunManifest(
            command=command,
            mode=settings.mode,
            regime=settings.regime.value,
            config=settings.resolved(),
            grid=grid.as_dict() if grid is not None else None,
            options=options or {},
            figure=settings.figure,
        )

    # =========================================================================
    # Subcommands
    # =========================================================================

    def cmd_spectrum(self) -> None:
        """Forward and backward spectra with both contrasts."""
        settings = self.settings()
        frame, rp = settings.build()
        grid = self.grid(settings, rp)
        ds = spectrum_dataset(rp, frame, settings.regime, grid, config.threads)
        manifest = self.manifest('spectrum', settings, grid)

        x = ds['delta_over_gamma'].values
        columns = [ds[name].values for name in SPECTRUM_COLUMNS]
        rows = ([x[i], *(c[i] for c in columns)] for i in range(x.size))

        with open_output(self.args.output) as stream:
            count = write_csv(stream, ('delta_over_gamma', *SPECTRUM_COLUMNS), rows, manifest)
        if self.args.netcdf:
            write_netcdf(ds, self.args.netcdf, manifest)
        logger.info(f"spectrum: {count} rows")

    def cmd_contrast(self) -> None:
        """Conversion contrast, optionally scanned over one parameter."""
        settings = self.settings()
        frame, rp = settings.build()
        grid = self.grid(settings, rp)

        if self.args.scan is None:
            ds = spectrum_dataset(rp, frame, settings.regime, grid, config.threads)
            manifest = self.manifest('contrast', settings, grid)
            header = ('delta_over_gamma', *CONTRAST_COLUMNS)
            x = ds['delta_over_gamma'].values
            columns = [ds[name].values for name in CONTRAST_COLUMNS]
        else:
            name, labels = self.args.scan
            values = [_in_radians(name, float(label)) for label in labels]
            scan = contrast_scan(settings.as_phenom(), _SCAN_FIELDS[name], values,
                                 settings.regime, grid, config.threads)
            ds = scan.to_dataset()
            manifest = self.manifest('contrast', settings, grid,
                                     {'scan': name, 'scan_values': labels})
            header = ('delta_over_gamma', *(f"I2@{name}={label}" for label in labels))
            x = scan['delta_over_gamma'].values
            columns = list(scan.values)

        rows = ([x[i], *(c[i] for c in columns)] for i in range(x.size))
        with open_output(self.args.output) as stream:
            count = write_csv(stream, header, rows, manifest)
        if self.args.netcdf:
            write_netcdf(ds, self.args.netcdf, manifest)
        logger.info(f"contrast: {count} rows")

    def cmd_bic(self) -> None:
        """Satisfied bound-state locks and retardation-induced suppression points."""
        settings = self.settings()
        _, rp = settings.build()
        reports = locate_bics(rp)

        lines: List[str] = []
        for report in reports:
            lines.append(report.describe())
            lines.append(f"  lock: {report.condition}")
            if report.reflection_delta is not None:
                lines.append(f"  total reflection at Delta/Gamma = {report.reflection_delta / rp.scale:.12g}")
        if not reports:
            lines.append("no BIC lock satisfied")

        if settings.regime is Regime.EXACT and float(rp.tau) > 0:
            window = default_grid(rp, settings.regime)
            bounds = (window.start * rp.scale, window.stop * rp.scale)
            for channel in (Channel.PLUS, Channel.MINUS):
                detunings = suppression_detunings(rp, channel, bounds) / rp.scale
                if detunings.size:
                    points = ', '.join(f"{value:.12g}" for value in detunings)
                    lines.append(f"{channel.value}-channel emission suppressed at Delta/Gamma = {points}")

        with open_output(self.args.output) as stream:
            write_report(stream, lines, self.manifest('bic', settings))

    def _search_box(self) -> Tuple[Dict, Dict, Dict]:
        fixed = {name: _in_radians(name, value) for name, value in self.args.lock}
        tied = {name: (source, _in_radians(name, offset)) for name, source, offset in self.args.tie}
        if self.args.free:
            free = {name: (_in_radians(name, lo), _in_radians(name, hi)) for name, lo, hi in self.args.free}
        else:
            free = {name: box for name, box in _DEFAULT_FREE.items() if name not in fixed and name not in tied}
        return free, fixed, tied

    def cmd_optimize(self) -> None:
        """Maximize conversion; report to stderr, tied optima as CSV."""
        settings = self.settings()
        free, fixed, tied = self._search_box()

        result = optimize_conversion(
            self.args.objective,
            free,
            base=settings.as_phenom(),
            regime=settings.regime,
            fixed=fixed,
            tied=tied,
            resolution=self.args.resolution,
            threads=config.threads,
        )

        options = {
            'objective': self.args.objective,
            'free': {name: [_in_pi(name, lo), _in_pi(name, hi)] for name, (lo, hi) in free.items()},
            'lock': {name: _in_pi(name, value) for name, value in fixed.items()},
            'tie': {name: f"{source}{_in_pi(name, offset):+.17g}" for name, (source, offset) in tied.items()},
            'resolution': self.args.resolution or config.optimizer_resolution,
        }
        manifest = self.manifest('optimize', settings, options=options)
        write_report(sys.stderr, result.lines(), manifest)

        rows = (
            [tie.value, *(_in_pi(name, tie.parameters[name]) for name in PARAMETERS), tie.Tc, tie.I2]
            for tie in result.ties
        )
        with open_output(self.args.output) as stream:
            write_csv(stream, OPTIMIZE_COLUMNS, rows, manifest)

    def cmd_verify(self) -> None:
        """Randomized closed-form versus oracle campaign."""
        args = self.args
        if args.points < 1:
            raise ConfigError(f"--points must be positive, got {args.points}")
        if args.tau_gamma is not None and not (math.isfinite(args.tau_gamma) and args.tau_gamma >= 0):
            raise ConfigError(f"--tau-gamma must be nonnegative, got {args.tau_gamma}")

        regime = Regime(args.regime)
        tolerance = args.tolerance
        if tolerance is None:
            tolerance = MARKOV_VERIFY_TOLERANCE if regime is Regime.MARKOV else config.oracle_tolerance

        report = run_equivalence_campaign(
            points=args.points,
            seed=args.seed,
            regime=regime,
            tau_gamma=args.tau_gamma,
            tolerance=tolerance,
            condition_limit=config.condition_limit,
        )
        manifest = RunManifest(command='verify', mode='phenom', regime=regime.value, config={}, options={
            'points': args.points,
            'seed': args.seed,
            'tau_gamma': args.tau_gamma,
            'tolerance': tolerance,
        })
        with open_output(args.output) as stream:
            write_report(stream, report.lines(), manifest)

        if not report.passed:
            raise ToleranceBreachError(
                f"max error {report.max_error:.3e} exceeds tolerance {tolerance:.3e}"
            )
