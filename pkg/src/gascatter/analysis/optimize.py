"""
Conversion Optimizer

Searches the phenomenological parameter space for maximal frequency
conversion: a coarse grid seed evaluated in parallel chunks, followed by
concurrent Nelder-Mead refinement of the best distinct seeds.

Searchable parameters are ``phi_plus``, ``phi_minus``, ``phi_J`` (periodic),
``delta`` (Delta / Gamma), ``tau_gamma`` and ``theta``. Each one is free
(searched in a box), fixed, tied to another (``p = q + offset``) or taken
from the base configuration.
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from gascatter.config import (
    BANDWIDTH_HALF_WINDOW,
    BANDWIDTH_STEP,
    OPTIMIZER_MAX_SEED_POINTS,
    OPTIMIZER_REFINE_SEEDS,
    OPTIMIZER_SEED_CHUNK_SIZE,
    OPTIMIZER_TIE_TOLERANCE,
    OPTIMIZER_XATOL,
    ROBUSTNESS_FRACTION,
    config,
)
from gascatter.errors import ConfigError, EmptySearchBoxError
from gascatter.core.model import PhenomConfig, phenom_to_rateset
from gascatter.core.scattering import (
    Channel,
    Direction,
    Incidence,
    Regime,
    evaluate_amplitudes,
)
from gascatter.utils.parallel import chunked_map, pool_map

logger = logging.getLogger(__name__)

PARAMETERS = ('phi_plus', 'phi_minus', 'phi_J', 'delta', 'tau_gamma', 'theta')
PERIODIC = frozenset({'phi_plus', 'phi_minus', 'phi_J'})
OBJECTIVES = ('Tc', 'I2', 'absI2')

TWO_PI = 2 * math.pi

# Candidates closer than this (wraparound for angles) are the same point
_DUPLICATE_DISTANCE = 1e-6


# =============================================================================
# Results
# =============================================================================

@dataclass(frozen=True)
class OptimizationCandidate:
    """A refined local optimum with its companion observables."""

    value: float
    parameters: Dict[str, float]
    Tc: float
    I2: float


@dataclass(frozen=True)
class OptimizationResult:
    """
    Best point found by :func:`optimize_conversion`.

    Attributes
    ----------
    objective : str
        ``Tc``, ``I2`` or ``absI2``
    regime : Regime
        Evaluation regime
    value : float
        Objective at the argmax
    parameters : dict
        All six parameters at the argmax (angles wrapped to [0, 2pi))
    Tc, I2 : float
        Forward conversion and conversion contrast at the argmax
    bandwidth : float
        Width in Delta/Gamma of the contiguous region around the argmax
        where the objective stays >= 0.9 of its maximum (NaN if max <= 0)
    ties : tuple of OptimizationCandidate
        Every distinct candidate within 1e-9 of the best, ordered by
        ``|delta|`` then ``phi_plus``; the first one is the argmax
    seed_points : int
        Size of the seed grid
    refined : int
        Number of refined seeds
    """

    objective: str
    regime: Regime
    value: float
    parameters: Dict[str, float]
    Tc: float
    I2: float
    bandwidth: float
    ties: Tuple[OptimizationCandidate, ...]
    seed_points: int
    refined: int

    def lines(self) -> List[str]:
        """Human-readable report; angles in units of pi."""
        def show(name: str, value: float) -> str:
            if name in PERIODIC or name == 'theta':
                return f"{name} = {value / math.pi:.10f} pi"
            return f"{name} = {value:.10f}"

        out = [
            f"objective: {self.objective} ({self.regime.value} regime)",
            f"best value: {self.value:.12f}",
            "argmax: " + ", ".join(show(n, self.parameters[n]) for n in PARAMETERS),
            f"Tc: {self.Tc:.12f}",
            f"I2: {self.I2:.12f}",
            f"bandwidth (objective >= {ROBUSTNESS_FRACTION:g} max): {self.bandwidth:.6f} Gamma",
            f"ties: {len(self.ties)}",
            f"seed points: {self.seed_points}, refined seeds: {self.refined}",
        ]
        return out


# =============================================================================
# Problem Definition
# =============================================================================

def _wrap(name: str, value: float) -> float:
    return value % TWO_PI if name in PERIODIC else value


class _ConversionProblem:
    """Vectorized objective over the free coordinates of a search box."""

    def __init__(
        self,
        objective: str,
        free: Dict[str, Tuple[float, float]],
        base: PhenomConfig,
        regime: Regime,
        fixed: Dict[str, float],
        tied: Dict[str, Tuple[str, float]],
    ):
        self._validate(objective, free, fixed, tied)

        self.objective = objective
        self.base = base
        self.regime = regime
        self.fixed = dict(fixed)
        self.tied = dict(tied)
        self.names = [name for name in PARAMETERS if name in free]
        self.bounds = {name: (float(free[name][0]), float(free[name][1])) for name in self.names}
        self.full_period = {
            name: name in PERIODIC and hi - lo >= TWO_PI - 1e-9
            for name, (lo, hi) in self.bounds.items()
        }
        self.defaults = {
            'phi_plus': base.phi_plus,
            'phi_minus': base.phi_minus,
            'phi_J': base.phi_J,
            'delta': 0.0,
            'tau_gamma': base.tau_Gamma,
            'theta': base.theta,
        }

    @staticmethod
    def _validate(objective, free, fixed, tied) -> None:
        if objective not in OBJECTIVES:
            raise ConfigError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
        if not free:
            raise EmptySearchBoxError("search box has no free parameter")

        for name in (*free, *fixed, *tied):
            if name not in PARAMETERS:
                raise ConfigError(f"unknown parameter {name!r}; choose from {PARAMETERS}")
        overlap = (set(free) & set(fixed)) | (set(free) & set(tied)) | (set(fixed) & set(tied))
        if overlap:
            raise ConfigError(f"parameters constrained twice: {sorted(overlap)}")

        for name, (lo, hi) in free.items():
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
                raise EmptySearchBoxError(f"empty range for {name}: [{lo}, {hi}]")
            if name == 'theta' and (lo < 0 or hi > math.pi):
                raise ConfigError("theta range must lie within [0, pi]")
            if name == 'tau_gamma' and lo < 0:
                raise ConfigError("tau_gamma range must be nonnegative")

        for name, (source, _) in tied.items():
            if source not in PARAMETERS or source in tied or source == name:
                raise ConfigError(f"{name} must be tied to an untied parameter, got {source!r}")

    def complete(self, coords: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
        values = dict(self.defaults)
        values.update(self.fixed)
        values.update(coords)
        for name, (source, offset) in self.tied.items():
            values[name] = np.asarray(values[source]) + offset
        return values

    def evaluate_parameters(self, values: Dict[str, np.ndarray]) -> Tuple[np.ndarray, ...]:
        """Return ``(objective, Tc, I2)`` for complete parameter values."""
        cfg = PhenomConfig(
            Gamma=self.base.Gamma,
            theta=values['theta'],
            phi_plus=values['phi_plus'],
            phi_minus=values['phi_minus'],
            phi_J=values['phi_J'],
            tau_Gamma=values['tau_gamma'],
            coupling_ratio=self.base.coupling_ratio,
        )
        frame, rp = phenom_to_rateset(cfg)
        delta = np.asarray(values['delta'], dtype=float) * self.base.Gamma

        forward = evaluate_amplitudes(rp, frame, Incidence(Direction.FORWARD, Channel.MINUS, delta), self.regime)
        backward = evaluate_amplitudes(rp, frame, Incidence(Direction.BACKWARD, Channel.MINUS, delta), self.regime)
        Tc = np.asarray(forward.Tc)
        I2 = Tc - np.asarray(backward.Tc)

        if self.objective == 'Tc':
            value = Tc
        elif self.objective == 'I2':
            value = I2
        else:
            value = np.abs(I2)
        return value, Tc, I2

    def evaluate(self, coords: Dict[str, np.ndarray]) -> Tuple[np.ndarray, ...]:
        return self.evaluate_parameters(self.complete(coords))

    def axis(self, name: str, resolution: int) -> np.ndarray:
        lo, hi = self.bounds[name]
        if self.full_period[name]:
            return np.linspace(lo, lo + TWO_PI, resolution, endpoint=False)
        return np.linspace(lo, hi, resolution)

    def candidate(self, coords: Dict[str, float]) -> OptimizationCandidate:
        values = self.complete(coords)
        value, Tc, I2 = self.evaluate_parameters(values)
        return OptimizationCandidate(
            value=float(value),
            parameters={name: _wrap(name, float(values[name])) for name in PARAMETERS},
            Tc=float(Tc),
            I2=float(I2),
        )


# =============================================================================
# Seeding
# =============================================================================

def _seed_resolution(requested: int, dimensions: int) -> int:
    resolution = max(2, int(requested))
    if resolution ** dimensions <= OPTIMIZER_MAX_SEED_POINTS:
        return resolution

    reduced = max(2, int(OPTIMIZER_MAX_SEED_POINTS ** (1.0 / dimensions)))
    while (reduced + 1) ** dimensions <= OPTIMIZER_MAX_SEED_POINTS:
        reduced += 1
    while reduced > 2 and reduced ** dimensions > OPTIMIZER_MAX_SEED_POINTS:
        reduced -= 1
    logger.warning(
        f"Seed grid of {resolution}^{dimensions} points exceeds {OPTIMIZER_MAX_SEED_POINTS}; "
        f"using {reduced} points per axis"
    )
    return reduced


def _distinct_seeds(
    values: np.ndarray,
    shape: Tuple[int, ...],
    periodic: List[bool],
    count: int,
) -> List[int]:
    """Best seeds that are not grid neighbours of a better one."""
    order = np.argsort(-values, kind='stable')
    sizes = np.array(shape)
    wraps = np.array(periodic)
    chosen: List[int] = []
    chosen_index: List[np.ndarray] = []

    for flat in order[: max(count * 64, count)]:
        index = np.array(np.unravel_index(int(flat), shape))
        close = False
        for other in chosen_index:
            diff = np.abs(index - other)
            diff = np.where(wraps, np.minimum(diff, sizes - diff), diff)
            if diff.max() <= 1:
                close = True
                break
        if not close:
            chosen.append(int(flat))
            chosen_index.append(index)
            if len(chosen) == count:
                break
    return chosen


# =============================================================================
# Refinement
# =============================================================================

def _refine(problem: _ConversionProblem, x0: np.ndarray, seed_value: float, steps: np.ndarray):
    names = problem.names

    def negative(x: np.ndarray) -> float:
        value = problem.evaluate({name: x[i] for i, name in enumerate(names)})[0]
        value = float(value)
        return -value if math.isfinite(value) else math.inf

    simplex = [x0]
    for i, name in enumerate(names):
        vertex = x0.copy()
        lo, hi = problem.bounds[name]
        step = steps[i]
        if not problem.full_period[name] and vertex[i] + step > hi:
            step = -step
        vertex[i] += step
        simplex.append(vertex)

    bounds = [(None, None) if problem.full_period[n] else problem.bounds[n] for n in names]
    if all(problem.full_period[n] for n in names):
        bounds = None

    dimensions = len(names)
    result = minimize(
        negative,
        x0,
        method='Nelder-Mead',
        bounds=bounds,
        options={
            'xatol': OPTIMIZER_XATOL,
            'fatol': 1e-15,
            'initial_simplex': np.array(simplex),
            'maxiter': 2000 * dimensions,
            'maxfev': 4000 * dimensions,
        },
    )

    # Never report a point worse than its seed
    if -result.fun >= seed_value:
        return result.x, float(-result.fun)
    return x0, seed_value


def _separation(a: Dict[str, float], b: Dict[str, float]) -> float:
    worst = 0.0
    for name in PARAMETERS:
        diff = abs(a[name] - b[name])
        if name in PERIODIC:
            diff = min(diff, TWO_PI - diff)
        worst = max(worst, diff)
    return worst


# =============================================================================
# Bandwidth
# =============================================================================

def _bandwidth(problem: _ConversionProblem, best: OptimizationCandidate) -> float:
    if best.value <= 0:
        return math.nan

    count = int(round(2 * BANDWIDTH_HALF_WINDOW / BANDWIDTH_STEP)) + 1
    center_delta = best.parameters['delta']
    grid = np.union1d(np.linspace(-BANDWIDTH_HALF_WINDOW, BANDWIDTH_HALF_WINDOW, count), [center_delta])

    values = dict(best.parameters)
    values['delta'] = grid
    for name, (source, offset) in problem.tied.items():
        if source == 'delta':
            values[name] = grid + offset
    curve = np.asarray(problem.evaluate_parameters(values)[0], dtype=float)

    threshold = ROBUSTNESS_FRACTION * best.value
    center = int(np.searchsorted(grid, center_delta))

    left = center
    while left > 0 and curve[left - 1] >= threshold:
        left -= 1
    right = center
    while right < grid.size - 1 and curve[right + 1] >= threshold:
        right += 1

    def crossing(inside: int, outside: int) -> float:
        span = curve[inside] - curve[outside]
        fraction = (curve[inside] - threshold) / span if span > 0 else 0.0
        return grid[inside] + fraction * (grid[outside] - grid[inside])

    low = crossing(left, left - 1) if left > 0 else grid[0]
    high = crossing(right, right + 1) if right < grid.size - 1 else grid[-1]
    return float(high - low)


# =============================================================================
# Public Operation
# =============================================================================

def optimize_conversion(
    objective: str,
    free: Dict[str, Tuple[float, float]],
    base: Optional[PhenomConfig] = None,
    regime: Regime = Regime.EXACT,
    fixed: Optional[Dict[str, float]] = None,
    tied: Optional[Dict[str, Tuple[str, float]]] = None,
    resolution: Optional[int] = None,
    refine_seeds: int = OPTIMIZER_REFINE_SEEDS,
    threads: Optional[int] = None,
) -> OptimizationResult:
    """
    Maximize conversion over a box of phenomenological parameters.

    Parameters
    ----------
    objective : {'Tc', 'I2', 'absI2'}
        Forward conversion, conversion contrast or its magnitude
    free : dict
        ``{name: (low, high)}`` search ranges; angles in radians, ``delta``
        in units of Gamma
    base : PhenomConfig, optional
        Supplies Gamma, the coupling ratio and every parameter not free,
        fixed or tied
    regime : Regime
        Evaluation regime
    fixed : dict, optional
        ``{name: value}`` pinned parameters
    tied : dict, optional
        ``{name: (source, offset)}`` meaning ``name = source + offset``
    resolution : int, optional
        Seed points per free axis (default: ``config.optimizer_resolution``)
    refine_seeds : int
        Number of distinct seeds refined with Nelder-Mead
    threads : int, optional
        Worker threads for seeding and refinement

    Returns
    -------
    OptimizationResult

    Raises
    ------
    EmptySearchBoxError
        If no parameter is free or a range is empty
    ConfigError
        For unknown objectives or parameters and conflicting constraints

    Examples
    --------
    >>> result = optimize_conversion(
    ...     'Tc', {'phi_plus': (0, 2 * math.pi), 'delta': (-5, 5)},
    ...     base=PhenomConfig(phi_minus=0.5 * math.pi), regime=Regime.MARKOV,
    ...     fixed={'phi_J': 0.0}, resolution=24)
    >>> round(result.value, 6)
    0.5
    """
    problem = _ConversionProblem(
        objective, free, base or PhenomConfig(), regime, fixed or {}, tied or {},
    )
    names = problem.names
    dimensions = len(names)

    per_axis = _seed_resolution(resolution or config.optimizer_resolution, dimensions)
    axes = [problem.axis(name, per_axis) for name in names]
    shape = (per_axis,) * dimensions
    total = per_axis ** dimensions
    logger.info(f"Seeding {objective} over {names} with {total} grid points ({regime.value})")

    def seed_chunk(chunk: slice) -> np.ndarray:
        index = np.unravel_index(np.arange(chunk.start, chunk.stop), shape)
        coords = {name: axes[i][index[i]] for i, name in enumerate(names)}
        return np.asarray(problem.evaluate(coords)[0], dtype=float)

    seed_values = np.concatenate(
        chunked_map(seed_chunk, total, chunk_size=OPTIMIZER_SEED_CHUNK_SIZE, threads=threads)
    )
    seed_values = np.where(np.isfinite(seed_values), seed_values, -np.inf)

    seeds = _distinct_seeds(
        seed_values, shape, [problem.full_period[n] for n in names], max(1, refine_seeds),
    )
    steps = np.array([axis[1] - axis[0] for axis in axes])

    def refine(flat: int):
        index = np.unravel_index(flat, shape)
        x0 = np.array([axes[i][index[i]] for i in range(dimensions)])
        return _refine(problem, x0, float(seed_values[flat]), steps)

    refined = pool_map(refine, seeds, threads=threads, name_prefix="gascatter_refine")

    candidates = [
        problem.candidate({name: float(x[i]) for i, name in enumerate(names)})
        for x, _ in refined
    ]
    best_value = max(c.value for c in candidates)

    ties: List[OptimizationCandidate] = []
    for candidate in candidates:
        if candidate.value < best_value - OPTIMIZER_TIE_TOLERANCE:
            continue
        if any(_separation(candidate.parameters, t.parameters) < _DUPLICATE_DISTANCE for t in ties):
            continue
        ties.append(candidate)
    ties.sort(key=lambda c: (round(abs(c.parameters['delta']), 9), c.parameters['phi_plus']))

    best = ties[0]
    bandwidth = _bandwidth(problem, best)
    logger.info(f"Best {objective} = {best.value:.12f} ({len(ties)} tie(s))")

    return OptimizationResult(
        objective=objective,
        regime=regime,
        value=best.value,
        parameters=best.parameters,
        Tc=best.Tc,
        I2=best.I2,
        bandwidth=bandwidth,
        ties=tuple(ties),
        seed_points=total,
        refined=len(seeds),
    )
