"""
Accuracy of the analytic solution against the exact one.

For fixed N and a width-to-spacing ratio R = Gamma/dE (W derived), three
maximum deviations over k are measured:

    delta1 = max |E_final - E_exact|            (energy)
    delta2 = max |w_approx - w_exact|           (summed-norm weight)
    delta3 = max |w_lorentz - w_exact|          (Breit-Wigner line shape)

Each curve falls with R while mid-band errors dominate, then turns once the
band edges take over. For delta1 and delta2 the turning point R0 is the
minimum, located by a log-spaced grid pre-scan followed by a bracketed
golden-section search on log R. delta3 flattens instead of rising again, so
its R0 is the balance point where the error at the band centre falls to the
largest error elsewhere, found by Brent's method on log R.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from approx_solver import approx_spectrum
from exact_solver import solve_exact
from model_core import ModelError, params_for_ratio
from spectrum_cache import cached_spectrum

logger = logging.getLogger(__name__)

DEFAULT_DE = 1e-4
DELTA_INDICES = (1, 2, 3)
TABLE1_SIZES = (2000, 4000, 8000)
TABLE1_HEADER = ["N", "R0_1", "Delta1", "R0_2", "Delta2", "R0_3", "Delta3"]
SWEEP_HEADER = ["R", "Delta1", "k1", "Delta2", "k2", "Delta3", "k3"]
CENTRE_HALF_WIDTH = 2


class TurningPointError(ModelError):
    """Raised when an error curve has no turning point inside the bracket."""
    pass


@dataclass(frozen=True)
class ErrorTriple:
    """Maximum deviations at one (N, R) and the 1-based k where they occur."""
    n: int
    r: float
    de: float
    delta1: float
    delta2: float
    delta3: float
    k1: int
    k2: int
    k3: int
    delta3_centre: float
    delta3_outer: float

    def delta(self, index: int) -> float:
        _check_delta_index(index)
        return (self.delta1, self.delta2, self.delta3)[index - 1]

    def argmax(self, index: int) -> int:
        _check_delta_index(index)
        return (self.k1, self.k2, self.k3)[index - 1]

    def reported(self, index: int) -> float:
        """Delta as tabulated: delta1 in units of dE, weights as they are."""
        value = self.delta(index)
        return value / self.de if index == 1 else value


@dataclass(frozen=True)
class TurningPoint:
    """R0 and the error there: the minimum for delta1 and delta2, the balance value for delta3."""
    r0: float
    delta_min: float


@dataclass(frozen=True, eq=False)
class ErrorSweep:
    n: int
    de: float
    r_values: np.ndarray
    triples: List[ErrorTriple]
    turning_points: Tuple[TurningPoint, TurningPoint, TurningPoint]

    def curve(self, index: int) -> np.ndarray:
        return np.array([t.delta(index) for t in self.triples])


@dataclass(frozen=True)
class Table1Row:
    n: int
    points: Tuple[TurningPoint, TurningPoint, TurningPoint]
    de: float

    def as_row(self) -> list:
        row = [self.n]
        for index, tp in zip(DELTA_INDICES, self.points):
            value = tp.delta_min / self.de if index == 1 else tp.delta_min
            row.extend([tp.r0, value])
        return row


def _check_delta_index(index: int):
    if index not in DELTA_INDICES:
        raise ValueError(f"delta index must be one of {DELTA_INDICES}, got {index}")


@cached_spectrum
def error_triple(n: int, r: float, de: float = DEFAULT_DE, energy_source: str = "final") -> ErrorTriple:
    """
    Exact and analytic spectra at (N, R), and the three maximum deviations.
    """
    p = params_for_ratio(n, de, r)
    exact = solve_exact(p)
    approx = approx_spectrum(
        p,
        energy_source=energy_source,
        exact_energies=exact.energies if energy_source == "exact" else None,
    )
    deviations = (
        np.abs(approx.e_final - exact.energies),
        np.abs(approx.weight_approx - exact.weights),
        np.abs(approx.weight_lorentz - exact.weights),
    )
    worst = [int(np.argmax(d)) for d in deviations]
    centre = centre_band(n)
    triple = ErrorTriple(
        n=n,
        r=float(r),
        de=de,
        delta1=float(deviations[0][worst[0]]),
        delta2=float(deviations[1][worst[1]]),
        delta3=float(deviations[2][worst[2]]),
        k1=worst[0] + 1,
        k2=worst[1] + 1,
        k3=worst[2] + 1,
        delta3_centre=float(deviations[2][centre].max()),
        delta3_outer=float(np.max(np.delete(deviations[2], np.arange(n)[centre]), initial=0.0)),
    )
    logger.debug(
        f"N={n} R={r:.4g}: delta1/dE={triple.reported(1):.3e} delta2={triple.delta2:.3e} "
        f"delta3={triple.delta3:.3e}"
    )
    return triple


def centre_band(n: int) -> slice:
    """0-based indices of the levels nearest eps0."""
    half = n // 2
    return slice(max(half - CENTRE_HALF_WIDTH, 0), min(half + CENTRE_HALF_WIDTH, n))


def log_grid(r_lo: float, r_hi: float, points: int) -> np.ndarray:
    if not 0 < r_lo < r_hi:
        raise ValueError(f"R range must satisfy 0 < r_lo < r_hi, got ({r_lo}, {r_hi})")
    if points < 2:
        raise ValueError(f"need at least two grid points, got {points}")
    return np.geomspace(r_lo, r_hi, points)


def sweep_over_r(
        n: int,
        r_grid: Sequence[float],
        de: float = DEFAULT_DE,
        workers: int = 1,
        energy_source: str = "final",
) -> ErrorSweep:
    """
    Error triples on a grid of R. Sampled turning points are the minima for
    delta1 and delta2, and the first grid point where delta3 leaves the band
    centre (its minimum when it never does).
    Grid points run on `workers` threads, results keep grid order.
    """
    grid = np.asarray(r_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("R grid must be a non-empty 1-D sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("R grid must be positive and strictly increasing")

    logger.info(f"Sweeping N={n} over {grid.size} values of R in [{grid[0]:g}, {grid[-1]:g}]")

    def evaluate(r: float) -> ErrorTriple:
        return error_triple(n, float(r), de, energy_source)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            triples = list(pool.map(evaluate, grid))
    else:
        triples = [evaluate(r) for r in grid]

    turning = []
    for index in DELTA_INDICES:
        values = [t.delta(index) for t in triples]
        i = int(np.argmin(values))
        if index == 3:
            left = [j for j, t in enumerate(triples) if t.delta3_outer >= t.delta3_centre]
            if left and left[0] > 0:
                i = left[0]
        turning.append(TurningPoint(r0=float(grid[i]), delta_min=values[i]))
    return ErrorSweep(n=n, de=de, r_values=grid, triples=triples, turning_points=tuple(turning))


def golden_turning_point(
        objective: Callable[[float], float],
        r_lo: float,
        r_hi: float,
        points: int = 25,
        rtol: float = 1e-2,
) -> TurningPoint:
    """
    Minimise objective(R) on [r_lo, r_hi]: log-spaced pre-scan, then a
    golden-section search on log R inside the three grid points around the
    sampled minimum, to relative R tolerance rtol.

    Raises:
        TurningPointError: the sampled minimum sits on a bracket end.
    """
    grid = log_grid(r_lo, r_hi, points)
    values = np.array([objective(float(r)) for r in grid])
    i = int(np.argmin(values))
    if i == 0 or i == grid.size - 1:
        raise TurningPointError(
            f"Error curve is monotone on [{r_lo:g}, {r_hi:g}] (minimum at R={grid[i]:g})"
        )

    x = np.log(grid)
    xtol = math.log1p(rtol) / (2.0 * max(abs(x[i]), 1.0))
    try:
        result = minimize_scalar(
            lambda s: objective(float(math.exp(s))),
            bracket=(x[i - 1], x[i], x[i + 1]),
            method="golden",
            options={"xtol": xtol},
        )
    except ValueError as e:
        # Flat neighbourhood: equal sampled values do not form a strict bracket.
        logger.warning(f"Golden search skipped at R={grid[i]:g}: {e}")
        return TurningPoint(r0=float(grid[i]), delta_min=float(values[i]))
    if result.fun > values[i]:
        return TurningPoint(r0=float(grid[i]), delta_min=float(values[i]))
    return TurningPoint(r0=float(math.exp(result.x)), delta_min=float(result.fun))


def balance_turning_point(
        split: Callable[[float], Tuple[float, float]],
        r_lo: float,
        r_hi: float,
        points: int = 25,
        rtol: float = 1e-2,
) -> TurningPoint:
    """
    R where a falling centre error meets the outer error: split(R) returns
    (centre, outer). A log-spaced pre-scan brackets the first sign change of
    log(centre/outer), then Brent's method refines it on log R.

    Raises:
        TurningPointError: no sign change, or the outer error already
            dominates at r_lo.
    """
    grid = log_grid(r_lo, r_hi, points)

    tiny = np.finfo(float).tiny

    def gap(r: float) -> float:
        centre, outer = split(r)
        return math.log(max(centre, tiny)) - math.log(max(outer, tiny))

    gaps = np.array([gap(float(r)) for r in grid])
    crossed = np.flatnonzero(gaps <= 0)
    if crossed.size == 0:
        raise TurningPointError(f"Centre error dominates on all of [{r_lo:g}, {r_hi:g}]")
    i = int(crossed[0])
    if i == 0:
        raise TurningPointError(f"Outer error already dominates at R={r_lo:g}")

    x = np.log(grid)
    root = brentq(lambda s: gap(math.exp(s)), x[i - 1], x[i], xtol=math.log1p(rtol) / 2.0)
    r0 = float(math.exp(root))
    return TurningPoint(r0=r0, delta_min=float(max(split(r0))))


def locate_turning_point(
        n: int,
        de: float,
        delta_index: int,
        r_lo: float,
        r_hi: float,
        points: int = 25,
        rtol: float = 1e-2,
        energy_source: str = "final",
) -> TurningPoint:
    """Turning point R0 and the error there for one delta at fixed N."""
    _check_delta_index(delta_index)
    if delta_index == 3:
        tp = balance_turning_point(
            lambda r: _delta3_split(error_triple(n, r, de, energy_source)),
            r_lo,
            r_hi,
            points=points,
            rtol=rtol,
        )
        logger.info(f"N={n}: delta3 turning point R0={tp.r0:.2f}, value={tp.delta_min:.3e}")
        return tp
    tp = golden_turning_point(
        lambda r: error_triple(n, r, de, energy_source).delta(delta_index),
        r_lo,
        r_hi,
        points=points,
        rtol=rtol,
    )
    logger.info(f"N={n}: delta{delta_index} turning point R0={tp.r0:.2f}, min={tp.delta_min:.3e}")
    return tp


def _delta3_split(t: ErrorTriple) -> Tuple[float, float]:
    return t.delta3_centre, t.delta3_outer


def table1_report(
        de: float = DEFAULT_DE,
        sizes: Sequence[int] = TABLE1_SIZES,
        r_lo: float = 20.0,
        r_hi: float = 300.0,
        points: int = 25,
        workers: int = 1,
) -> List[Table1Row]:
    """
    Turning points of all three deltas for each N and the errors there.
    The pre-scan grid is evaluated once per N and shared by the three searches.
    """
    rows = []
    for n in sizes:
        sweep_over_r(n, log_grid(r_lo, r_hi, points), de, workers=workers)
        tps = tuple(locate_turning_point(n, de, index, r_lo, r_hi, points=points) for index in DELTA_INDICES)
        rows.append(Table1Row(n=n, points=tps, de=de))
    return rows
