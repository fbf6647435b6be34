"""
Command-line entry point for the metastable-level model.

Every command writes one CSV table (stdout unless --out is given):

    spectrum    k, exact / zeroth / final energies, exact / approximate / Lorentzian weights, spacing
    lineshape   k, exact energy, exact and Lorentzian weights, exact and approximate spacing
    decay       t, P, exp(-Gamma t/hbar), dP
    revival     t, P over [m T0, m T0 + window]
    recurrence  M, decimal digits and log10 of the recurrence LCM
    errors      R, delta1 (units of dE), k1, delta2, k2, delta3, k3
    table1      N, R0 and the delta there for each of the three error metrics

Exit codes: 0 success, 2 usage error, 1 numerical or I/O failure.
"""

import argparse
import logging
import math
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np

from approx_solver import approx_spectrum
from config_loader import COMMANDS, RunConfig, build_run_config, load_global_settings
from csv_writer import ResultCSVWriter
from dynamics import (
    decay_curve,
    decimal_digits,
    default_time_grid,
    recurrence_time,
    revival_profile,
    spectrum_for_dynamics,
)
from error_analysis import SWEEP_HEADER, TABLE1_HEADER, log_grid, sweep_over_r, table1_report
from exact_solver import exact_level_spacing, solve_exact
from model_core import InvalidModelError, ModelError, derived_scales

logger = logging.getLogger(__name__)

Table = Tuple[List[str], List[list]]


def setup_logging(log_level: str = "INFO", log_file: Optional[str] = None):
    """Setup logging configuration. Console output goes to stderr, CSV may use stdout."""
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=numeric_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Finite-dimensional model of a metastable level: spectra, line shape, decay and error analysis'
    )
    parser.add_argument('--command', '-c', choices=COMMANDS, required=True, help='What to compute')
    parser.add_argument('--n', type=int, help='Matrix dimension N (even, >= 4)')
    parser.add_argument('--de', type=float, help='Unperturbed level spacing dE (default: 1e-4)')
    parser.add_argument('--w', type=float, help='Coupling W (exclusive with --r)')
    parser.add_argument('--r', type=float, help='Width-to-spacing ratio R = Gamma/dE (exclusive with --w)')
    parser.add_argument('--eps0', type=float, help='Energy of the discrete level (default: 0)')
    parser.add_argument('--hbar', type=float, help='Reduced Planck constant (default: 1)')
    parser.add_argument('--tmax', type=float, help='Upper end of the decay time grid (default: 5 hbar/Gamma)')
    parser.add_argument('--steps', type=int, help='Number of decay time points (default: 2000)')
    parser.add_argument('--period-multiple', type=int, help='Revival window starts at this multiple of T0 (default: 1)')
    parser.add_argument('--window', type=float, help='Revival window length (default: 800)')
    parser.add_argument('--m-digits', type=int, help='Decimal digits M kept in the recurrence LCM (default: 1)')
    parser.add_argument('--r-lo', type=float, help='Lower end of the R grid')
    parser.add_argument('--r-hi', type=float, help='Upper end of the R grid')
    parser.add_argument('--points', type=int, help='Number of log-spaced R values (default: 25)')
    parser.add_argument('--energy-source', choices=('final', 'exact'), default='final',
                        help='Energy inserted into the summed-norm weight (default: final)')
    parser.add_argument('--spectrum-source', choices=('exact', 'analytic'), default='exact',
                        help='Spectrum used for time evolution (default: exact)')
    parser.add_argument('--out', '-o', help='Output CSV path (default: stdout)')
    return parser


def cmd_spectrum(cfg: RunConfig) -> Table:
    p = cfg.model.to_params()
    exact = solve_exact(p)
    approx = approx_spectrum(p, energy_source=cfg.energy_source, exact_energies=exact.energies)
    headers = ["k", "E_exact", "E_zeroth", "E_final", "w_exact", "w_approx", "w_lorentz", "spacing_approx"]
    rows = [
        [k, e, ez, ef, we, wa, wl, sp]
        for k, e, ez, ef, we, wa, wl, sp in zip(
            approx.k, exact.energies, approx.e_zeroth, approx.e_final,
            exact.weights, approx.weight_approx, approx.weight_lorentz, approx.spacing,
        )
    ]
    return headers, rows


def cmd_lineshape(cfg: RunConfig) -> Table:
    p = cfg.model.to_params()
    exact = solve_exact(p)
    approx = approx_spectrum(p)
    headers = ["k", "E_exact", "w_exact", "w_lorentz", "spacing_exact", "spacing_approx"]
    rows = [
        [k, e, we, wl, se, sa]
        for k, e, we, wl, se, sa in zip(
            approx.k, exact.energies, exact.weights, approx.weight_lorentz,
            exact_level_spacing(exact), approx.spacing,
        )
    ]
    return headers, rows


def cmd_decay(cfg: RunConfig) -> Table:
    p = cfg.model.to_params()
    spectrum = spectrum_for_dynamics(p, cfg.spectrum_source)
    grid = cfg.time_grid
    if grid.tmax is None:
        times = default_time_grid(p, grid.steps)
    else:
        times = np.linspace(0.0, grid.tmax, grid.steps)
    curve = decay_curve(times, spectrum, p)
    rows = [list(row) for row in zip(curve.times, curve.p, curve.p_exp, curve.dp)]
    return ["t", "P", "P_exp", "dP"], rows


def cmd_revival(cfg: RunConfig) -> Table:
    p = cfg.model.to_params()
    spectrum = spectrum_for_dynamics(p, cfg.spectrum_source)
    start = cfg.time_grid.period_multiple * derived_scales(p).t0
    profile = revival_profile((start, start + cfg.time_grid.window), spectrum, p)
    logger.info(f"Revival maximum P={profile.peak_probability:.4f} at t={profile.peak_time:.2f}")
    return ["t", "P"], [list(row) for row in zip(profile.times, profile.p)]


def cmd_recurrence(cfg: RunConfig) -> Table:
    p = cfg.model.to_params()
    spectrum = spectrum_for_dynamics(p, cfg.spectrum_source)
    m_digits = cfg.time_grid.m_digits
    lcm = recurrence_time(m_digits, spectrum, p)
    return ["M", "digits", "log10_lcm"], [[m_digits, decimal_digits(lcm), math.log10(lcm)]]


def cmd_errors(cfg: RunConfig, workers: int = 1) -> Table:
    model, sweep = cfg.model, cfg.sweep
    result = sweep_over_r(
        model.n,
        log_grid(sweep.r_lo, sweep.r_hi, sweep.points),
        model.de,
        workers=workers,
        energy_source=cfg.energy_source,
    )
    rows = [
        [t.r, t.reported(1), t.k1, t.reported(2), t.k2, t.reported(3), t.k3]
        for t in result.triples
    ]
    return SWEEP_HEADER, rows


def cmd_table1(cfg: RunConfig, workers: int = 1) -> Table:
    sweep = cfg.sweep
    report = table1_report(
        de=cfg.model.de,
        r_lo=sweep.r_lo,
        r_hi=sweep.r_hi,
        points=sweep.points,
        workers=workers,
    )
    return TABLE1_HEADER, [row.as_row() for row in report]


def run(cfg: RunConfig, workers: int = 1) -> int:
    """Execute one configured command and write its CSV. Returns rows written."""
    if cfg.command == "spectrum":
        headers, rows = cmd_spectrum(cfg)
    elif cfg.command == "lineshape":
        headers, rows = cmd_lineshape(cfg)
    elif cfg.command == "decay":
        headers, rows = cmd_decay(cfg)
    elif cfg.command == "revival":
        headers, rows = cmd_revival(cfg)
    elif cfg.command == "recurrence":
        headers, rows = cmd_recurrence(cfg)
    elif cfg.command == "errors":
        headers, rows = cmd_errors(cfg, workers)
    else:
        headers, rows = cmd_table1(cfg, workers)
    return ResultCSVWriter(headers, cfg.out).write_rows(rows)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point. Returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = load_global_settings()
        cfg = build_run_config(args)
    except ValueError as e:
        parser.error(str(e))

    setup_logging(settings.log_level, settings.log_file)
    logger.info(f"Running command '{cfg.command}'")

    try:
        run(cfg, workers=settings.workers)
    except InvalidModelError as e:
        logger.error(f"Invalid model: {e}")
        return 2
    except ModelError as e:
        logger.error(f"Numerical failure: {e}", exc_info=True)
        return 1
    except OSError as e:
        logger.error(f"Output error: {e}")
        return 1
    except ValueError as e:
        logger.error(f"Invalid arguments: {e}")
        return 2
    return 0


if __name__ == '__main__':
    sys.exit(main())
