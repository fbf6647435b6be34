"""
Decay dynamics of the discrete level |1>.

Starting from |psi(0)> = |1>, the survival amplitude is

    a(t) = sum_k exp(-i E_k t / hbar) |psi_1^(k)|^2,

and P(t) = |a(t)|^2. Sums over k run through compensated accumulators, one
real and one imaginary, vectorised over the time grid.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np
from scipy.signal import find_peaks

from approx_solver import approx_spectrum
from exact_solver import solve_exact
from model_core import ModelError, ModelParams, derived_scales
from summation import CompensatedAccumulator

logger = logging.getLogger(__name__)

SPECTRUM_SOURCES = ("exact", "analytic")
DEFAULT_DECAY_STEPS = 2000
REVIVAL_STEPS_PER_PERIOD = 100_000


class DegenerateSpectrumError(ModelError):
    """Raised when a spectrum carries no information for the requested quantity."""
    pass


class SpectralDecomposition(Protocol):
    energies: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True, eq=False)
class DecayCurve:
    times: np.ndarray
    p: np.ndarray
    p_exp: np.ndarray
    dp: np.ndarray


@dataclass(frozen=True, eq=False)
class RevivalProfile:
    times: np.ndarray
    p: np.ndarray
    peak_time: float
    peak_probability: float


@dataclass(frozen=True)
class RevivalPeak:
    multiple: int
    time: float
    probability: float


def spectrum_for_dynamics(p: ModelParams, source: str = "exact") -> SpectralDecomposition:
    """Exact spectrum by default; the analytic one shows approximation-induced dephasing."""
    if source not in SPECTRUM_SOURCES:
        raise ValueError(f"spectrum source must be one of {SPECTRUM_SOURCES}, got {source!r}")
    if source == "analytic":
        return approx_spectrum(p)
    return solve_exact(p)


def survival_amplitude(t, spectrum: SpectralDecomposition, p: ModelParams):
    """
    a(t) for a scalar time or an array of times.
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    re = CompensatedAccumulator(times.shape)
    im = CompensatedAccumulator(times.shape)
    for ek, wk in zip(spectrum.energies, spectrum.weights):
        phase = times * (ek / p.hbar)
        re.add(wk * np.cos(phase))
        im.add(-wk * np.sin(phase))
    amplitude = re.total + 1j * im.total
    if np.ndim(t) == 0:
        return complex(amplitude[0])
    return amplitude


def survival_probability(t, spectrum: SpectralDecomposition, p: ModelParams):
    amplitude = survival_amplitude(t, spectrum, p)
    return (amplitude.real ** 2 + amplitude.imag ** 2)


def default_time_grid(p: ModelParams, steps: int = DEFAULT_DECAY_STEPS) -> np.ndarray:
    """[0, 5 hbar/Gamma] sampled at `steps` points."""
    gamma = derived_scales(p).gamma
    if gamma == 0:
        raise DegenerateSpectrumError("Decoupled model has no decay time scale")
    return np.linspace(0.0, 5.0 * p.hbar / gamma, steps)


def decay_curve(tgrid: Sequence[float], spectrum: SpectralDecomposition, p: ModelParams) -> DecayCurve:
    """
    P(t), the exponential law exp(-Gamma t / hbar) and their difference.
    """
    times = np.asarray(tgrid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("time grid must be a non-empty 1-D sequence")
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("time grid must be sorted and non-negative")

    prob = survival_probability(times, spectrum, p)
    p_exp = np.exp(-derived_scales(p).gamma * times / p.hbar)
    logger.debug(f"Decay curve over {times.size} points up to t={times[-1]:g}")
    return DecayCurve(times=times, p=prob, p_exp=p_exp, dp=prob - p_exp)


def deviation_peak(curve: DecayCurve) -> Tuple[float, float]:
    """(t, dP) at the largest |dP| on the curve."""
    i = int(np.argmax(np.abs(curve.dp)))
    return float(curve.times[i]), float(curve.dp[i])


def short_time_exponent(spectrum: SpectralDecomposition, p: ModelParams, points: int = 40) -> float:
    """
    Power of t in 1 - P(t) fitted on [T_min/100, T_min/10]; 2 in the Zeno regime.
    """
    tmin = derived_scales(p).tmin
    times = np.geomspace(tmin / 100, tmin / 10, points)
    loss = 1.0 - survival_probability(times, spectrum, p)
    if np.any(loss <= 0):
        raise DegenerateSpectrumError("No measurable short-time decay (is W = 0?)")
    slope, _ = np.polyfit(np.log(times), np.log(loss), 1)
    return float(slope)


def oscillation_period(curve: DecayCurve, t_lo: float, t_hi: float) -> float:
    """Median spacing of the local maxima of dP on [t_lo, t_hi]."""
    inside = (curve.times >= t_lo) & (curve.times <= t_hi)
    times = curve.times[inside]
    peaks, _ = find_peaks(curve.dp[inside])
    if peaks.size < 2:
        raise DegenerateSpectrumError(f"Fewer than two maxima of dP on [{t_lo}, {t_hi}]")
    return float(np.median(np.diff(times[peaks])))


def revival_profile(
        window: Tuple[float, float],
        spectrum: SpectralDecomposition,
        p: ModelParams,
        step: Optional[float] = None,
) -> RevivalProfile:
    """
    P sampled densely over a time window, step T0/1e5 unless given.
    """
    start, stop = window
    if start < 0 or stop <= start:
        raise ValueError(f"revival window must satisfy 0 <= start < stop, got {window}")
    if step is None:
        step = derived_scales(p).t0 / REVIVAL_STEPS_PER_PERIOD
    steps = int(math.ceil((stop - start) / step)) + 1
    times = np.linspace(start, stop, steps)
    prob = survival_probability(times, spectrum, p)
    i = int(np.argmax(prob))
    logger.debug(f"Revival window [{start:g}, {stop:g}]: max P={prob[i]:.4f} at t={times[i]:g}")
    return RevivalProfile(
        times=times,
        p=prob,
        peak_time=float(times[i]),
        peak_probability=float(prob[i]),
    )


def revival_maxima(
        multiples: Sequence[int],
        spectrum: SpectralDecomposition,
        p: ModelParams,
        window: float = 800.0,
) -> List[RevivalPeak]:
    """
    Largest P in [m T0, m T0 + m window] for each multiple m. The revival peak
    drifts by roughly a fixed delay per period, hence the growing window.
    """
    t0 = derived_scales(p).t0
    peaks = []
    for m in multiples:
        if m < 1:
            raise ValueError(f"period multiple must be positive, got {m}")
        profile = revival_profile((m * t0, m * t0 + m * window), spectrum, p)
        peaks.append(RevivalPeak(m, profile.peak_time, profile.peak_probability))
    return peaks


def decimal_digits(value: int) -> int:
    """Number of decimal digits of a positive integer without converting it to str."""
    digits = int(math.log10(value)) + 1
    # log10 may round across a power of ten
    if 10 ** (digits - 1) > value:
        digits -= 1
    elif 10 ** digits <= value:
        digits += 1
    return digits


def recurrence_time(m_digits: int, spectrum: SpectralDecomposition, p: ModelParams) -> int:
    """
    Least common multiple of |trunc(10^M (E_k - eps0) / dE)| over k, zeros skipped.

    The result is an exact integer; for realistic spectra it runs to hundreds
    of digits, i.e. the state never recurs on a physical time scale.

    Raises:
        DegenerateSpectrumError: every truncated entry is zero.
    """
    if m_digits < 1:
        raise ValueError(f"M must be a positive integer, got {m_digits}")
    scale = 10 ** m_digits
    values = [abs(int(math.trunc(scale * (float(e) - p.eps0) / p.de))) for e in spectrum.energies]
    values = [v for v in values if v]
    if not values:
        raise DegenerateSpectrumError("All truncated energies are zero")
    result = math.lcm(*values)
    logger.info(f"Recurrence LCM for M={m_digits} has {decimal_digits(result)} digits")
    return result
