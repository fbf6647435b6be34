"""
Approximate analytic solution of the arrowhead spectral problem.

With e1 = dE (k - N/2 - 1/2) the position of the k-th level on the half-integer
grid, the energy is built by successive approximation of the secular equation:

    E^(II)  = -(dE/pi) arctan(e1 / (Gamma/2))
    E^(III) = -(dE/pi) arctan((e1 + E^(II)) / (Gamma/2))
    E^(IV)  = -dE log((N - k + 1/2) / (k - 1/2)) / (pi^2 + ((e1 + E^(III)) dE / W^2)^2)

zeroth order E ~ e1 + E^(II), final E ~ e1 + E^(III) + E^(IV). All terms are
deviations from the discrete level eps0; returned energies add eps0 back.
Every function is vectorised over k.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from exact_solver import solve_exact
from model_core import ModelError, ModelParams, continuum_levels, derived_scales

logger = logging.getLogger(__name__)

IndexLike = Union[int, np.ndarray]

ENERGY_ORDERS = ("zeroth", "final")
ENERGY_SOURCES = ("final", "exact")


class UnsupportedRegimeError(ModelError):
    """Raised where the analytic formulas are undefined (W = 0, sin^2 pole)."""
    pass


@dataclass(frozen=True)
class ApproxLevel:
    k: int
    e1: float
    e2: float
    e3: float
    e4: float
    e_zeroth: float
    e_final: float
    weight_approx: float
    weight_lorentz: float


@dataclass(frozen=True, eq=False)
class ApproxSpectrum:
    """Analytic terms and derived quantities for k = 1..N."""
    params: ModelParams
    k: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    e4: np.ndarray
    e_zeroth: np.ndarray
    e_final: np.ndarray
    weight_approx: np.ndarray
    weight_lorentz: np.ndarray
    spacing: np.ndarray
    energy_source: str = "final"

    @property
    def energies(self) -> np.ndarray:
        return self.e_final

    @property
    def weights(self) -> np.ndarray:
        return self.weight_approx

    def level(self, k: int) -> ApproxLevel:
        i = k - 1
        return ApproxLevel(
            k=k,
            e1=float(self.e1[i]),
            e2=float(self.e2[i]),
            e3=float(self.e3[i]),
            e4=float(self.e4[i]),
            e_zeroth=float(self.e_zeroth[i]),
            e_final=float(self.e_final[i]),
            weight_approx=float(self.weight_approx[i]),
            weight_lorentz=float(self.weight_lorentz[i]),
        )


def _check_index(k: IndexLike, p: ModelParams) -> np.ndarray:
    ks = np.asarray(k)
    if not np.issubdtype(ks.dtype, np.integer):
        if not np.all(ks == np.round(ks)):
            raise ValueError(f"Level index must be an integer, got {k}")
    if np.any(ks < 1) or np.any(ks > p.n):
        raise ValueError(f"Level index must lie in 1..{p.n}, got {k}")
    return ks.astype(float)


def grid_offset(k: IndexLike, p: ModelParams):
    """E^(I) = dE (k - N/2 - 1/2): never zero, the grid is offset by dE/2."""
    return p.de * (_check_index(k, p) - p.n / 2 - 0.5)


def energy_terms(k: IndexLike, p: ModelParams) -> Tuple:
    """
    The four analytic terms (E^(I), E^(II), E^(III), E^(IV)) for level k.

    Raises:
        UnsupportedRegimeError: W = 0 (E^(IV) divides by W^2).
    """
    if p.w == 0:
        raise UnsupportedRegimeError("Analytic energies need W > 0")
    ks = _check_index(k, p)
    half_gamma = derived_scales(p).gamma / 2
    e1 = p.de * (ks - p.n / 2 - 0.5)
    e2 = -(p.de / math.pi) * np.arctan(e1 / half_gamma)
    e3 = -(p.de / math.pi) * np.arctan((e1 + e2) / half_gamma)
    log_ratio = np.log((p.n - ks + 0.5) / (ks - 0.5))
    e4 = -p.de * log_ratio / (math.pi ** 2 + ((e1 + e3) * p.de / p.w ** 2) ** 2)
    return e1[()], e2[()], e3[()], e4[()]


def energy_approx(k: IndexLike, p: ModelParams, order: str = "final"):
    """
    Approximate E_k: zeroth order eps0 + e1 + e2, final eps0 + e1 + e3 + e4.
    """
    if order not in ENERGY_ORDERS:
        raise ValueError(f"order must be one of {ENERGY_ORDERS}, got {order!r}")
    e1, e2, e3, e4 = energy_terms(k, p)
    if order == "zeroth":
        return p.eps0 + (e1 + e2)
    return p.eps0 + (e1 + e3 + e4)


def weight_approx(ek, p: ModelParams, k: Optional[IndexLike] = None):
    """
    Approximate |psi_1^(k)|^2 at energy ek from the summed-norm estimate

        1 / (1 + (W/dE)^2 (pi^2 / sin^2(pi x) - 1/(N/2 - 1/2 - x) + 1/(1/2 - N/2 - x)))

    with x = (ek - eps0)/dE. k only labels error messages.

    Raises:
        UnsupportedRegimeError: W = 0, or x is an integer to machine precision.
    """
    if p.w == 0:
        raise UnsupportedRegimeError("Approximate weights need W > 0")
    x = (np.asarray(ek, dtype=float) - p.eps0) / p.de
    on_grid = np.abs(x - np.round(x)) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(x))
    if np.any(on_grid):
        where = f" for k={k}" if k is not None else ""
        raise UnsupportedRegimeError(f"Energy sits on an unperturbed level{where}")
    sin_sq = np.sin(math.pi * x) ** 2
    bracket = (math.pi ** 2 / sin_sq
               - 1.0 / (p.n / 2 - 0.5 - x)
               + 1.0 / (0.5 - p.n / 2 - x))
    return (1.0 / (1.0 + (p.w / p.de) ** 2 * bracket))[()]


def lorentzian_weight(k: IndexLike, p: ModelParams):
    """Breit-Wigner weight dE (Gamma/2pi) / (e1^2 + Gamma^2/4)."""
    if p.w == 0:
        raise UnsupportedRegimeError("Line shape needs W > 0")
    gamma = derived_scales(p).gamma
    e1 = grid_offset(k, p)
    return (p.de * (gamma / (2 * math.pi)) / (e1 ** 2 + gamma ** 2 / 4))[()]


def level_spacing_approx(k: IndexLike, p: ModelParams):
    """dE_k/dk ~ dE - (dE^2/pi) (Gamma/2) / (e1^2 + Gamma^2/4)."""
    if p.w == 0:
        raise UnsupportedRegimeError("Level compression needs W > 0")
    gamma = derived_scales(p).gamma
    e1 = grid_offset(k, p)
    return (p.de - (p.de ** 2 / math.pi) * (gamma / 2) / (e1 ** 2 + gamma ** 2 / 4))[()]


def density_of_states(k: IndexLike, p: ModelParams):
    """rho(E_k) = dk/dE_k."""
    return 1.0 / level_spacing_approx(k, p)


def golden_rule_width(p: ModelParams) -> float:
    """
    Gamma = 2 pi sum_f |W|^2 delta(E_f - eps0) with the discrete delta
    1/dE on the cell [-dE/2, dE/2). Agrees with 2 pi W^2 / dE.
    """
    offsets = continuum_levels(p) - p.eps0
    in_cell = (offsets >= -p.de / 2) & (offsets < p.de / 2)
    return 2 * math.pi * p.w ** 2 * np.count_nonzero(in_cell) / p.de


def approx_spectrum(
        p: ModelParams,
        energy_source: str = "final",
        exact_energies: Optional[np.ndarray] = None,
) -> ApproxSpectrum:
    """
    Full analytic pipeline for k = 1..N.

    The summed-norm weight is evaluated at the final approximate energy by
    default; energy_source="exact" evaluates it at exact eigenvalues instead
    (solved on demand unless exact_energies is given).
    """
    if energy_source not in ENERGY_SOURCES:
        raise ValueError(f"energy_source must be one of {ENERGY_SOURCES}, got {energy_source!r}")
    ks = np.arange(1, p.n + 1)
    e1, e2, e3, e4 = energy_terms(ks, p)
    e_zeroth = p.eps0 + (e1 + e2)
    e_final = p.eps0 + (e1 + e3 + e4)

    if energy_source == "exact":
        if exact_energies is None:
            exact_energies = solve_exact(p).energies
        weights = weight_approx(exact_energies, p)
    else:
        weights = weight_approx(e_final, p)

    logger.debug(f"Analytic spectrum N={p.n} with weights at {energy_source} energies")
    return ApproxSpectrum(
        params=p,
        k=ks,
        e1=e1,
        e2=e2,
        e3=e3,
        e4=e4,
        e_zeroth=e_zeroth,
        e_final=e_final,
        weight_approx=weights,
        weight_lorentz=lorentzian_weight(ks, p),
        spacing=level_spacing_approx(ks, p),
        energy_source=energy_source,
    )
