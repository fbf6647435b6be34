"""
Model parameters, unperturbed spectrum and derived scales of the arrowhead
Hamiltonian H = H0 + H_I.

H0 is diagonal: the first basis vector is the discrete level at eps0, the
remaining N - 1 vectors imitate a continuum with spacing dE centred on eps0.
H_I couples the discrete level to every continuum vector with the same real
matrix element W. Indices k and n are 1-based in docstrings, 0-based in arrays.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

logger = logging.getLogger(__name__)


class ModelError(Exception):
    """Base class for every failure raised by the model library."""
    pass


class InvalidModelError(ModelError, ValueError):
    """Raised when model parameters violate their invariants."""
    pass


class ModelParams(BaseModel):
    """Defining numbers of the model. Immutable and hashable."""
    model_config = ConfigDict(frozen=True)

    n: int
    de: float
    w: float
    eps0: float = 0.0
    hbar: float = 1.0

    @field_validator("n")
    @classmethod
    def _check_dimension(cls, value: int) -> int:
        if value < 4:
            raise ValueError(f"matrix dimension must be at least 4, got {value}")
        if value % 2:
            raise ValueError(f"matrix dimension must be even, got {value}")
        return value

    @field_validator("de", "hbar")
    @classmethod
    def _check_positive(cls, value: float) -> float:
        if not math.isfinite(value) or value <= 0:
            raise ValueError(f"must be a positive finite number, got {value}")
        return value

    @field_validator("w")
    @classmethod
    def _check_coupling(cls, value: float) -> float:
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"coupling must be finite and non-negative, got {value}")
        return value

    @field_validator("eps0")
    @classmethod
    def _check_offset(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"level offset must be finite, got {value}")
        return value


@dataclass(frozen=True)
class DerivedScales:
    """Physical scales that follow from ModelParams."""
    gamma: float
    r: float
    t0: float
    tmin: float
    tmax: float
    e0_min: float
    e0_max: float


def make_params(
        n: int,
        de: float,
        w: float,
        eps0: float = 0.0,
        hbar: float = 1.0,
) -> ModelParams:
    """
    Build validated model parameters.

    Raises:
        InvalidModelError: odd or too small n, non-positive de or hbar, negative w.
    """
    try:
        return ModelParams(n=n, de=de, w=w, eps0=eps0, hbar=hbar)
    except ValidationError as e:
        raise InvalidModelError(f"Invalid model parameters: {e}") from e


def coupling_for_ratio(de: float, r: float) -> float:
    """Coupling W that gives R = Gamma/dE = r at spacing de."""
    if not r > 0:
        raise InvalidModelError(f"R must be positive, got {r}")
    return de * math.sqrt(r / (2.0 * math.pi))


def params_for_ratio(
        n: int,
        de: float,
        r: float,
        eps0: float = 0.0,
        hbar: float = 1.0,
) -> ModelParams:
    """Model parameters indexed by R instead of W."""
    return make_params(n, de, coupling_for_ratio(de, r), eps0, hbar)


def continuum_levels(p: ModelParams) -> np.ndarray:
    """Diagonal entries n = 2..N, ascending. These are the secular-equation poles."""
    offsets = np.arange(2, p.n + 1, dtype=float) - p.n / 2 - 1
    return p.eps0 + p.de * offsets


def unperturbed_spectrum(p: ModelParams) -> np.ndarray:
    """Diagonal of H0 in basis order; eps0 appears at n = 1 and n = N/2 + 1."""
    return np.concatenate(([p.eps0], continuum_levels(p)))


def derived_scales(p: ModelParams) -> DerivedScales:
    gamma = 2.0 * math.pi * p.w ** 2 / p.de
    e0_max = p.de * (p.n / 2 - 1)
    return DerivedScales(
        gamma=gamma,
        r=gamma / p.de,
        t0=2.0 * math.pi * p.hbar / p.de,
        tmin=p.hbar / e0_max,
        tmax=p.hbar / p.de,
        e0_min=-e0_max,
        e0_max=e0_max,
    )


def dense_hamiltonian(p: ModelParams) -> np.ndarray:
    """
    Dense N x N arrowhead matrix. Meant for small N (test oracle only).
    """
    if p.n > 2000:
        logger.warning(f"Building a dense {p.n}x{p.n} Hamiltonian; this is an oracle path")
    h = np.diag(unperturbed_spectrum(p))
    h[0, 1:] = p.w
    h[1:, 0] = p.w
    return h
