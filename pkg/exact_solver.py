"""
Exact eigenvalues and eigenvectors of the arrowhead Hamiltonian.

Eigenvalues are the roots of the secular function

    h(lambda) = lambda - eps0 + sum_{n>=2} W^2 / (E_n - lambda),

which is strictly increasing between consecutive poles E_n and has exactly one
root in each open inter-pole interval plus one beyond each end. Roots are found
by bisection, all brackets advanced together. A dense cyclic Jacobi
diagonalisation is kept as an independent oracle for small N.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from model_core import (
    ModelError,
    ModelParams,
    continuum_levels,
    dense_hamiltonian,
    unperturbed_spectrum,
)
from spectrum_cache import cached_spectrum
from summation import CompensatedAccumulator, fsum

logger = logging.getLogger(__name__)

MAX_BISECTIONS = 200
DEFAULT_RTOL = 1e-14


class BracketingError(ModelError):
    """Raised when the secular function is evaluated on one of its poles."""
    pass


class ConvergenceError(ModelError):
    """Raised when an iterative solver exceeds its iteration cap."""
    pass


@dataclass(frozen=True, eq=False)
class ExactSpectrum:
    """Sorted exact eigenvalues and first-component weights |psi_1^(k)|^2."""
    params: ModelParams
    energies: np.ndarray
    weights: np.ndarray
    bisections: int = 0


@dataclass(frozen=True, eq=False)
class ExactEigenvector:
    components: np.ndarray
    norm_error: float
    residual: float


def _secular_many(lams: np.ndarray, poles: np.ndarray, w2: float, eps0: float) -> np.ndarray:
    acc = CompensatedAccumulator(lams.shape)
    acc.add(lams - eps0)
    for pole in poles:
        acc.add(w2 / (pole - lams))
    return acc.total


def _inverse_square_sum(energies: np.ndarray, poles: np.ndarray, w2: float) -> np.ndarray:
    acc = CompensatedAccumulator(energies.shape)
    for pole in poles:
        d = pole - energies
        acc.add(w2 / (d * d))
    return acc.total


def secular_residual(lam, p: ModelParams):
    """
    Secular function h(lambda). Accepts a scalar or an array of lambdas.

    Raises:
        BracketingError: lambda coincides with a pole E_n, n >= 2.
    """
    poles = continuum_levels(p)
    w2 = p.w ** 2
    if np.ndim(lam) == 0:
        lam = float(lam)
        if w2 > 0 and np.any(poles == lam):
            raise BracketingError(f"Secular function evaluated at pole {lam!r}")
        return fsum(np.append(w2 / (poles - lam), lam - p.eps0))

    lams = np.asarray(lam, dtype=float)
    if w2 > 0 and np.any(np.isin(lams, poles)):
        raise BracketingError("Secular function evaluated at a pole")
    return _secular_many(lams, poles, w2, p.eps0)


def eigenvalues_exact(
        p: ModelParams,
        rtol: float = DEFAULT_RTOL,
        max_iter: int = MAX_BISECTIONS,
) -> np.ndarray:
    """
    All N eigenvalues, ascending, by bisection on the secular function.

    Brackets are (-bound, first pole), the N - 2 inter-pole intervals and
    (last pole, +bound) with bound = max|E_n| + N*W + dE. Each root is refined
    until its bracket is narrower than rtol * max(dE, |E_k|) or no float lies
    strictly inside it.

    Raises:
        ConvergenceError: some bracket did not converge within max_iter steps.
        BracketingError: a midpoint landed on a pole.
    """
    energies, _ = _bisect_roots(p, rtol, max_iter)
    return energies


def _bisect_roots(p: ModelParams, rtol: float, max_iter: int) -> Tuple[np.ndarray, int]:
    if p.w == 0:
        return np.sort(unperturbed_spectrum(p)), 0

    poles = continuum_levels(p)
    w2 = p.w ** 2
    bound = np.max(np.abs(poles)) + p.n * p.w + p.de
    lo_edge = np.concatenate(([-bound], poles))
    hi_edge = np.concatenate((poles, [bound]))
    lo = lo_edge.copy()
    hi = hi_edge.copy()

    active = np.arange(p.n)
    iteration = 0
    while active.size:
        if iteration == max_iter:
            raise ConvergenceError(
                f"{active.size} of {p.n} roots unconverged after {max_iter} bisections"
            )
        iteration += 1

        mid = 0.5 * (lo[active] + hi[active])
        h = _secular_many(mid, poles, w2, p.eps0)
        if not np.all(np.isfinite(h)):
            raise BracketingError(f"Non-finite secular value at bisection {iteration}")

        above = h > 0
        below = h < 0
        hi[active[above]] = mid[above]
        lo[active[below]] = mid[below]
        exact = ~(above | below)
        lo[active[exact]] = mid[exact]
        hi[active[exact]] = mid[exact]

        a_lo, a_hi = lo[active], hi[active]
        nxt = 0.5 * (a_lo + a_hi)
        scale = np.maximum(p.de, np.abs(nxt))
        done = (a_hi - a_lo <= rtol * scale) | (nxt == a_lo) | (nxt == a_hi)
        active = active[~done]

    roots = 0.5 * (lo + hi)
    # A root squeezed against its pole keeps the inner endpoint.
    roots = np.where(roots <= lo_edge, hi, roots)
    roots = np.where(roots >= hi_edge, lo, roots)
    logger.debug(f"Bisection converged for N={p.n} after {iteration} iterations")
    return roots, iteration


def first_component_sq_exact(ek, p: ModelParams):
    """
    Exact weight |psi_1^(k)|^2 = 1 / (1 + sum_{n>=2} W^2 / (E_n - E_k)^2).

    Accepts a scalar or an array of converged eigenvalues. At W = 0 the
    discrete level keeps all the weight; eps0 appears twice, and only its
    first occurrence (its stable-sort position) is the discrete one.

    Raises:
        BracketingError: ek coincides with a pole.
    """
    poles = continuum_levels(p)
    w2 = p.w ** 2
    if w2 == 0:
        hits = np.asarray(ek) == p.eps0
        weights = np.zeros(hits.shape)
        if hits.any():
            weights.flat[int(np.argmax(hits))] = 1.0
        return weights[()]

    if np.ndim(ek) == 0:
        d = poles - float(ek)
        if np.any(d == 0):
            raise BracketingError(f"Eigenvalue {ek!r} coincides with a pole")
        return 1.0 / (1.0 + fsum(w2 / (d * d)))

    energies = np.asarray(ek, dtype=float)
    if np.any(np.isin(energies, poles)):
        raise BracketingError("An eigenvalue coincides with a pole")
    return 1.0 / (1.0 + _inverse_square_sum(energies, poles, w2))


def eigenvector_exact(ek: float, p: ModelParams) -> ExactEigenvector:
    """
    Eigenvector from psi_n = -psi_1 * W / (E_n - E_k), psi_1 > 0.
    """
    if p.w == 0:
        raise BracketingError("Eigenvectors of the decoupled model are basis vectors")
    poles = continuum_levels(p)
    psi1 = np.sqrt(first_component_sq_exact(ek, p))
    tail = -psi1 * p.w / (poles - ek)
    v = np.concatenate(([psi1], tail))
    norm = np.sqrt(fsum(v * v))
    v = v / norm

    hv = np.empty_like(v)
    hv[0] = p.eps0 * v[0] + p.w * fsum(v[1:])
    hv[1:] = p.w * v[0] + poles * v[1:]
    residual = float(np.max(np.abs(hv - ek * v)))
    return ExactEigenvector(components=v, norm_error=abs(norm - 1.0), residual=residual)


@cached_spectrum
def solve_exact(p: ModelParams) -> ExactSpectrum:
    """Eigenvalues and first-component weights for every k (memoised)."""
    energies, iterations = _bisect_roots(p, DEFAULT_RTOL, MAX_BISECTIONS)
    weights = first_component_sq_exact(energies, p)
    # Shared through the cache.
    energies.setflags(write=False)
    weights.setflags(write=False)
    logger.info(f"Solved exact spectrum N={p.n}, dE={p.de:g}, W={p.w:g}")
    return ExactSpectrum(params=p, energies=energies, weights=weights, bisections=iterations)


def exact_level_spacing(spectrum: ExactSpectrum) -> np.ndarray:
    """dE_k/dk by central differences (one-sided at both ends)."""
    return np.gradient(spectrum.energies)


def _round_robin(n: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """n - 1 rounds of disjoint index pairs covering every pair once (n even)."""
    players = list(range(n))
    half = n // 2
    for _ in range(n - 1):
        yield np.array(players[:half]), np.array(players[half:][::-1])
        players = [players[0], players[-1]] + players[1:-1]


def jacobi_eigh(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60) -> Tuple[np.ndarray, np.ndarray]:
    """
    Symmetric eigendecomposition by cyclic Jacobi rotations.

    Each round applies n/2 disjoint rotations at once (round-robin ordering).
    Sweeps stop once the off-diagonal Frobenius norm is below tol * ||A||_F.

    Returns:
        Ascending eigenvalues and the matrix of eigenvectors (columns).
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    padded = n + (n % 2)
    if padded != n:
        a = np.pad(a, ((0, 1), (0, 1)))
    v = np.eye(padded)
    scale = np.linalg.norm(a)

    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        if sweep == max_sweeps:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")
        for p, q in _round_robin(padded):
            apq = a[p, q]
            rotate = apq != 0
            if not np.any(rotate):
                continue
            tau = np.divide(a[q, q] - a[p, p], 2.0 * apq, out=np.zeros_like(apq), where=rotate)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(rotate, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            rp, rq = a[p, :], a[q, :]
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p], a[:, q]
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p], v[:, q]
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    logger.debug(f"Jacobi converged after {sweep} sweeps for n={n}")

    values = np.diag(a)[:n]
    vectors = v[:n, :n]
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]


def dense_oracle_diagonalize(p: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Full eigendecomposition of the dense Hamiltonian. O(N^3); tests only.
    """
    if p.n > 500:
        logger.warning(f"Dense oracle requested for N={p.n}; intended for N <= 500")
    return jacobi_eigh(dense_hamiltonian(p))
