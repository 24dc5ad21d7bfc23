"""
Rotational decoherence rate of a polarizable particle in thermal radiation,
and the exponential decay of orientation coherences it drives.

Two independent routes to the same rate:
  - closed form, Λ = 6!·2c/(9ε₀²)·ζ(7)·k_T⁷·(α_x − α_y)²·sin²ω;
  - numeric, the S²×S² quadrature of the polarization-summed |Δf|² times the
    k⁴-weighted Planck moment, evaluated by adaptive quadrature.
"""

import enum
import logging
import math
from typing import Iterable, Optional, Sequence

import attrs
import numpy as np

from classes.angular_quadrature import build_sphere_grid, integrate_product
from classes.core_types import OrientationPair, SymmetricTensor, delta_polarizability
from classes.errors import ConvergenceError, InvalidInputError
from classes.planck_bath import ThermalBath, photon_moment_closed, weighted_moment
from classes.scattering_model import (
    DEFAULT_CONVENTION,
    PolarizationConvention,
    delta_kernel_from_difference,
)
from constants.defaults import (
    HERMITIAN_TOLERANCE,
    PSD_TOLERANCE,
    RATE_DRIFT_TOLERANCE,
    RATE_GRID_ORDER,
    RATE_REFINEMENT_STEP,
    TRACE_TOLERANCE,
)

logger = logging.getLogger("rotodec.decoherence_rates")

DIAGONAL_RTOL = 1e-12
MIN_RATE_GRID_ORDER = 4


class RateMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC = "numeric"


@attrs.frozen
class GridMeta:
    grid_order: Optional[int] = None
    refined_order: Optional[int] = None
    drift: float = 0.0
    tolerance: Optional[float] = None


@attrs.frozen
class RateResult:
    rate: float = attrs.field()
    method: RateMethod
    grid_meta: GridMeta = attrs.field(factory=GridMeta)
    converged: bool = True

    @rate.validator
    def _check_rate(self, attribute, value) -> None:
        if not value >= 0:
            raise InvalidInputError(f"Decoherence rate must be non-negative, got {value!r}.")


def sin_squared(omega: float) -> float:
    """sin²ω evaluated on ω mod π, so it vanishes exactly at every multiple of π."""
    return math.sin(math.remainder(omega, math.pi)) ** 2


def _rate_prefactor(bath: ThermalBath) -> float:
    return 2.0 * bath.constants.c / (9.0 * bath.constants.epsilon_0**2)


def lambda_closed_form(bath: ThermalBath, alpha0: SymmetricTensor, omega: float) -> RateResult:
    if not alpha0.is_diagonal(rtol=DIAGONAL_RTOL):
        raise InvalidInputError(
            "The closed-form rate needs a diagonal polarizability; rotate the tensor to its principal axes first."
        )
    alpha_x, alpha_y, _ = alpha0.diagonal
    rate = (
        _rate_prefactor(bath)
        * photon_moment_closed(bath, 6)
        * (alpha_x - alpha_y) ** 2
        * sin_squared(omega)
    )
    return RateResult(rate, RateMethod.CLOSED_FORM)


def angular_delta_integral(
    alpha0: SymmetricTensor,
    omega: float,
    L: int,
    conv: PolarizationConvention = DEFAULT_CONVENTION,
    *,
    n_jobs: Optional[int] = None,
) -> float:
    """∫dk̂∫dp̂ delta_kernel on the order-L product grid."""
    delta = delta_polarizability(alpha0, omega)
    grid = build_sphere_grid(L)
    return integrate_product(
        [grid, grid],
        lambda k, p: delta_kernel_from_difference(k.xyz, p.xyz, delta, conv),
        n_jobs=n_jobs,
    )


def relative_drift(value: float, refined: float, scale: float = 0.0) -> float:
    denominator = max(abs(refined), scale)
    return 0.0 if denominator == 0.0 else abs(value - refined) / denominator


def lambda_numeric(
    bath: ThermalBath,
    alpha0: SymmetricTensor,
    omega: float,
    L: int = RATE_GRID_ORDER,
    conv: PolarizationConvention = DEFAULT_CONVENTION,
    *,
    n_jobs: Optional[int] = None,
) -> RateResult:
    """Λ = c·(1/8π)∫∫ Σ_pol|Δf|² · ∫ n·ρ(k) k⁴ dk / (4πε₀)², angular part checked at L + 4."""
    if L < MIN_RATE_GRID_ORDER:
        raise InvalidInputError(f"lambda_numeric needs grid order L >= {MIN_RATE_GRID_ORDER}, got {L}.")
    angular = angular_delta_integral(alpha0, omega, L, conv, n_jobs=n_jobs)
    refined_order = L + RATE_REFINEMENT_STEP
    refined = angular_delta_integral(alpha0, omega, refined_order, conv, n_jobs=n_jobs)
    drift = relative_drift(angular, refined)
    converged = drift <= RATE_DRIFT_TOLERANCE
    if not converged:
        logger.warning(f"Rate grid L={L} drifts {drift:.3e} against L={refined_order}")
    else:
        logger.debug(f"Rate grid L={L}: drift {drift:.3e} against L={refined_order}")

    constants = bath.constants
    rate = (
        constants.c
        * max(angular, 0.0)
        / (8.0 * math.pi)
        * weighted_moment(bath, 4)
        / (4.0 * math.pi * constants.epsilon_0) ** 2
    )
    meta = GridMeta(L, refined_order, drift, RATE_DRIFT_TOLERANCE)
    return RateResult(rate, RateMethod.NUMERIC, meta, converged)


def compute_rate(
    bath: ThermalBath,
    alpha0: SymmetricTensor,
    omega: float,
    method: RateMethod = RateMethod.CLOSED_FORM,
    L: int = RATE_GRID_ORDER,
    conv: PolarizationConvention = DEFAULT_CONVENTION,
    *,
    n_jobs: Optional[int] = None,
) -> RateResult:
    if method is RateMethod.NUMERIC:
        return lambda_numeric(bath, alpha0, omega, L, conv, n_jobs=n_jobs)
    return lambda_closed_form(bath, alpha0, omega)


def decoherence_time(bath: ThermalBath, alpha0: SymmetricTensor, omega: float) -> float:
    """1/Λ in seconds; math.inf when the configurations do not decohere."""
    rate = lambda_closed_form(bath, alpha0, omega).rate
    return math.inf if rate == 0.0 else 1.0 / rate


def _distinct_angles(angles: Sequence[float]) -> None:
    for i, a in enumerate(angles):
        for b in angles[i + 1 :]:
            if OrientationPair(a, b).omega == 0.0:
                raise InvalidInputError(f"Duplicate orientation angles {a!r} and {b!r}.")


def _frozen_matrix(matrix) -> np.ndarray:
    matrix = np.array(matrix, dtype=complex)
    matrix.setflags(write=False)
    return matrix


@attrs.frozen
class CoherenceGrid:
    """Density matrix ρ_S(α_i, α_j) over a discrete set of orientations about z."""

    angles: tuple[float, ...] = attrs.field(converter=lambda values: tuple(float(v) for v in values))
    matrix: np.ndarray = attrs.field(converter=_frozen_matrix, eq=False)

    def __attrs_post_init__(self) -> None:
        n = len(self.angles)
        if n < 1:
            raise InvalidInputError("A coherence grid needs at least one angle.")
        if self.matrix.shape != (n, n):
            raise InvalidInputError(f"Density matrix must be {n}x{n}, got {self.matrix.shape}.")
        if not np.all(np.isfinite(self.matrix)):
            raise InvalidInputError("Density matrix entries must be finite.")
        _distinct_angles(self.angles)
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > HERMITIAN_TOLERANCE:
            raise InvalidInputError("Density matrix is not Hermitian.")
        trace = np.trace(self.matrix).real
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise InvalidInputError(f"Density matrix must have unit trace, got {trace!r}.")

    @classmethod
    def prepare(cls, angles: Iterable[float], matrix) -> "CoherenceGrid":
        """Initial state; additionally checked for positive semidefiniteness."""
        grid = cls(angles, matrix)
        smallest = float(np.linalg.eigvalsh(grid.matrix)[0])
        if smallest < -PSD_TOLERANCE:
            raise InvalidInputError(
                f"Initial density matrix is not positive semidefinite (smallest eigenvalue {smallest:.3e})."
            )
        return grid

    @classmethod
    def superposition(cls, angles: Iterable[float], amplitudes: Optional[Iterable[complex]] = None) -> "CoherenceGrid":
        """Pure state Σ_i c_i|α_i⟩, equal weights by default."""
        angles = tuple(angles)
        psi = np.ones(len(angles), dtype=complex) if amplitudes is None else np.array(list(amplitudes), dtype=complex)
        if psi.shape != (len(angles),):
            raise InvalidInputError(f"Expected {len(angles)} amplitudes, got {psi.size}.")
        norm = float(np.linalg.norm(psi))
        if norm == 0.0:
            raise InvalidInputError("Superposition amplitudes must not all vanish.")
        psi = psi / norm
        return cls(angles, np.outer(psi, psi.conj()))


def coherence_rates(
    angles: Sequence[float],
    bath: ThermalBath,
    alpha0: SymmetricTensor,
    method: RateMethod = RateMethod.CLOSED_FORM,
    L: int = RATE_GRID_ORDER,
    conv: PolarizationConvention = DEFAULT_CONVENTION,
    *,
    n_jobs: Optional[int] = None,
) -> np.ndarray:
    """Symmetric matrix of Λ(α_i − α_j), zero on the diagonal."""
    n = len(angles)
    rates = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            result = compute_rate(bath, alpha0, angles[i] - angles[j], method, L, conv, n_jobs=n_jobs)
            if not result.converged:
                raise ConvergenceError(
                    f"Rate quadrature did not converge for angles {angles[i]!r} and {angles[j]!r}.",
                    drift=result.grid_meta.drift,
                )
            rates[i, j] = rates[j, i] = result.rate
    return rates


def evolve_with_rates(rho0: CoherenceGrid, rates: np.ndarray, t: float) -> CoherenceGrid:
    if not t >= 0:
        raise InvalidInputError(f"Evolution time must be non-negative, got {t!r}.")
    factors = np.exp(-rates * t)
    np.fill_diagonal(factors, 1.0)
    return CoherenceGrid(rho0.angles, rho0.matrix * factors)


def evolve_coherences(
    rho0: CoherenceGrid,
    bath: ThermalBath,
    alpha0: SymmetricTensor,
    t: float,
    method: RateMethod = RateMethod.CLOSED_FORM,
    *,
    L: int = RATE_GRID_ORDER,
    conv: PolarizationConvention = DEFAULT_CONVENTION,
    n_jobs: Optional[int] = None,
) -> CoherenceGrid:
    """ρ(α_i, α_j, t) = ρ(α_i, α_j, 0)·exp(−Λ(α_i − α_j)·t)."""
    rates = coherence_rates(rho0.angles, bath, alpha0, method, L, conv, n_jobs=n_jobs)
    return evolve_with_rates(rho0, rates, t)
