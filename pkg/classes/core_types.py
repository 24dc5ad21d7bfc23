"""
Physical constants and the geometric value types shared by every module.

All quantities are SI. Every type is a frozen attrs class, so instances can be
shared between worker threads without copying.
"""

import math
from typing import Iterable

import attrs
import numpy as np
from scipy import constants as codata

from classes.errors import InvalidInputError

TWO_PI = 2.0 * math.pi
SYMMETRY_TOLERANCE = 1e-12


def _positive(instance, attribute, value) -> None:
    if not value > 0:
        raise InvalidInputError(f"{attribute.name} must be strictly positive, got {value!r}.")


@attrs.frozen
class PhysicalConstants:
    """CODATA values as shipped with scipy.constants."""

    c: float = attrs.field(default=codata.c, validator=_positive)
    hbar: float = attrs.field(default=codata.hbar, validator=_positive)
    k_B: float = attrs.field(default=codata.k, validator=_positive)
    epsilon_0: float = attrs.field(default=codata.epsilon_0, validator=_positive)


CONSTANTS = PhysicalConstants()


def _as_rows(value: Iterable) -> tuple[tuple[float, float, float], ...]:
    matrix = np.asarray(value, dtype=float)
    if matrix.shape != (3, 3):
        raise InvalidInputError(f"Expected a 3x3 tensor, got shape {matrix.shape}.")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError("Tensor components must be finite.")
    return tuple(tuple(float(x) for x in row) for row in matrix)


@attrs.frozen
class SymmetricTensor:
    """A real symmetric 3x3 tensor, stored row by row."""

    components: tuple[tuple[float, float, float], ...] = attrs.field(converter=_as_rows)

    @components.validator
    def _check_symmetric(self, attribute, value) -> None:
        for i in range(3):
            for j in range(i + 1, 3):
                if value[i][j] != value[j][i]:
                    raise InvalidInputError(
                        f"Tensor is not symmetric: T[{i}][{j}]={value[i][j]!r}, T[{j}][{i}]={value[j][i]!r}."
                    )

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.components)

    @property
    def diagonal(self) -> tuple[float, float, float]:
        return tuple(self.components[i][i] for i in range(3))

    def is_diagonal(self, rtol: float = 0.0) -> bool:
        """True when every off-diagonal entry is within rtol of the largest entry."""
        scale = max(abs(x) for row in self.components for x in row)
        return all(
            abs(self.components[i][j]) <= rtol * scale
            for i in range(3)
            for j in range(3)
            if i != j
        )

    def frobenius_squared(self) -> float:
        return float(np.sum(self.matrix**2))

    @classmethod
    def symmetrized(cls, matrix: np.ndarray):
        """Build from a matrix that is symmetric up to round-off."""
        matrix = np.asarray(matrix, dtype=float)
        return cls(0.5 * (matrix + matrix.T))


@attrs.frozen
class PolarizabilityTensor(SymmetricTensor):
    """Electric polarizability (C·m²/V); physical tensors have non-negative eigenvalues."""

    def __attrs_post_init__(self) -> None:
        eigenvalues = np.linalg.eigvalsh(self.matrix)
        scale = max(float(np.max(np.abs(eigenvalues))), np.finfo(float).tiny)
        if eigenvalues[0] < -SYMMETRY_TOLERANCE * scale:
            raise InvalidInputError(
                f"Polarizability must be positive semidefinite, smallest eigenvalue {eigenvalues[0]:.3e}."
            )

    @classmethod
    def from_diagonal(cls, alpha_x: float, alpha_y: float, alpha_z: float) -> "PolarizabilityTensor":
        return cls(np.diag([alpha_x, alpha_y, alpha_z]))


def _reduce_omega(value: float) -> float:
    omega = math.remainder(value, TWO_PI)
    return math.pi if omega == -math.pi else omega


def _wrap_phi(value: float) -> float:
    phi = float(value) % TWO_PI
    # x % 2π can round up to 2π for tiny negative x.
    return 0.0 if phi >= TWO_PI else phi


@attrs.frozen
class OrientationPair:
    """Two superposed orientations about z."""

    alpha: float = attrs.field(converter=float)
    alpha_prime: float = attrs.field(converter=float)

    @property
    def omega(self) -> float:
        """alpha - alpha_prime reduced to (-π, π]."""
        return _reduce_omega(self.alpha - self.alpha_prime)


@attrs.frozen
class UnitDirection:
    """A point on the unit sphere, polar angle theta and azimuth phi."""

    theta: float = attrs.field(converter=float)
    phi: float = attrs.field(converter=_wrap_phi)

    @theta.validator
    def _check_theta(self, attribute, value) -> None:
        if not 0.0 <= value <= math.pi:
            raise InvalidInputError(f"theta must lie in [0, pi], got {value!r}.")

    @property
    def cartesian(self) -> np.ndarray:
        sin_theta = math.sin(self.theta)
        return np.array(
            [sin_theta * math.cos(self.phi), sin_theta * math.sin(self.phi), math.cos(self.theta)]
        )

    @classmethod
    def from_vector(cls, vector: Iterable[float]) -> "UnitDirection":
        x, y, z = (float(v) for v in vector)
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0.0:
            raise InvalidInputError("Cannot take the direction of a zero vector.")
        theta = math.acos(max(-1.0, min(1.0, z / norm)))
        return cls(theta, math.atan2(y, x))


def rotation_matrix_z(omega: float) -> np.ndarray:
    """Active right-handed rotation by omega about z: x̂ -> cos ω x̂ + sin ω ŷ."""
    c, s = math.cos(omega), math.sin(omega)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotate_polarizability(alpha0: SymmetricTensor, omega: float) -> SymmetricTensor:
    """α_ω = R_zᵀ(ω) α₀ R_z(ω)."""
    rotation = rotation_matrix_z(omega)
    rotated = rotation.T @ alpha0.matrix @ rotation
    return type(alpha0).symmetrized(rotated)


def delta_polarizability(alpha0: SymmetricTensor, omega: float) -> SymmetricTensor:
    """Δα = α₀ − α_ω, evaluated as R_zᵀ[R_z, α₀].

    The commutator form is exactly zero when α_x = α_y or ω = 0.
    """
    rotation = rotation_matrix_z(omega)
    matrix = alpha0.matrix
    difference = rotation.T @ (rotation @ matrix - matrix @ rotation)
    return SymmetricTensor.symmetrized(difference)


def rotate_direction_z(d: UnitDirection, alpha: float) -> UnitDirection:
    """Direction after a rotation by alpha about z, phi -> phi - alpha.

    With this sign Y_lm(rotate_direction_z(d, α)) = exp(-imα) Y_lm(d).
    """
    return UnitDirection(d.theta, d.phi - alpha)


def polarizability_from_volume(
    volumes: Iterable[float], constants: PhysicalConstants = CONSTANTS
) -> PolarizabilityTensor:
    """α = 4πε₀·v per principal axis."""
    volumes = tuple(float(v) for v in volumes)
    if len(volumes) != 3:
        raise InvalidInputError(f"Expected three polarizability volumes, got {len(volumes)}.")
    if any(v < 0 for v in volumes):
        raise InvalidInputError(f"Polarizability volumes must be non-negative, got {volumes}.")
    factor = 4.0 * math.pi * constants.epsilon_0
    return PolarizabilityTensor.from_diagonal(*(factor * v for v in volumes))
