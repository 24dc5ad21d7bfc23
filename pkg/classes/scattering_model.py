"""
Induced-dipole scattering of photons off a polarizable particle.

The k⁴/(4πε₀)² prefactor of |f|² is left out of every kernel here and is
applied once by the callers that integrate over k.

Polarization bookkeeping: with the transverse projector sum
Σ_λ ξ_i ξ_j = δ_ij − k̂_i k̂_j, a plain double sum over incoming and outgoing
polarizations (SUM_SUM) gives four times the closed-form thermal rate. The
rate integral ∫∫ Tr[P_k Δα P_p Δα] dΩ_k dΩ_p = (8π/3)² · 2 (α_x−α_y)² sin²ω
combined with the 1/(8π) of the rate definition and the Planck moment
8π·6!ζ(7)k_T⁷ yields c(conv)·8/(9ε₀²) · 6!ζ(7)k_T⁷ (α_x−α_y)² sin²ω, so the
closed form is reproduced by averaging over both polarizations (AVG_AVG,
c = 1/4).
"""

import enum
import math

import attrs
import numpy as np

from classes.core_types import (
    CONSTANTS,
    PhysicalConstants,
    SymmetricTensor,
    UnitDirection,
    delta_polarizability,
)
from classes.errors import InvalidInputError

TRANSVERSALITY_TOLERANCE = 1e-12


class PolarizationConvention(enum.Enum):
    """(incoming, outgoing) polarization treatment and its kernel factor c(conv)."""

    SUM_SUM = 1.0
    AVG_SUM = 0.5
    AVG_AVG = 0.25

    @property
    def factor(self) -> float:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "PolarizationConvention":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise InvalidInputError(
                f"Unknown polarization convention {name!r}; expected one of {', '.join(cls.__members__)}."
            ) from None


DEFAULT_CONVENTION = PolarizationConvention.AVG_AVG


class CrossTermRule(enum.Enum):
    """How polarizations are carried through the four-direction partial-wave kernel.

    DYADIC pairs each amplitude with its own propagation dyad, k̂·A·p̂.
    TRANSVERSE attaches a transverse projector to every direction; it is even
    in each direction, so every odd-l channel vanishes under it.
    """

    DYADIC = "dyadic"
    TRANSVERSE = "transverse"

    @classmethod
    def parse(cls, name: str) -> "CrossTermRule":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise InvalidInputError(
                f"Unknown cross-term rule {name!r}; expected one of {', '.join(cls.__members__)}."
            ) from None


DEFAULT_CROSS_RULE = CrossTermRule.DYADIC


def _positive_wavenumber(instance, attribute, value) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise InvalidInputError(f"Wavenumber must be positive and finite, got {value!r}.")


@attrs.frozen
class ScatteringKernelInputs:
    k: float = attrs.field(converter=float, validator=_positive_wavenumber)
    k_out: UnitDirection
    k_in: UnitDirection
    tensor: SymmetricTensor
    constants: PhysicalConstants = CONSTANTS


def _as_vectors(direction) -> np.ndarray:
    if isinstance(direction, UnitDirection):
        return direction.cartesian
    vectors = np.asarray(direction, dtype=float)
    if vectors.shape[-1:] != (3,):
        raise InvalidInputError(f"Direction arrays must end in a length-3 axis, got {vectors.shape}.")
    return vectors


def _check_polarization(pol: np.ndarray, direction: np.ndarray, label: str) -> None:
    if abs(float(np.dot(pol, pol)) - 1.0) > TRANSVERSALITY_TOLERANCE:
        raise InvalidInputError(f"{label} polarization must be a unit vector.")
    if abs(float(np.dot(pol, direction))) > TRANSVERSALITY_TOLERANCE:
        raise InvalidInputError(f"{label} polarization is not transverse to its propagation direction.")


def amplitude(inputs: ScatteringKernelInputs, pol_out, pol_in) -> complex:
    """f = k²/(4πε₀) ξ′·α·ξ."""
    pol_out = np.asarray(pol_out, dtype=float)
    pol_in = np.asarray(pol_in, dtype=float)
    _check_polarization(pol_out, inputs.k_out.cartesian, "Outgoing")
    _check_polarization(pol_in, inputs.k_in.cartesian, "Incoming")
    prefactor = inputs.k**2 / (4.0 * math.pi * inputs.constants.epsilon_0)
    return complex(prefactor * float(pol_out @ inputs.tensor.matrix @ pol_in))


def polarization_basis(d: UnitDirection) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal (θ̂, φ̂) pair spanning the plane transverse to d."""
    st, ct = math.sin(d.theta), math.cos(d.theta)
    sp, cp = math.sin(d.phi), math.cos(d.phi)
    return np.array([ct * cp, ct * sp, -st]), np.array([-sp, cp, 0.0])


def transverse_projector(d) -> np.ndarray:
    """I − d̂d̂ᵀ; accepts a UnitDirection or an array of Cartesian vectors (..., 3)."""
    vectors = _as_vectors(d)
    return np.eye(3) - vectors[..., :, None] * vectors[..., None, :]


def _matrix(tensor) -> np.ndarray:
    return tensor.matrix if isinstance(tensor, SymmetricTensor) else np.asarray(tensor, dtype=float)


def delta_kernel_from_difference(k_out, p_in, delta, conv: PolarizationConvention = DEFAULT_CONVENTION):
    """c(conv)·Tr[P_k Δ P_p Δᵀ], expanded so it broadcasts over direction arrays."""
    k = _as_vectors(k_out)
    p = _as_vectors(p_in)
    delta = _matrix(delta)
    delta_p = p @ delta.T
    delta_t_k = k @ delta
    k_delta_p = np.sum(k * delta_p, axis=-1)
    values = conv.factor * (
        np.sum(delta * delta)
        - np.sum(delta_t_k * delta_t_k, axis=-1)
        - np.sum(delta_p * delta_p, axis=-1)
        + k_delta_p * k_delta_p
    )
    return float(values) if np.ndim(values) == 0 else values


def delta_kernel(
    k_out, p_in, alpha0: SymmetricTensor, omega: float, conv: PolarizationConvention = DEFAULT_CONVENTION
):
    """Polarization-summed |ξ′·(α₀ − α_ω)·ξ|² at one pair of directions, prefactor excluded."""
    return delta_kernel_from_difference(k_out, p_in, delta_polarizability(alpha0, omega), conv)


def cross_kernel(
    k1,
    p1,
    k2,
    p2,
    tensor_a,
    tensor_b,
    conv: PolarizationConvention = DEFAULT_CONVENTION,
    rule: CrossTermRule = DEFAULT_CROSS_RULE,
):
    """Polarization-reduced f*(k1, p1) f(k2, p2), prefactor excluded.

    Arguments broadcast against each other when given as Cartesian arrays.
    """
    k1, p1, k2, p2 = (_as_vectors(d) for d in (k1, p1, k2, p2))
    a, b = _matrix(tensor_a), _matrix(tensor_b)
    if rule is CrossTermRule.DYADIC:
        first = np.sum((k1 @ a) * p1, axis=-1)
        second = np.sum((k2 @ b) * p2, axis=-1)
        values = 4.0 * conv.factor * first * second
    else:
        left = transverse_projector(k1) @ a @ transverse_projector(p1)
        right = transverse_projector(p2) @ b.T @ transverse_projector(k2)
        values = conv.factor * np.einsum("...ij,...ji->...", left, right)
    return float(values) if np.ndim(values) == 0 else values
