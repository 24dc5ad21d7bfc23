"""
Legendre functions, unit-normalised spherical harmonics, factorial and zeta.

Conventions:
  - assoc_legendre carries no Condon–Shortley phase; spherical_harmonic
    applies (-1)^m exactly once.
  - Y_lm = (-1)^m sqrt((2l+1)(l-m)! / (4π(l+m)!)) P_l^m(cos θ) e^{imφ},
    orthonormal over the sphere.
"""

import math

import attrs
import numpy as np
from scipy import special

from classes.core_types import UnitDirection
from classes.errors import FactorialOverflowError, HarmonicIndexError, InvalidInputError

DOMAIN_TOLERANCE = 1e-12
FACTORIAL_LIMIT = 170


@attrs.frozen
class SphericalHarmonicIndex:
    l: int = attrs.field(converter=int)
    m: int = attrs.field(converter=int)

    def __attrs_post_init__(self) -> None:
        if self.l < 0 or abs(self.m) > self.l:
            raise HarmonicIndexError(f"Invalid spherical harmonic index (l={self.l}, m={self.m}).")


def _check_argument(x):
    """Reject |x| > 1 beyond round-off, clamp the rest into [-1, 1]."""
    values = np.asarray(x, dtype=float)
    if np.any(np.abs(values) > 1.0 + DOMAIN_TOLERANCE):
        raise InvalidInputError("Legendre argument outside [-1, 1].")
    return np.clip(values, -1.0, 1.0)


def legendre_table(l_max: int, x) -> np.ndarray:
    """P_0(x) .. P_l_max(x) stacked along a new leading axis (Bonnet recurrence).

    No domain check; callers in the quadrature sweep pass cosines directly.
    """
    x = np.asarray(x, dtype=float)
    table = np.empty((l_max + 1,) + x.shape)
    table[0] = 1.0
    if l_max >= 1:
        table[1] = x
    for l in range(1, l_max):
        table[l + 1] = ((2 * l + 1) * x * table[l] - l * table[l - 1]) / (l + 1)
    return table


def legendre_p(l: int, x):
    """Legendre polynomial P_l(x); scalar in, float out."""
    if l < 0:
        raise HarmonicIndexError(f"Legendre degree must be non-negative, got {l}.")
    values = legendre_table(l, _check_argument(x))[l]
    return float(values) if values.ndim == 0 else values


def assoc_legendre(l: int, m: int, x):
    """Associated Legendre function P_l^m(x), 0 <= m <= l, without Condon–Shortley phase."""
    if m < 0 or l < 0:
        raise HarmonicIndexError(f"assoc_legendre needs 0 <= m <= l, got (l={l}, m={m}).")
    if m > l:
        raise HarmonicIndexError(f"Order m={m} exceeds degree l={l}.")
    # scipy's lpmv includes (-1)^m; strip it here so it is applied once in the harmonic.
    values = (-1.0) ** m * special.lpmv(m, l, _check_argument(x))
    return float(values) if np.ndim(values) == 0 else values


def factorial(n: int) -> float:
    if n < 0:
        raise InvalidInputError(f"factorial needs n >= 0, got {n}.")
    if n > FACTORIAL_LIMIT:
        raise FactorialOverflowError(f"{n}! overflows double precision.")
    return float(math.factorial(n))


def _normalization(l: int, m: int) -> float:
    return math.sqrt((2 * l + 1) / (4.0 * math.pi) * factorial(l - m) / factorial(l + m))


def spherical_harmonic_values(l: int, m: int, theta, phi) -> np.ndarray:
    """Y_lm on arrays of polar and azimuthal angles."""
    SphericalHarmonicIndex(l, m)
    order = abs(m)
    cos_theta = np.cos(np.asarray(theta, dtype=float))
    positive = (
        (-1.0) ** order
        * _normalization(l, order)
        * assoc_legendre(l, order, cos_theta)
        * np.exp(1j * order * np.asarray(phi, dtype=float))
    )
    if m >= 0:
        return positive
    # Y_{l,-m} = (-1)^m Y*_{l,m}
    return (-1.0) ** order * np.conj(positive)


def spherical_harmonic(idx: SphericalHarmonicIndex, d: UnitDirection) -> complex:
    return complex(spherical_harmonic_values(idx.l, idx.m, d.theta, d.phi))


def addition_theorem_lhs(l: int, d1: UnitDirection, d2: UnitDirection) -> float:
    """Σ_m Y_lm(d1) Y*_lm(d2), which equals (2l+1)/(4π) P_l(d1·d2)."""
    total = sum(
        spherical_harmonic(SphericalHarmonicIndex(l, m), d1)
        * spherical_harmonic(SphericalHarmonicIndex(l, m), d2).conjugate()
        for m in range(-l, l + 1)
    )
    return total.real


def riemann_zeta_int(s: int) -> float:
    if int(s) != s or s < 2:
        raise InvalidInputError(f"riemann_zeta_int needs an integer s >= 2, got {s}.")
    return float(special.zeta(int(s), 1))
