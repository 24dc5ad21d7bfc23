"""
Thermal photon bath: Planck occupation and its moment integrals.

The density n and the normalised distribution μ(k) only ever appear as the
product n·ρ(k) = 4πk²·2/(e^{ħck/k_BT} − 1), so that product is the single
spectral object exposed here (SpectralWeight).
"""

import logging
import math

import attrs
import numpy as np
from scipy import integrate, optimize, special

from classes.core_types import CONSTANTS, PhysicalConstants
from classes.errors import ConvergenceError, InvalidInputError
from classes.special_functions import factorial, riemann_zeta_int
from constants.defaults import PLANCK_CUTOFF_X, PLANCK_RELTOL, PLANCK_RELTOL_FLOOR

logger = logging.getLogger("rotodec.planck_bath")

POLARIZATIONS = 2.0


@attrs.frozen
class ThermalBath:
    temperature: float = attrs.field(converter=float)
    constants: PhysicalConstants = attrs.field(default=CONSTANTS)

    @temperature.validator
    def _check_temperature(self, attribute, value) -> None:
        if not (value > 0 and math.isfinite(value)):
            raise InvalidInputError(f"Temperature must be positive and finite, got {value!r} K.")

    @property
    def thermal_wavenumber(self) -> float:
        """k_T = k_B T / (ħ c), in 1/m."""
        return self.constants.k_B * self.temperature / (self.constants.hbar * self.constants.c)

    def reduced(self, k):
        """Dimensionless photon energy x = ħck / k_BT."""
        return np.asarray(k, dtype=float) / self.thermal_wavenumber


def _check_wavenumber(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)):
        raise InvalidInputError("Wavenumber must be strictly positive.")
    return k


def occupation(bath: ThermalBath, k):
    """Two-polarization Planck occupation 2/(e^x − 1)."""
    x = bath.reduced(_check_wavenumber(k))
    with np.errstate(over="ignore"):
        values = POLARIZATIONS / np.expm1(x)
    return float(values) if values.ndim == 0 else values


@attrs.frozen
class SpectralWeight:
    """n·ρ(k) for a thermal photon gas, in 1/m⁴."""

    bath: ThermalBath

    def n_times_rho(self, k):
        k = _check_wavenumber(k)
        values = 4.0 * math.pi * k**2 * occupation(self.bath, k)
        return float(values) if np.ndim(values) == 0 else values

    __call__ = n_times_rho


def _check_order(n: int) -> int:
    if int(n) != n or n < 2:
        raise InvalidInputError(f"Photon moment order must be an integer >= 2, got {n}.")
    return int(n)


def photon_moment_closed(bath: ThermalBath, n: int) -> float:
    """M_n(T) = ∫₀^∞ kⁿ/(e^{ħck/k_BT} − 1) dk = n! ζ(n+1) k_T^{n+1}."""
    n = _check_order(n)
    # Single power of k_T keeps the 10^35-scale prefactor to one rounding.
    return factorial(n) * riemann_zeta_int(n + 1) * bath.thermal_wavenumber ** (n + 1)


def _bose_integrand(x: float, n: int) -> float:
    if x == 0.0:
        return 0.0
    return x**n / math.expm1(x)


def _bose_tail(n: int, cutoff: float) -> float:
    """∫_cutoff^∞ xⁿ e^{−x} dx; the e^{−2x} and later terms are below 1e-30 of the total."""
    return float(special.gamma(n + 1) * special.gammaincc(n + 1, cutoff))


def photon_moment_numeric(bath: ThermalBath, n: int, reltol: float = PLANCK_RELTOL) -> float:
    """Independent quadrature of M_n(T) in the reduced variable x = ħck/k_BT."""
    n = _check_order(n)
    if reltol < PLANCK_RELTOL_FLOOR:
        raise InvalidInputError(f"reltol must be >= {PLANCK_RELTOL_FLOOR}, got {reltol}.")
    value, abserr, info = integrate.quad(
        _bose_integrand,
        0.0,
        PLANCK_CUTOFF_X,
        args=(n,),
        epsabs=0.0,
        epsrel=0.1 * reltol,
        limit=200,
        full_output=True,
    )[:3]
    total = value + _bose_tail(n, PLANCK_CUTOFF_X)
    if abserr > reltol * total:
        raise ConvergenceError(
            f"Bose integral of order {n} did not converge (error estimate {abserr:.3e}).",
            drift=abserr / total,
        )
    logger.debug(f"Bose integral n={n}: {total!r} ({info['neval']} evaluations)")
    return total * bath.thermal_wavenumber ** (n + 1)


def spectral_peak(n: int) -> float:
    """Reduced energy x* where xⁿ/(eˣ − 1) peaks; root of n(1 − e^{−x}) = x."""
    n = _check_order(n)
    return float(optimize.brentq(lambda x: n * -math.expm1(-x) - x, 0.5, n + 1.0, xtol=1e-14))


def weighted_moment(bath: ThermalBath, power: int, numeric: bool = True) -> float:
    """∫ n·ρ(k) k^power dk = 4π·2·M_{power+2}(T)."""
    moment = photon_moment_numeric if numeric else photon_moment_closed
    return 4.0 * math.pi * POLARIZATIONS * moment(bath, power + 2)
