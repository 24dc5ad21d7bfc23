"""
Partial-wave decomposition Λ = Σ_{l,l′} Λ_ll′ of the rotational decoherence rate.

I_ll′(ω) = (2l+1)(2l′+1)/(4π)² ∫dk̂′dp̂′dk̂″dp̂″ P_l(cos γ′) P_l′(cos γ) f*(k′,p′) f(k″,p″),
with ω entering only through cos(φ′ − φ″ + ω) in both angles. The m-sums are
never formed; the addition theorem has already folded them into P_l.

The 8-dimensional integral is swept with k̂′ as the outer node and
(p̂′, k̂″, p̂″) broadcast on the inner axes. For every outer node the kernel is
evaluated once and every requested (l, l′) reuses it; each pair is reduced
with the same array expression whether it is computed alone or as part of a
table, so both paths agree bit for bit.
"""

import logging
import math
from typing import Callable, Iterable, Optional

import attrs
import numpy as np

from classes.angular_quadrature import NodeBlock, build_sphere_grid, sweep_product
from classes.core_types import CONSTANTS, SymmetricTensor
from classes.decoherence_rates import lambda_closed_form, relative_drift, sin_squared
from classes.errors import HarmonicIndexError, InvalidInputError
from classes.planck_bath import ThermalBath, weighted_moment
from classes.scattering_model import (
    DEFAULT_CONVENTION,
    DEFAULT_CROSS_RULE,
    CrossTermRule,
    PolarizationConvention,
    cross_kernel,
)
from classes.special_functions import legendre_table
from constants.defaults import (
    K_QUADRATURE_ORDER,
    LMAX_LIMIT,
    PARTIAL_WAVE_DRIFT_TOLERANCE,
    PARTIAL_WAVE_REFINEMENT_STEP,
)

logger = logging.getLogger("rotodec.partial_waves")

Pair = tuple[int, int]


def default_grid_order(l_max: int) -> int:
    return 2 * l_max + 4


def _check_degrees(l: int, l_prime: int) -> None:
    for degree in (l, l_prime):
        if int(degree) != degree or not 0 <= degree <= LMAX_LIMIT:
            raise HarmonicIndexError(f"Partial-wave degree must be an integer in [0, {LMAX_LIMIT}], got {degree}.")


def _check_grid_order(L: int, l_max: int) -> None:
    if L < default_grid_order(l_max):
        raise InvalidInputError(
            f"Grid order L={L} under-resolves degree {l_max}; need L >= {default_grid_order(l_max)}."
        )


def _cos_between(theta_a, phi_a, theta_b, phi_b, omega: float):
    return np.cos(theta_a) * np.cos(theta_b) + np.sin(theta_a) * np.sin(theta_b) * np.cos(phi_a - phi_b + omega)


def _angular_sums(
    pairs: Iterable[Pair],
    omegas: tuple[float, ...],
    tensor: SymmetricTensor,
    L: int,
    conv: PolarizationConvention,
    rule: CrossTermRule,
    n_jobs: Optional[int],
) -> dict[tuple[int, int, int], float]:
    """Raw integrals ∫ P_l(cos γ′) P_l′(cos γ) K over the four spheres, keyed (ω-index, l, l′)."""
    pairs = sorted(set(pairs))
    l_max = max(max(pair) for pair in pairs)
    rows = sorted({l for l, _ in pairs})
    size = l_max + 1
    matrix = tensor.matrix
    grid = build_sphere_grid(L)

    def _chunk(k_out: NodeBlock, inner: list[NodeBlock], weights: np.ndarray) -> np.ndarray:
        p_in, k_out2, p_in2 = inner
        kernel = cross_kernel(k_out.xyz, p_in.xyz, k_out2.xyz, p_in2.xyz, matrix, matrix, conv, rule)
        weighted_kernel = kernel * weights
        sums = np.zeros((len(omegas), size, size))
        for index, omega in enumerate(omegas):
            legendre_k = legendre_table(
                l_max, _cos_between(k_out.theta, k_out.phi, k_out2.theta, k_out2.phi, omega)
            )
            legendre_p = legendre_table(
                l_max, _cos_between(p_in.theta, p_in.phi, p_in2.theta, p_in2.phi, omega)
            )
            for l in rows:
                partial = legendre_k[l] * weighted_kernel
                for l_a, l_prime in pairs:
                    if l_a == l:
                        sums[index, l, l_prime] = np.sum(partial * legendre_p[l_prime])
        return sums

    totals = sweep_product([grid, grid, grid, grid], _chunk, n_jobs=n_jobs)
    logger.debug(f"Partial-wave sweep L={L}: {len(pairs)} pair(s) x {len(omegas)} angle(s)")
    return {
        (index, l, l_prime): float(totals[index, l, l_prime])
        for index in range(len(omegas))
        for l, l_prime in pairs
    }


def _prefactor(l: int, l_prime: int, k: float, epsilon_0: float) -> float:
    return (2 * l + 1) * (2 * l_prime + 1) / (4.0 * math.pi) ** 2 * k**4 / (4.0 * math.pi * epsilon_0) ** 2


def i_llprime(
    l: int,
    l_prime: int,
    omega: float,
    k: float,
    tensor: SymmetricTensor,
    L: Optional[int] = None,
    conv: PolarizationConvention = DEFAULT_CONVENTION,
    rule: CrossTermRule = DEFAULT_CROSS_RULE,
    *,
    epsilon_0: Optional[float] = None,
    n_jobs: Optional[int] = None,
) -> float:
    """I_ll′(ω) at wavenumber k, in m⁴·(C·m²/V)²/ε₀² units of the dipole amplitude squared."""
    _check_degrees(l, l_prime)
    if not k > 0:
        raise InvalidInputError(f"Wavenumber must be strictly positive, got {k!r}.")
    L = default_grid_order(max(l, l_prime)) if L is None else L
    _check_grid_order(L, max(l, l_prime))
    epsilon_0 = CONSTANTS.epsilon_0 if epsilon_0 is None else epsilon_0
    raw = _angular_sums([(l, l_prime)], (omega,), tensor, L, conv, rule, n_jobs)[(0, l, l_prime)]
    return _prefactor(l, l_prime, k, epsilon_0) * raw


def i11_closed(omega: float, k: float, tensor: SymmetricTensor, epsilon_0: Optional[float] = None) -> float:
    """I₁₁(ω) = k⁴/(9ε₀²)·(α_x² + α_y² + α_z² − sin²ω (α_x − α_y)²)."""
    if not tensor.is_diagonal(rtol=1e-12):
        raise InvalidInputError("i11_closed needs a diagonal polarizability.")
    epsilon_0 = CONSTANTS.epsilon_0 if epsilon_0 is None else epsilon_0
    alpha_x, alpha_y, alpha_z = tensor.diagonal
    return k**4 / (9.0 * epsilon_0**2) * (
        alpha_x**2 + alpha_y**2 + alpha_z**2 - sin_squared(omega) * (alpha_x - alpha_y) ** 2
    )


@attrs.frozen
class PartialWaveEntry:
    l: int
    l_prime: int
    i_zero: float
    """I_ll′(0) at k = 1/m."""
    i_omega: float
    """I_ll′(ω) at k = 1/m."""
    rate: float
    """Λ_ll′ in 1/s."""
    drift: float = 0.0
    converged: bool = True


@attrs.frozen
class PartialWaveTable:
    l_max: int
    omega: float
    bath: ThermalBath
    tensor: SymmetricTensor
    entries: dict[Pair, PartialWaveEntry] = attrs.field(eq=False)
    closed_form: float
    grid_order: int
    convention: PolarizationConvention = DEFAULT_CONVENTION
    cross_rule: CrossTermRule = DEFAULT_CROSS_RULE

    @property
    def converged(self) -> bool:
        return all(entry.converged for entry in self.entries.values())

    @property
    def max_drift(self) -> float:
        return max(entry.drift for entry in self.entries.values())

    def total(self) -> float:
        return math.fsum(entry.rate for entry in self.entries.values())

    def shell_sums(self) -> dict[int, float]:
        """Partial sums grouped by s = max(l, l′): Λ₀₀, then Λ₀₁+Λ₁₀+Λ₁₁, and so on."""
        shells: dict[int, list[float]] = {s: [] for s in range(self.l_max + 1)}
        for (l, l_prime), entry in sorted(self.entries.items()):
            shells[max(l, l_prime)].append(entry.rate)
        return {s: math.fsum(rates) for s, rates in shells.items()}

    def ratio(self, value: float) -> float:
        return math.nan if self.closed_form == 0.0 else value / self.closed_form

    def ratio_to_closed(self) -> float:
        return self.ratio(self.total())


def _rate_from_difference(bath: ThermalBath, difference_at_unit_k: float) -> float:
    """c ∫ dk n·ρ(k)/(4π) k⁴ ΔI(k=1)."""
    return bath.constants.c / (4.0 * math.pi) * weighted_moment(bath, 4) * difference_at_unit_k


def _rate_by_k_quadrature(
    bath: ThermalBath,
    difference_at: Callable[[float], float],
    order: int = K_QUADRATURE_ORDER,
) -> float:
    """c ∫ dk n·ρ(k)/(4π) ΔI(k) by Gauss–Laguerre in x = ħck/k_BT."""
    nodes, weights = np.polynomial.laguerre.laggauss(order)
    k_t = bath.thermal_wavenumber
    # e^x / (e^x − 1) = −1/expm1(−x)
    terms = [
        weight * 2.0 * k_t**3 * x**2 / -math.expm1(-x) * difference_at(k_t * x)
        for x, weight in zip(nodes, weights)
    ]
    return bath.constants.c * math.fsum(terms)


def _entry_scale(tensor: SymmetricTensor, epsilon_0: float) -> float:
    return tensor.frobenius_squared() / (9.0 * epsilon_0**2)


def _build_entries(
    pairs: list[Pair],
    bath: ThermalBath,
    tensor: SymmetricTensor,
    omega: float,
    L: int,
    conv: PolarizationConvention,
    rule: CrossTermRule,
    n_jobs: Optional[int],
) -> dict[Pair, PartialWaveEntry]:
    epsilon_0 = bath.constants.epsilon_0
    omegas = (0.0, omega)
    sums = _angular_sums(pairs, omegas, tensor, L, conv, rule, n_jobs)
    refined_order = L + PARTIAL_WAVE_REFINEMENT_STEP
    refined = _angular_sums(pairs, omegas, tensor, refined_order, conv, rule, n_jobs)
    scale = _entry_scale(tensor, epsilon_0)

    entries = {}
    for l, l_prime in pairs:
        prefactor = _prefactor(l, l_prime, 1.0, epsilon_0)
        i_zero, i_omega = (prefactor * sums[(index, l, l_prime)] for index in range(2))
        drift = max(
            relative_drift(prefactor * sums[(index, l, l_prime)], prefactor * refined[(index, l, l_prime)], scale)
            for index in range(2)
        )
        converged = drift <= PARTIAL_WAVE_DRIFT_TOLERANCE
        if not converged:
            logger.warning(f"I_{l}{l_prime} drifts {drift:.3e} between L={L} and L={refined_order}")
        rate = _rate_from_difference(bath, i_zero - i_omega)
        entries[(l, l_prime)] = PartialWaveEntry(l, l_prime, i_zero, i_omega, rate, drift, converged)
    return entries


def lambda_llprime(
    l: int,
    l_prime: int,
    bath: ThermalBath,
    tensor: SymmetricTensor,
    omega: float,
    L: Optional[int] = None,
    conv: PolarizationConvention = DEFAULT_CONVENTION,
    rule: CrossTermRule = DEFAULT_CROSS_RULE,
    *,
    separable: bool = True,
    n_jobs: Optional[int] = None,
) -> PartialWaveEntry:
    """Λ_ll′ = c ∫dk n·ρ(k)/(4π) (I_ll′(0) − I_ll′(ω)).

    The dipole I_ll′ scales as k⁴, so by default the angular part is computed
    once at k = 1/m and multiplied by the k⁴-weighted Planck moment. With
    separable=False the k-integral is done by quadrature, evaluating the
    angular integrals afresh at every node.
    """
    _check_degrees(l, l_prime)
    L = default_grid_order(max(l, l_prime)) if L is None else L
    _check_grid_order(L, max(l, l_prime))
    entry = _build_entries([(l, l_prime)], bath, tensor, omega, L, conv, rule, n_jobs)[(l, l_prime)]
    if separable:
        return entry

    epsilon_0 = bath.constants.epsilon_0

    def difference_at(k: float) -> float:
        return i_llprime(l, l_prime, 0.0, k, tensor, L, conv, rule, epsilon_0=epsilon_0, n_jobs=n_jobs) - i_llprime(
            l, l_prime, omega, k, tensor, L, conv, rule, epsilon_0=epsilon_0, n_jobs=n_jobs
        )

    rate = _rate_by_k_quadrature(bath, difference_at)
    return attrs.evolve(entry, rate=rate)


def build_table(
    l_max: int,
    bath: ThermalBath,
    tensor: SymmetricTensor,
    omega: float,
    L: Optional[int] = None,
    conv: PolarizationConvention = DEFAULT_CONVENTION,
    rule: CrossTermRule = DEFAULT_CROSS_RULE,
    *,
    n_jobs: Optional[int] = None,
) -> PartialWaveTable:
    """All Λ_ll′ for 0 <= l, l′ <= l_max from one shared sweep."""
    _check_degrees(l_max, l_max)
    L = default_grid_order(l_max) if L is None else L
    _check_grid_order(L, l_max)
    pairs = [(l, l_prime) for l in range(l_max + 1) for l_prime in range(l_max + 1)]
    entries = _build_entries(pairs, bath, tensor, omega, L, conv, rule, n_jobs)
    closed_form = lambda_closed_form(bath, tensor, omega).rate if tensor.is_diagonal(rtol=1e-12) else math.nan
    table = PartialWaveTable(l_max, omega, bath, tensor, entries, closed_form, L, conv, rule)
    logger.debug(f"Partial-wave table l_max={l_max}: total {table.total()!r}, closed form {closed_form!r}")
    return table
