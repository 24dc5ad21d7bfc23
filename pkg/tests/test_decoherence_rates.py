import math
from decimal import Decimal, localcontext

import numpy as np
import pytest

from classes.core_types import CONSTANTS, PolarizabilityTensor, polarizability_from_volume
from classes.decoherence_rates import (
    CoherenceGrid,
    GridMeta,
    RateMethod,
    RateResult,
    angular_delta_integral,
    coherence_rates,
    compute_rate,
    decoherence_time,
    evolve_coherences,
    evolve_with_rates,
    lambda_closed_form,
    lambda_numeric,
    relative_drift,
    sin_squared,
)
from classes.errors import ConvergenceError, InvalidInputError
from classes.planck_bath import ThermalBath
from classes.scattering_model import PolarizationConvention
from conftest import random_diagonal, random_symmetric

PI = Decimal("3.14159265358979323846264338327950288")


def _canonical_rate_high_precision() -> float:
    """Closed-form rate at 300 K, volumes (1, 0.5, 0.5)e-25 m³, ω = π/2, in 40-digit decimal arithmetic."""
    with localcontext() as ctx:
        ctx.prec = 40
        c, hbar, k_b, eps0 = (Decimal(v) for v in (CONSTANTS.c, CONSTANTS.hbar, CONSTANTS.k_B, CONSTANTS.epsilon_0))
        n = 100
        zeta7 = sum(Decimal(1) / Decimal(k) ** 7 for k in range(1, n + 1))
        zeta7 += Decimal(1) / (6 * Decimal(n) ** 6) - Decimal(1) / (2 * Decimal(n) ** 7) + Decimal(7) / (12 * Decimal(n) ** 8)
        k_t = k_b * Decimal(300) / (hbar * c)
        d_alpha = 4 * PI * eps0 * Decimal("0.5e-25")
        rate = 2 * c / (9 * eps0**2) * 720 * zeta7 * k_t**7 * d_alpha**2
        return float(rate)


def test_canonical_rate_golden(bath, canonical_tensor):
    rate = lambda_closed_form(bath, canonical_tensor, math.pi / 2).rate
    assert rate == pytest.approx(_canonical_rate_high_precision(), rel=1e-13)
    assert rate == pytest.approx(1.265e-2, rel=1e-2)


def test_closed_form_zero_cases(bath, canonical_tensor):
    assert lambda_closed_form(bath, canonical_tensor, 0.0).rate == 0.0
    assert lambda_closed_form(bath, canonical_tensor, math.pi).rate == 0.0
    uniaxial = polarizability_from_volume((1e-25, 1e-25, 3e-25))
    assert lambda_closed_form(bath, uniaxial, 1.0).rate == 0.0


def test_closed_form_needs_diagonal_tensor(bath, rng):
    with pytest.raises(InvalidInputError):
        lambda_closed_form(bath, random_symmetric(rng, 1e-35), 1.0)


def test_sin_squared_is_exact_at_multiples_of_pi():
    for k in (-4, -2, -1, 0, 1, 2, 4):
        assert sin_squared(k * math.pi) == 0.0
    assert sin_squared(math.pi / 2) == 1.0


def test_temperature_scaling(canonical_tensor):
    for method in RateMethod:
        low = compute_rate(ThermalBath(150.0), canonical_tensor, 0.9, method).rate
        high = compute_rate(ThermalBath(300.0), canonical_tensor, 0.9, method).rate
        assert high / low == pytest.approx(128.0, rel=1e-12)


def test_angular_law(bath, canonical_tensor):
    reference = lambda_numeric(bath, canonical_tensor, math.pi / 2).rate
    for omega in (0.1, 0.5, 1.0, 1.4):
        ratio = lambda_numeric(bath, canonical_tensor, omega).rate / sin_squared(omega)
        assert ratio == pytest.approx(reference, rel=1e-10)


def test_periodicity_and_parity(bath, canonical_tensor):
    for method in RateMethod:
        for omega in (0.3, 1.2):
            rate = compute_rate(bath, canonical_tensor, omega, method).rate
            assert compute_rate(bath, canonical_tensor, omega + math.pi, method).rate == pytest.approx(rate, rel=1e-12)
            assert compute_rate(bath, canonical_tensor, -omega, method).rate == pytest.approx(rate, rel=1e-12)


def test_common_shift_of_transverse_polarizabilities(bath):
    base = polarizability_from_volume((1.0e-25, 0.5e-25, 0.5e-25))
    shifted = polarizability_from_volume((1.3e-25, 0.8e-25, 0.5e-25))
    for method in RateMethod:
        assert compute_rate(bath, shifted, 0.7, method).rate == pytest.approx(
            compute_rate(bath, base, 0.7, method).rate, rel=1e-12
        )


def test_numeric_matches_closed_form(bath, canonical_tensor, rng):
    closed = lambda_closed_form(bath, canonical_tensor, math.pi / 2).rate
    numeric = lambda_numeric(bath, canonical_tensor, math.pi / 2)
    assert numeric.rate == pytest.approx(closed, rel=1e-10)
    assert numeric.converged
    assert numeric.grid_meta.refined_order == 12
    for _ in range(5):
        tensor = random_diagonal(rng)
        other = ThermalBath(10.0 ** rng.uniform(math.log10(3.0), math.log10(3000.0)))
        omega = rng.uniform(0.0, math.pi)
        assert lambda_numeric(other, tensor, omega).rate == pytest.approx(
            lambda_closed_form(other, tensor, omega).rate, rel=1e-9
        )


def test_numeric_zero_cases(bath, canonical_tensor):
    assert lambda_numeric(bath, canonical_tensor, 0.0).rate == 0.0
    isotropic = polarizability_from_volume((1e-25, 1e-25, 1e-25))
    assert lambda_numeric(bath, isotropic, 1.0).rate == 0.0


def test_numeric_handles_rotated_principal_axes(bath, rng):
    tensor = random_symmetric(rng, 1e-35)
    rate = lambda_numeric(bath, tensor, 0.8)
    assert rate.rate > 0
    assert rate.converged


def test_mis_set_convention_shows_up_as_a_ratio(bath, canonical_tensor):
    closed = lambda_closed_form(bath, canonical_tensor, 1.0).rate
    summed = lambda_numeric(bath, canonical_tensor, 1.0, conv=PolarizationConvention.SUM_SUM).rate
    assert summed / closed == pytest.approx(4.0, rel=1e-10)


def test_numeric_grid_limits(bath, canonical_tensor):
    with pytest.raises(InvalidInputError):
        lambda_numeric(bath, canonical_tensor, 1.0, L=2)


def test_coarse_grid_drifts(canonical_tensor):
    coarse = angular_delta_integral(canonical_tensor, 1.0, 2)
    fine = angular_delta_integral(canonical_tensor, 1.0, 6)
    assert relative_drift(coarse, fine) > 1e-9
    assert relative_drift(angular_delta_integral(canonical_tensor, 1.0, 4), fine) <= 1e-12


def test_relative_drift():
    assert relative_drift(0.0, 0.0) == 0.0
    assert relative_drift(1.0, 2.0) == 0.5
    assert relative_drift(1.0, 0.0, scale=4.0) == 0.25


def test_rate_result_rejects_negative_rates():
    with pytest.raises(InvalidInputError):
        RateResult(-1.0, RateMethod.CLOSED_FORM)
    result = RateResult(0.0, RateMethod.NUMERIC)
    assert result.converged
    assert result.grid_meta == GridMeta()


def test_decoherence_time(bath, canonical_tensor):
    assert decoherence_time(bath, canonical_tensor, 0.0) == math.inf
    rate = lambda_closed_form(bath, canonical_tensor, 0.4).rate
    assert decoherence_time(bath, canonical_tensor, 0.4) == 1.0 / rate


def test_coherence_grid_validation():
    with pytest.raises(InvalidInputError):
        CoherenceGrid((0.0, 1.0), [[0.5, 0.2], [0.1, 0.5]])
    with pytest.raises(InvalidInputError):
        CoherenceGrid((0.0, 1.0), [[0.6, 0.0], [0.0, 0.6]])
    with pytest.raises(InvalidInputError):
        CoherenceGrid((0.0, 2.0 * math.pi), [[0.5, 0.0], [0.0, 0.5]])
    with pytest.raises(InvalidInputError):
        CoherenceGrid((0.0, 1.0), np.eye(3) / 3)
    with pytest.raises(InvalidInputError):
        CoherenceGrid.prepare((0.0, 1.0), [[0.5, 0.6], [0.6, 0.5]])
    grid = CoherenceGrid.prepare((0.0, 1.0), [[0.5, 0.5j], [-0.5j, 0.5]])
    assert not grid.matrix.flags.writeable


def test_superposition():
    grid = CoherenceGrid.superposition((0.0, 1.0))
    assert grid.matrix == pytest.approx(np.full((2, 2), 0.5), abs=1e-15)
    weighted = CoherenceGrid.superposition((0.0, 1.0, 2.0), (1.0, 1j, 0.0))
    assert np.trace(weighted.matrix).real == pytest.approx(1.0, abs=1e-15)
    assert weighted.matrix[0, 1] == pytest.approx(-0.5j, abs=1e-15)
    with pytest.raises(InvalidInputError):
        CoherenceGrid.superposition((0.0, 1.0), (0.0, 0.0))


def test_evolution_at_zero_time_is_identity(bath, canonical_tensor):
    rho0 = CoherenceGrid.superposition((0.0, 0.7, 1.9))
    assert np.array_equal(evolve_coherences(rho0, bath, canonical_tensor, 0.0).matrix, rho0.matrix)


def test_evolution_properties(bath, canonical_tensor, rng):
    angles = (0.0, 0.6, 1.5)
    amplitudes = rng.normal(size=3) + 1j * rng.normal(size=3)
    rho0 = CoherenceGrid.superposition(angles, amplitudes)
    later = evolve_coherences(rho0, bath, canonical_tensor, 50.0)
    assert np.array_equal(np.diag(later.matrix), np.diag(rho0.matrix))
    assert later.matrix == pytest.approx(later.matrix.conj().T, abs=1e-15)
    assert np.min(np.linalg.eigvalsh(later.matrix)) >= -1e-12
    rate = lambda_closed_form(bath, canonical_tensor, 0.6 - 1.5).rate
    assert abs(later.matrix[1, 2]) == pytest.approx(abs(rho0.matrix[1, 2]) * math.exp(-rate * 50.0), rel=1e-14)
    with pytest.raises(InvalidInputError):
        evolve_coherences(rho0, bath, canonical_tensor, -1.0)


def test_evolution_semigroup(bath, canonical_tensor):
    rho0 = CoherenceGrid.superposition((0.0, math.pi / 2))
    rates = coherence_rates(rho0.angles, bath, canonical_tensor)
    composed = evolve_with_rates(evolve_with_rates(rho0, rates, 3.0), rates, 5.0).matrix
    direct = evolve_with_rates(rho0, rates, 8.0).matrix
    assert np.max(np.abs(composed - direct)) <= 1e-15


def test_half_life(bath, canonical_tensor):
    rho0 = CoherenceGrid.superposition((0.0, math.pi / 2))
    rate = lambda_closed_form(bath, canonical_tensor, math.pi / 2).rate
    halved = evolve_coherences(rho0, bath, canonical_tensor, math.log(2.0) / rate)
    assert abs(halved.matrix[0, 1]) == pytest.approx(0.25, rel=1e-12)


def test_numeric_evolution_agrees(bath, canonical_tensor):
    rho0 = CoherenceGrid.superposition((0.0, 0.5, 1.0))
    closed = evolve_coherences(rho0, bath, canonical_tensor, 30.0)
    numeric = evolve_coherences(rho0, bath, canonical_tensor, 30.0, RateMethod.NUMERIC)
    assert numeric.matrix == pytest.approx(closed.matrix, rel=1e-10, abs=1e-15)


def test_coherence_rates_matrix(bath, canonical_tensor):
    angles = (0.0, 0.5, 1.0)
    rates = coherence_rates(angles, bath, canonical_tensor)
    assert np.array_equal(rates, rates.T)
    assert np.all(np.diag(rates) == 0.0)
    assert rates[0, 2] == lambda_closed_form(bath, canonical_tensor, -1.0).rate


def test_unconverged_numeric_coherence_rates_raise(bath, canonical_tensor, monkeypatch):
    monkeypatch.setattr("classes.decoherence_rates.RATE_DRIFT_TOLERANCE", -1.0)
    with pytest.raises(ConvergenceError) as excinfo:
        coherence_rates((0.0, 0.5), bath, canonical_tensor, RateMethod.NUMERIC, L=4)
    assert excinfo.value.drift >= 0.0
    assert coherence_rates((0.0, 0.5), bath, canonical_tensor)[0, 1] > 0.0
