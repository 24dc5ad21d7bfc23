"""
Self-verification suite: every analytic identity and cross-method agreement the
library promises, measured and compared against its tolerance.

All random draws come from one numpy Generator seeded from the run config, and
every residual is computed with thread-count independent reductions, so the
report is byte-identical for any worker count.
"""

import logging
import math
from typing import Callable, Optional

import attrs
import numpy as np

from classes.ansi import Foreground, Format, paint
from classes.core_types import (
    PolarizabilityTensor,
    UnitDirection,
    polarizability_from_volume,
    rotate_direction_z,
)
from classes.csv_output import CsvTable
from classes.decoherence_rates import (
    CoherenceGrid,
    angular_delta_integral,
    evolve_coherences,
    lambda_closed_form,
    lambda_numeric,
    relative_drift,
    sin_squared,
)
from classes.errors import RotodecError
from classes.angular_quadrature import build_sphere_grid
from classes.partial_waves import build_table, default_grid_order, i11_closed, i_llprime
from classes.planck_bath import ThermalBath, photon_moment_closed, photon_moment_numeric
from classes.run_config import RunConfig
from classes.special_functions import (
    addition_theorem_lhs,
    legendre_p,
    riemann_zeta_int,
    spherical_harmonic_values,
)
from constants.defaults import (
    ALPHA_VOLUMES_M3,
    OMEGA_RAD,
    RATE_DRIFT_TOLERANCE,
    RATE_REFINEMENT_STEP,
    TEMPERATURE_K,
)

logger = logging.getLogger("rotodec.verification")

ZETA7_QUOTED = 1.00835
RANDOM_DRAWS = 20
HARMONIC_SAMPLES = 100
HARMONIC_LMAX = 6
SELECTION_LMAX = 3


@attrs.frozen
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""


@attrs.frozen
class VerificationReport:
    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failed(self) -> list[str]:
        return [result.name for result in self.results if not result.passed]

    def render(self, color: bool = False) -> str:
        lines = []
        for result in self.results:
            status = (
                paint("PASS", Foreground.GREEN, color)
                if result.passed
                else paint("FAIL", Format.BOLD + Foreground.RED, color)
            )
            line = f"{status}  {result.name:<28} residual={result.residual:.3e}  tolerance={result.tolerance:.1e}"
            if result.detail:
                line += f"  {result.detail}"
            lines.append(line)
        verdict = "all checks passed" if self.passed else f"{len(self.failed)} check(s) failed: {', '.join(self.failed)}"
        lines.append(verdict)
        return "\n".join(lines) + "\n"

    def table(self) -> CsvTable:
        table = CsvTable(("check", "residual", "tolerance", "passed"))
        for result in self.results:
            table.add(result.name, result.residual, result.tolerance, result.passed)
        return table


def _check(name: str, residual: float, tolerance: float, detail: str = "") -> CheckResult:
    return CheckResult(name, residual, tolerance, bool(residual <= tolerance), detail)


def _relative(value: float, reference: float) -> float:
    if reference == 0.0:
        return 0.0 if value == 0.0 else math.inf
    return abs(value - reference) / abs(reference)


@attrs.define
class VerificationSuite:
    config: RunConfig
    n_jobs: Optional[int] = None
    rng: np.random.Generator = attrs.field(init=False)
    point: tuple[ThermalBath, PolarizabilityTensor, float] = attrs.field(init=False)

    def __attrs_post_init__(self) -> None:
        self.rng = np.random.default_rng(self.config.seed)
        self.point = self._decohering_point()

    def _random_diagonal(self, low: float = 1e-27, high: float = 1e-24) -> PolarizabilityTensor:
        volumes = 10.0 ** self.rng.uniform(math.log10(low), math.log10(high), size=3)
        return polarizability_from_volume(volumes)

    def _random_direction(self) -> UnitDirection:
        return UnitDirection(math.acos(self.rng.uniform(-1.0, 1.0)), self.rng.uniform(0.0, 2.0 * math.pi))

    def closed_vs_numeric(self) -> CheckResult:
        residual, ratios = 0.0, []
        for _ in range(RANDOM_DRAWS):
            bath = ThermalBath(10.0 ** self.rng.uniform(math.log10(3.0), math.log10(3000.0)))
            tensor = self._random_diagonal()
            omega = self.rng.uniform(0.0, math.pi)
            closed = lambda_closed_form(bath, tensor, omega).rate
            numeric = lambda_numeric(bath, tensor, omega, self.config.grid_order, self.config.convention, n_jobs=self.n_jobs)
            if closed == 0.0:
                continue
            ratios.append(numeric.rate / closed)
            residual = max(residual, _relative(numeric.rate, closed))
        detail = f"numeric/closed ratio {np.mean(ratios):.6f}" if residual > 1e-9 and ratios else ""
        return _check("closed_vs_numeric", residual, 1e-9, detail)

    def _decohering_point(self) -> tuple[ThermalBath, PolarizabilityTensor, float]:
        """Configured bath, tensor and ω, or the canonical ones when the configured rate vanishes."""
        config = self.config
        if lambda_closed_form(config.bath, config.tensor, config.omega).rate > 0.0:
            return config.bath, config.tensor, config.omega
        logger.info("Configured rate is zero; rate-dependent checks use the canonical parameters")
        return ThermalBath(TEMPERATURE_K), polarizability_from_volume(ALPHA_VOLUMES_M3), OMEGA_RAD

    def rate_grid_convergence(self) -> CheckResult:
        _, tensor, omega = self.point
        L = self.config.grid_order
        refined_order = L + RATE_REFINEMENT_STEP
        value = angular_delta_integral(tensor, omega, L, self.config.convention, n_jobs=self.n_jobs)
        refined = angular_delta_integral(tensor, omega, refined_order, self.config.convention, n_jobs=self.n_jobs)
        return _check(
            "rate_grid_convergence", relative_drift(value, refined), RATE_DRIFT_TOLERANCE, f"L={L} vs L={refined_order}"
        )

    def partial_wave_selection(self) -> list[CheckResult]:
        config = self.config
        bath, tensor, omega = self.point
        table = build_table(
            SELECTION_LMAX,
            bath,
            tensor,
            omega,
            default_grid_order(SELECTION_LMAX),
            config.convention,
            config.cross_rule,
            n_jobs=self.n_jobs,
        )
        lambda_11 = table.entries[(1, 1)].rate
        others = max(abs(entry.rate) for pair, entry in table.entries.items() if pair != (1, 1))
        scale = abs(lambda_11) if lambda_11 != 0.0 else math.inf
        return [
            _check("selection_rule", others / scale, 1e-8),
            _check("lambda_00_zero", abs(table.entries[(0, 0)].rate) / scale, 1e-12),
            _check("lambda_11_equals_closed", _relative(lambda_11, table.closed_form), 1e-8,
                   f"ratio {table.ratio(lambda_11):.6f}"),
            _check("partial_wave_convergence", table.max_drift, 1e-8),
        ]

    def i11_reproduction(self) -> CheckResult:
        residual = 0.0
        for _ in range(5):
            tensor = self._random_diagonal()
            for omega in (0.0, math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2):
                quadrature = i_llprime(
                    1, 1, omega, 1.0, tensor, conv=self.config.convention, rule=self.config.cross_rule, n_jobs=self.n_jobs
                )
                residual = max(residual, _relative(quadrature, i11_closed(omega, 1.0, tensor)))
        return _check("i11_closed_form", residual, 1e-8)

    def temperature_law(self) -> CheckResult:
        temperatures = np.logspace(math.log10(30.0), math.log10(300.0), 11)
        _, tensor, omega = self.point
        residual = 0.0
        for rate_of in (
            lambda bath: lambda_closed_form(bath, tensor, omega).rate,
            lambda bath: lambda_numeric(bath, tensor, omega, max(self.config.grid_order, 4), self.config.convention,
                                        n_jobs=self.n_jobs).rate,
        ):
            rates = np.array([rate_of(ThermalBath(t)) for t in temperatures])
            slope = np.polyfit(np.log(temperatures), np.log(rates), 1)[0]
            residual = max(residual, abs(slope - 7.0))
        return _check("temperature_power_law", residual, 1e-6)

    def angular_law(self) -> list[CheckResult]:
        bath, tensor, _ = self.point
        L, conv = max(self.config.grid_order, 4), self.config.convention

        def rate(omega: float) -> float:
            return lambda_numeric(bath, tensor, omega, L, conv, n_jobs=self.n_jobs).rate

        omegas = np.arange(0.1, 1.55, 0.2)
        ratios = np.array([rate(omega) / sin_squared(omega) for omega in omegas])
        spread = (ratios.max() - ratios.min()) / abs(ratios.mean())
        mirror = max(_relative(rate(math.pi - omega), rate(omega)) for omega in omegas)
        return [_check("sin_squared_law", spread, 1e-10), _check("supplementary_symmetry", mirror, 1e-12)]

    def planck_moments(self) -> list[CheckResult]:
        bath = self.config.bath
        residual = max(
            _relative(photon_moment_numeric(bath, n), photon_moment_closed(bath, n)) for n in range(2, 9)
        )
        zeta = riemann_zeta_int(7)
        return [_check("planck_moments", residual, 1e-10), _check("zeta_7_quoted", abs(zeta - ZETA7_QUOTED), 5e-6)]

    def spherical_harmonics(self) -> list[CheckResult]:
        grid = build_sphere_grid(2 * HARMONIC_LMAX + 2)
        indices = [(l, m) for l in range(HARMONIC_LMAX + 1) for m in range(-l, l + 1)]
        values = np.array([spherical_harmonic_values(l, m, grid.theta, grid.phi) for l, m in indices])
        gram = (values * grid.weights) @ values.conj().T
        orthonormality = float(np.max(np.abs(gram - np.eye(len(indices)))))

        addition = 0.0
        for _ in range(HARMONIC_SAMPLES):
            d1, d2 = self._random_direction(), self._random_direction()
            cosine = float(np.clip(d1.cartesian @ d2.cartesian, -1.0, 1.0))
            for l in range(HARMONIC_LMAX + 1):
                expected = (2 * l + 1) / (4.0 * math.pi) * legendre_p(l, cosine)
                addition = max(addition, abs(addition_theorem_lhs(l, d1, d2) - expected))

        covariance = 0.0
        for _ in range(HARMONIC_SAMPLES):
            d = self._random_direction()
            angle = self.rng.uniform(-math.pi, math.pi)
            l = int(self.rng.integers(0, HARMONIC_LMAX + 1))
            m = int(self.rng.integers(-l, l + 1))
            rotated = rotate_direction_z(d, angle)
            lhs = spherical_harmonic_values(l, m, rotated.theta, rotated.phi)
            rhs = np.exp(-1j * m * angle) * spherical_harmonic_values(l, m, d.theta, d.phi)
            covariance = max(covariance, abs(complex(lhs - rhs)))
        return [
            _check("harmonic_orthonormality", orthonormality, 1e-12),
            _check("addition_theorem", addition, 1e-12),
            _check("rotation_covariance", covariance, 1e-12),
        ]

    def evolution(self) -> list[CheckResult]:
        bath, tensor, omega = self.point
        angles = (0.0, omega)
        rho0 = CoherenceGrid.superposition(angles)
        t1, t2 = 3.0, 5.0
        composed = evolve_coherences(evolve_coherences(rho0, bath, tensor, t1), bath, tensor, t2).matrix
        direct = evolve_coherences(rho0, bath, tensor, t1 + t2).matrix
        semigroup = float(np.max(np.abs(composed - direct)))

        diagonal = float(np.max(np.abs(np.diag(direct) - np.diag(rho0.matrix))))

        rate = lambda_closed_form(bath, tensor, angles[0] - angles[1]).rate
        halved = evolve_coherences(rho0, bath, tensor, math.log(2.0) / rate).matrix
        half_life = _relative(abs(halved[0, 1]), 0.5 * abs(rho0.matrix[0, 1]))
        return [
            _check("evolution_semigroup", semigroup, 1e-15),
            _check("evolution_diagonal", diagonal, 0.0),
            _check("evolution_half_life", half_life, 1e-12),
        ]

    def parallel_determinism(self) -> CheckResult:
        config = self.config
        totals = [
            build_table(1, config.bath, config.tensor, config.omega, conv=config.convention, rule=config.cross_rule,
                        n_jobs=workers).total()
            for workers in (1, 4, 8)
        ]
        mismatch = 0.0 if len(set(totals)) == 1 else max(abs(t - totals[0]) for t in totals)
        return _check("parallel_determinism", mismatch, 0.0)

    def checks(self) -> list[tuple[str, Callable[[], CheckResult | list[CheckResult]]]]:
        return [
            ("closed_vs_numeric", self.closed_vs_numeric),
            ("rate_grid_convergence", self.rate_grid_convergence),
            ("partial_wave_selection", self.partial_wave_selection),
            ("i11_closed_form", self.i11_reproduction),
            ("temperature_power_law", self.temperature_law),
            ("angular_law", self.angular_law),
            ("planck_moments", self.planck_moments),
            ("spherical_harmonics", self.spherical_harmonics),
            ("evolution", self.evolution),
            ("parallel_determinism", self.parallel_determinism),
        ]

    def run(self) -> VerificationReport:
        results: list[CheckResult] = []
        for name, check in self.checks():
            try:
                outcome = check()
            except RotodecError as error:
                logger.warning(f"Check {name} raised {type(error).__name__}: {error}")
                outcome = CheckResult(name, math.inf, 0.0, False, str(error))
            results.extend(outcome if isinstance(outcome, list) else [outcome])
            logger.debug(f"Check {name} done")
        return VerificationReport(tuple(results))


def run_verification(config: RunConfig, n_jobs: Optional[int] = None) -> VerificationReport:
    return VerificationSuite(config, n_jobs).run()
