import argparse
import logging

import numpy as np

from classes.app import Command, RotodecApp
from classes.core_types import PolarizabilityTensor, polarizability_from_volume
from classes.csv_output import CsvTable, output_stream
from classes.decoherence_rates import lambda_closed_form, lambda_numeric
from classes.errors import ConvergenceError, VerificationError
from classes.planck_bath import ThermalBath
from classes.run_config import RunConfig, ScanAxis
from commands.rate import relative_difference

TEMPERATURE_SLOPE = 7.0
SLOPE_TOLERANCE = 1e-6


def scan_values(config: RunConfig) -> np.ndarray:
    start, stop = config.scan_range
    if config.scan_axis is ScanAxis.TEMPERATURE:
        return np.geomspace(start, stop, config.scan_steps)
    return np.linspace(start, stop, config.scan_steps)


def log_log_slope(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


class Scan(Command):
    """Rate along one axis: temperature, orientation difference or anisotropy α_x − α_y."""

    name = "scan"
    help = "sweep the rate over temperature, omega or anisotropy"

    def configure(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--axis", dest="scan_axis", metavar="AXIS", help="TEMPERATURE, OMEGA or ANISOTROPY")
        parser.add_argument("--start", dest="scan_start", metavar="X", help="first grid value")
        parser.add_argument("--stop", dest="scan_stop", metavar="X", help="last grid value")
        parser.add_argument("--steps", dest="scan_steps", metavar="N", help="number of grid points (>= 2)")

    def _point(self, config: RunConfig, value: float) -> tuple[ThermalBath, PolarizabilityTensor, float]:
        bath, tensor, omega = config.bath, config.tensor, config.omega
        if config.scan_axis is ScanAxis.TEMPERATURE:
            bath = ThermalBath(value)
        elif config.scan_axis is ScanAxis.OMEGA:
            omega = value
        else:
            _, vol_y, vol_z = config.alpha_volumes
            tensor = polarizability_from_volume((vol_y + value, vol_y, vol_z))
        return bath, tensor, omega

    def invoke(self, args: argparse.Namespace, config: RunConfig) -> int:
        axis = config.scan_axis
        table = CsvTable((axis.value, "lambda_closed_per_s", "lambda_numeric_per_s", "rel_diff"))
        closed_rates, numeric_rates = [], []
        for value in scan_values(config):
            bath, tensor, omega = self._point(config, float(value))
            closed = lambda_closed_form(bath, tensor, omega).rate
            numeric = lambda_numeric(bath, tensor, omega, config.grid_order, config.convention)
            if not numeric.converged:
                raise ConvergenceError(
                    f"Rate quadrature did not converge at {axis.value}={value!r}.", drift=numeric.grid_meta.drift
                )
            closed_rates.append(closed)
            numeric_rates.append(numeric.rate)
            table.add(float(value), closed, numeric.rate, relative_difference(numeric.rate, closed))

        slope_missed = False
        if axis is ScanAxis.TEMPERATURE and all(rate > 0 for rate in closed_rates + numeric_rates):
            temperatures = scan_values(config)
            slopes = (
                log_log_slope(temperatures, np.array(closed_rates)),
                log_log_slope(temperatures, np.array(numeric_rates)),
            )
            deviation = max(abs(slope - TEMPERATURE_SLOPE) for slope in slopes)
            table.add("slope", *slopes, deviation)
            slope_missed = deviation > SLOPE_TOLERANCE
            level = logging.WARNING if slope_missed else logging.INFO
            self.app.log(f"log-log temperature slope {slopes[0]:.9f}", name="rotodec.scan", level=level)

        with output_stream(config.out) as stream:
            table.write(stream)
        if slope_missed:
            raise VerificationError(["temperature_power_law"])
        return 0


def setup(app: RotodecApp) -> None:
    app.add_command(Scan(app))
