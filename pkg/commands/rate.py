import argparse
import math

from classes.app import Command, RotodecApp
from classes.csv_output import CsvTable, output_stream
from classes.decoherence_rates import decoherence_time, lambda_closed_form, lambda_numeric
from classes.errors import ConvergenceError
from classes.run_config import RunConfig

RATE_COLUMNS = (
    "T_K",
    "vol_x_m3",
    "vol_y_m3",
    "vol_z_m3",
    "omega_rad",
    "grid_order",
    "pol_convention",
    "lambda_closed_per_s",
    "lambda_numeric_per_s",
    "rel_diff",
    "decoherence_time_s",
)


def relative_difference(numeric: float, closed: float) -> float:
    if closed == 0.0:
        return 0.0 if numeric == 0.0 else math.inf
    return abs(numeric - closed) / closed


class Rate(Command):
    """Closed-form and numeric decoherence rate for one configuration."""

    name = "rate"
    help = "decoherence rate from the closed form and from quadrature"

    def invoke(self, args: argparse.Namespace, config: RunConfig) -> int:
        bath, tensor = config.bath, config.tensor
        closed = lambda_closed_form(bath, tensor, config.omega)
        numeric = lambda_numeric(bath, tensor, config.omega, config.grid_order, config.convention)
        if not numeric.converged:
            raise ConvergenceError(
                f"Rate quadrature at L={config.grid_order} did not converge.", drift=numeric.grid_meta.drift
            )
        table = CsvTable(RATE_COLUMNS)
        table.add(
            config.temperature,
            *config.alpha_volumes,
            config.omega,
            config.grid_order,
            config.convention.name,
            closed.rate,
            numeric.rate,
            relative_difference(numeric.rate, closed.rate),
            decoherence_time(bath, tensor, config.omega),
        )
        with output_stream(config.out) as stream:
            table.write(stream)
        self.app.log(f"Λ = {closed.rate!r} 1/s (closed form)", name="rotodec.rate")
        return 0


def setup(app: RotodecApp) -> None:
    app.add_command(Rate(app))
