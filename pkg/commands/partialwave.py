import argparse

from classes.app import Command, RotodecApp
from classes.csv_output import CsvTable, output_stream
from classes.errors import ConvergenceError
from classes.partial_waves import build_table, default_grid_order
from classes.run_config import RunConfig


class PartialWave(Command):
    """Table of Λ_ll′ for 0 <= l, l′ <= lmax with shell and total sums."""

    name = "partialwave"
    help = "partial-wave contributions to the rate"

    def invoke(self, args: argparse.Namespace, config: RunConfig) -> int:
        grid_order = max(config.grid_order, default_grid_order(config.lmax))
        table = build_table(
            config.lmax,
            config.bath,
            config.tensor,
            config.omega,
            grid_order,
            config.convention,
            config.cross_rule,
        )
        if not table.converged:
            raise ConvergenceError(
                f"Partial-wave quadrature at L={grid_order} did not converge.", drift=table.max_drift
            )

        output = CsvTable(("l", "l_prime", "lambda_per_s", "ratio_to_closed", "drift"))
        for (l, l_prime), entry in sorted(table.entries.items()):
            output.add(l, l_prime, entry.rate, table.ratio(entry.rate), entry.drift)
        for shell, value in table.shell_sums().items():
            output.add("shell", shell, value, table.ratio(value), "")
        output.add("total", config.lmax, table.total(), table.ratio_to_closed(), table.max_drift)

        with output_stream(config.out) as stream:
            output.write(stream)
        self.app.log(
            f"Σ Λ_ll′ up to l={config.lmax}: {table.total()!r} 1/s, closed form {table.closed_form!r} 1/s",
            name="rotodec.partialwave",
        )
        return 0


def setup(app: RotodecApp) -> None:
    app.add_command(PartialWave(app))
