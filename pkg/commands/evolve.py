import argparse
import cmath
import json

import numpy as np

from classes.app import Command, RotodecApp
from classes.csv_output import CsvTable, output_stream
from classes.decoherence_rates import CoherenceGrid, RateMethod, coherence_rates, evolve_with_rates
from classes.errors import InvalidInputError
from classes.run_config import RunConfig


def load_state(path: str, angles: tuple[float, ...]) -> CoherenceGrid:
    """Initial density matrix from {"real": [[...]], "imag": [[...]]}; imag defaults to zero."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"Cannot read initial state '{path}': {e}") from None
    if not isinstance(data, dict) or "real" not in data:
        raise InvalidInputError(f"Initial state '{path}' needs a 'real' matrix.")
    try:
        real = np.array(data["real"], dtype=float)
        imag = np.array(data.get("imag", np.zeros_like(real)), dtype=float)
        matrix = real + 1j * imag
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"Initial state '{path}' is not a numeric matrix: {e}") from None
    return CoherenceGrid.prepare(angles, matrix)


class Evolve(Command):
    """Coherence trace ρ(α_i, α_j, t) under exponential rotational decoherence."""

    name = "evolve"
    help = "evolve orientation coherences in time"

    def configure(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--angles", dest="angles", metavar="A1,A2,...", help="orientations in rad")
        parser.add_argument("--times", dest="times", metavar="T0,T1,...", help="ascending times in s, from 0")
        parser.add_argument("--state", dest="state", metavar="PATH", help="JSON initial density matrix")
        parser.add_argument(
            "--method",
            choices=[method.value for method in RateMethod],
            default=RateMethod.CLOSED_FORM.value,
            help="rate evaluation (default: closed_form)",
        )

    def invoke(self, args: argparse.Namespace, config: RunConfig) -> int:
        if len(config.angles) < 2:
            raise InvalidInputError(f"evolve needs at least two angles, got {len(config.angles)}.")
        if config.state:
            rho0 = load_state(config.state, config.angles)
        else:
            rho0 = CoherenceGrid.superposition(config.angles)
        rates = coherence_rates(
            rho0.angles, config.bath, config.tensor, RateMethod(args.method), config.grid_order, config.convention
        )

        table = CsvTable(("t_s", "i", "j", "abs_rho", "arg_rho_rad"))
        n = len(rho0.angles)
        for t in config.times:
            matrix = evolve_with_rates(rho0, rates, t).matrix
            for i in range(n):
                for j in range(i, n):
                    value = complex(matrix[i, j])
                    table.add(t, i, j, abs(value), cmath.phase(value))
        with output_stream(config.out) as stream:
            table.write(stream)
        return 0


def setup(app: RotodecApp) -> None:
    app.add_command(Evolve(app))
