import argparse
import sys

from classes.app import Command, RotodecApp
from classes.csv_output import output_stream
from classes.errors import VerificationError
from classes.run_config import RunConfig
from classes.verification import run_verification


class Verify(Command):
    """Runs the self-verification suite and prints one line per check."""

    name = "verify"
    help = "check every analytic identity and cross-method agreement"

    def invoke(self, args: argparse.Namespace, config: RunConfig) -> int:
        report = run_verification(config)
        sys.stdout.write(report.render(color=sys.stdout.isatty()))
        if config.out:
            with output_stream(config.out) as stream:
                report.table().write(stream)
        if not report.passed:
            raise VerificationError(report.failed)
        return 0


def setup(app: RotodecApp) -> None:
    app.add_command(Verify(app))
