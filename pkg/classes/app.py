import argparse
import logging
from datetime import datetime, timezone
from logging import INFO as LOG_INFO
from logging import Formatter, Logger
from typing import Callable, Optional

import attrs

from classes.run_config import RunConfig, build_run_config
from classes.utilities import load_config, set_logging


class UTCFormatter(Formatter):
    def formatTime(self, record, datefmt=None):
        dt = datetime.fromtimestamp(record.created, tz=timezone.utc)
        if datefmt:
            return dt.strftime(datefmt)
        return dt.isoformat()


RUN_CONFIG_FIELDS = tuple(field.name for field in attrs.fields(RunConfig))


class Command:
    """A sub-command; subclasses register themselves from their module's `setup(app)`."""

    name: str = ""
    help: str = ""

    def __init__(self, app: "RotodecApp") -> None:
        self.app = app

    def configure(self, parser: argparse.ArgumentParser) -> None:
        """Add command-specific flags; dest names match RunConfig fields where they override one."""

    def invoke(self, args: argparse.Namespace, config: RunConfig) -> int:
        raise NotImplementedError


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    physics = common.add_argument_group("configuration")
    physics.add_argument("--config", metavar="PATH", help="key=value (or .json) file; flags override it")
    physics.add_argument("--temp-K", dest="temperature", metavar="T", help="bath temperature in K")
    physics.add_argument("--alpha-vol-m3", dest="alpha_volumes", metavar="VX,VY,VZ",
                         help="principal polarizability volumes in m^3")
    physics.add_argument("--omega-rad", dest="omega", metavar="RAD", help="orientation difference in rad")
    physics.add_argument("--grid-order", dest="grid_order", metavar="L", help="sphere-grid band limit")
    physics.add_argument("--pol-convention", dest="convention", metavar="MODE",
                         help="SUM_SUM, AVG_SUM or AVG_AVG")
    physics.add_argument("--cross-rule", dest="cross_rule", metavar="RULE", help="DYADIC or TRANSVERSE")
    physics.add_argument("--lmax", dest="lmax", metavar="N", help="largest partial-wave degree")
    physics.add_argument("--seed", dest="seed", metavar="N", help="seed for randomised checks")
    physics.add_argument("--out", dest="out", metavar="PATH", help="CSV output file (default: stdout)")
    logs = common.add_argument_group("logging")
    verbosity = logs.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug output on stderr")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    logs.add_argument("--log-file", metavar="PATH", help="also write a debug log to PATH")
    return common


class RotodecApp:
    """Command-line application hosting the sub-command registry."""

    config: dict
    """The raw values loaded from '--config'."""

    logger: Logger
    """Logging Object of the application."""

    commands: dict[str, Command]
    """Registered sub-commands by name."""

    error_handler: Optional[Callable[[BaseException], int]] = None
    """Maps an exception raised by a command to an exit status."""

    def __init__(self, **kwargs) -> None:
        """Initialize the application.

        Parameters
        ----------
        prog : str
            Program name shown in usage messages.
        description : str
            Help text shown above the sub-command list.
        """
        self.prog = kwargs.pop("prog", "rotodec")
        self.description = kwargs.pop("description", None)
        if kwargs:
            raise TypeError(f"Unexpected arguments: {', '.join(kwargs)}")
        self.config = {}
        self.commands = {}
        self.logger = logging.getLogger("rotodec")

    def add_command(self, command: Command) -> None:
        if command.name in self.commands:
            raise ValueError(f"Command {command.name!r} is already registered.")
        self.commands[command.name] = command

    def remove_command(self, name: str) -> None:
        self.commands.pop(name, None)

    def set_error_handler(self, handler: Callable[[BaseException], int]) -> None:
        self.error_handler = handler

    def log(self, message: str, name: str, level: int = LOG_INFO, **kwargs) -> None:
        """Log a message to the console and the log file.

        Parameters
        ----------
        message : str
            The message to log.
        name : str
            The name of the logger, below 'rotodec'.
        level : int
            The level of the log message.
        """
        logging.getLogger(name).log(level, message, **kwargs)

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog=self.prog, description=self.description)
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
        common = _common_options()
        for name, command in self.commands.items():
            subparser = subparsers.add_parser(name, help=command.help, description=command.help, parents=[common])
            command.configure(subparser)
        return parser

    def run(self, argv: Optional[list[str]] = None) -> int:
        """Parse argv, run the selected command and return its exit status."""
        parser = self.build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exit:
            return exit.code if isinstance(exit.code, int) else 0

        console_level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
        self.logger, _ = set_logging(file_level=logging.DEBUG, console_level=console_level, filename=args.log_file)
        command = self.commands[args.command]
        try:
            self.config = load_config(args.config) if args.config else {}
            overrides = {field: getattr(args, field) for field in RUN_CONFIG_FIELDS if hasattr(args, field)}
            config = build_run_config(self.config, overrides)
            self.log(f"Running {command.name} with {config}", name="rotodec.app", level=logging.DEBUG)
            return command.invoke(args, config)
        except BaseException as error:
            if self.error_handler is None:
                raise
            return self.error_handler(error)
