import json
import logging
import os
import sys
from importlib import import_module
from os.path import abspath, dirname, exists, join
from typing import TYPE_CHECKING, Optional

from classes.errors import InvalidInputError
from constants.defaults import THREADS_ENV

if TYPE_CHECKING:
    from classes.app import RotodecApp

root_directory = dirname(dirname(abspath(__file__)))
config_directory = join(root_directory, "config")
commands_directory = join(root_directory, "commands")
LOG_FORMAT = "[{asctime}] [{levelname:<8}] {name}: {message}"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"


def _parse_key_values(path: str, text: str) -> dict:
    config = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise InvalidInputError(f"{path}:{number}: expected 'key=value', got {raw.strip()!r}.")
        key = key.strip()
        if key in config:
            raise InvalidInputError(f"{path}:{number}: duplicate key {key!r}.")
        config[key] = value.strip()
    return config


def load_config(path: str) -> dict:
    """Read a key=value config file, or a flat JSON object when the path ends in .json."""
    if not exists(path):
        raise InvalidInputError(f"Config file '{path}' not found.")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    if not path.endswith(".json"):
        return _parse_key_values(path, text)
    try:
        config = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path}: invalid JSON ({e}).") from None
    if not isinstance(config, dict):
        raise InvalidInputError(f"{path}: expected a JSON object at top level.")
    return config


def commands_manager(app: "RotodecApp", mode: str, commands: list[str]) -> None:
    for command in commands:
        if mode == "load":
            import_module(command).setup(app)
        elif mode == "unload":
            app.remove_command(command.rsplit(".", 1)[-1])
        else:
            raise ValueError("Invalid mode.")
        app.log(f"Command module {command} {mode}ed.", name="rotodec.utilities", level=logging.DEBUG)


def resolve_workers(n_jobs: Optional[int] = None) -> int:
    """Worker count for joblib: explicit n_jobs, else ROTODEC_THREADS, else all cores."""
    if n_jobs is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            n_jobs = int(raw)
        except ValueError:
            raise InvalidInputError(f"{THREADS_ENV} must be an integer, got {raw!r}.") from None
    if n_jobs < 0:
        raise InvalidInputError(f"Worker count must be >= 0, got {n_jobs}.")
    return n_jobs or (os.cpu_count() or 1)


def set_logging(
    file_level: int = logging.DEBUG,
    console_level: int = logging.INFO,
    filename: Optional[str] = None,
) -> tuple[logging.Logger, logging.StreamHandler]:
    """Sets up the rotodec logger; the console handler writes to stderr."""
    from classes.app import UTCFormatter

    logger = logging.getLogger("rotodec")
    logger.setLevel(logging.DEBUG)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    log_formatter = UTCFormatter(fmt=LOG_FORMAT, datefmt=LOG_DATEFMT, style="{")

    # File-logs
    if filename:
        file_handler = logging.FileHandler(filename=filename, encoding="utf-8", mode="w")
        file_handler.setFormatter(log_formatter)
        file_handler.setLevel(file_level)
        logger.addHandler(file_handler)

    # Console-logs
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(log_formatter)
    console_handler.setLevel(console_level)
    logger.addHandler(console_handler)

    return logger, console_handler
