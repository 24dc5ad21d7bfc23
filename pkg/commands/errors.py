from logging import CRITICAL as LOG_CRITICAL
from logging import ERROR as LOG_ERROR
from typing import NoReturn

from classes.app import RotodecApp
from classes.errors import RotodecError


class Errors:
    """Errors handler for every command."""

    def __init__(self, app: RotodecApp) -> None:
        self.app = app
        app.set_error_handler(self.handle)

    def trace_error(self, level: str, error: BaseException) -> NoReturn:
        self.app.log(
            message=type(error).__name__,
            name=f"rotodec.{level}",
            level=LOG_CRITICAL,
            exc_info=error,
        )

        raise error

    def handle(self, error: BaseException) -> int:
        """Exit status for a known error; anything else is traced and re-raised."""
        if isinstance(error, RotodecError):
            self.app.log(
                message=f"{type(error).__name__}: {error}",
                name="rotodec.errors",
                level=LOG_ERROR,
            )
            return error.exit_code
        self.trace_error("internal", error)


def setup(app: RotodecApp) -> None:
    Errors(app)
