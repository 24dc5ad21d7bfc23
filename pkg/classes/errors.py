class RotodecError(Exception):
    """Base class for every failure the command line maps to an exit code."""

    exit_code: int = 1
    default_message: str = "rotodec failed."

    def __init__(self, message: str | None = None) -> None:
        super().__init__(message or self.default_message)


class InvalidInputError(RotodecError, ValueError):
    """Raised when a precondition on user or caller input does not hold."""

    exit_code = 2
    default_message = "Invalid input."


class HarmonicIndexError(InvalidInputError, IndexError):
    """Raised for spherical-harmonic indices outside 0 <= |m| <= l."""

    default_message = "Spherical harmonic index out of range."


class FactorialOverflowError(InvalidInputError, OverflowError):
    """Raised when n! is not representable as a double."""

    default_message = "Factorial argument exceeds 170."


class ConvergenceError(RotodecError, ArithmeticError):
    """Raised when a quadrature does not reach the requested accuracy."""

    exit_code = 3
    default_message = "Numerical quadrature did not converge."

    def __init__(self, message: str | None = None, drift: float | None = None) -> None:
        super().__init__(message)
        self.drift = drift


class VerificationError(RotodecError):
    """Raised by `verify` when at least one check fails."""

    exit_code = 1
    default_message = "Verification failed."

    def __init__(self, failed: list[str]) -> None:
        super().__init__(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        self.failed = failed
