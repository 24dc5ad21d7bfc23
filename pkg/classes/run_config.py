"""
Run configuration: built-in defaults, overridden by a config file, overridden by flags.
"""

import enum
import math
from typing import Any, Optional

import attrs

from classes.core_types import PolarizabilityTensor, polarizability_from_volume
from classes.errors import InvalidInputError
from classes.planck_bath import ThermalBath
from classes.scattering_model import (
    DEFAULT_CONVENTION,
    DEFAULT_CROSS_RULE,
    CrossTermRule,
    PolarizationConvention,
)
from constants.defaults import (
    ALPHA_VOLUMES_M3,
    EVOLVE_ANGLES_RAD,
    EVOLVE_TIMES_S,
    GRID_ORDER_MAX,
    GRID_ORDER_MIN,
    LMAX,
    LMAX_LIMIT,
    OMEGA_RAD,
    RATE_GRID_ORDER,
    SCAN_RANGES,
    SCAN_STEPS,
    TEMPERATURE_K,
    VERIFY_SEED,
)


class ScanAxis(enum.Enum):
    TEMPERATURE = "T_K"
    OMEGA = "omega_rad"
    ANISOTROPY = "delta_vol_m3"

    @classmethod
    def parse(cls, name: str) -> "ScanAxis":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise InvalidInputError(
                f"Unknown scan axis {name!r}; expected one of {', '.join(cls.__members__)}."
            ) from None


def _float(value: Any) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise InvalidInputError(f"Expected a number, got {value!r}.") from None
    if not math.isfinite(number):
        raise InvalidInputError(f"Expected a finite number, got {value!r}.")
    return number


def _int(value: Any) -> int:
    number = _float(value)
    if number != int(number):
        raise InvalidInputError(f"Expected an integer, got {value!r}.")
    return int(number)


def _floats(value: Any) -> tuple[float, ...]:
    if isinstance(value, str):
        value = [part for part in value.replace(" ", "").split(",") if part]
    if not isinstance(value, (list, tuple)):
        raise InvalidInputError(f"Expected a comma-separated list of numbers, got {value!r}.")
    return tuple(_float(v) for v in value)


def _optional_float(value: Any) -> Optional[float]:
    return None if value is None else _float(value)


def _optional_str(value: Any) -> Optional[str]:
    return None if value in (None, "") else str(value)


def _convention(value: Any) -> PolarizationConvention:
    return value if isinstance(value, PolarizationConvention) else PolarizationConvention.parse(str(value))


def _cross_rule(value: Any) -> CrossTermRule:
    return value if isinstance(value, CrossTermRule) else CrossTermRule.parse(str(value))


def _scan_axis(value: Any) -> ScanAxis:
    return value if isinstance(value, ScanAxis) else ScanAxis.parse(str(value))


def _positive(instance, attribute, value) -> None:
    if not value > 0:
        raise InvalidInputError(f"{attribute.name} must be strictly positive, got {value!r}.")


def _in_range(low: int, high: int):
    def check(instance, attribute, value) -> None:
        if not low <= value <= high:
            raise InvalidInputError(f"{attribute.name} must lie in [{low}, {high}], got {value}.")

    return check


@attrs.frozen
class RunConfig:
    temperature: float = attrs.field(default=TEMPERATURE_K, converter=_float, validator=_positive)
    alpha_volumes: tuple[float, ...] = attrs.field(default=ALPHA_VOLUMES_M3, converter=_floats)
    omega: float = attrs.field(default=OMEGA_RAD, converter=_float)
    grid_order: int = attrs.field(
        default=RATE_GRID_ORDER, converter=_int, validator=_in_range(GRID_ORDER_MIN, GRID_ORDER_MAX)
    )
    convention: PolarizationConvention = attrs.field(default=DEFAULT_CONVENTION, converter=_convention)
    cross_rule: CrossTermRule = attrs.field(default=DEFAULT_CROSS_RULE, converter=_cross_rule)
    lmax: int = attrs.field(default=LMAX, converter=_int, validator=_in_range(0, LMAX_LIMIT))
    scan_axis: ScanAxis = attrs.field(default=ScanAxis.TEMPERATURE, converter=_scan_axis)
    scan_start: Optional[float] = attrs.field(default=None, converter=_optional_float)
    scan_stop: Optional[float] = attrs.field(default=None, converter=_optional_float)
    scan_steps: int = attrs.field(default=SCAN_STEPS, converter=_int)
    angles: tuple[float, ...] = attrs.field(default=EVOLVE_ANGLES_RAD, converter=_floats)
    times: tuple[float, ...] = attrs.field(default=EVOLVE_TIMES_S, converter=_floats)
    seed: int = attrs.field(default=VERIFY_SEED, converter=_int)
    out: Optional[str] = attrs.field(default=None, converter=_optional_str)
    state: Optional[str] = attrs.field(default=None, converter=_optional_str)

    @alpha_volumes.validator
    def _check_volumes(self, attribute, value) -> None:
        if len(value) != 3 or any(v < 0 for v in value):
            raise InvalidInputError(f"alpha_vol_m3 needs three non-negative volumes, got {value}.")

    @scan_steps.validator
    def _check_steps(self, attribute, value) -> None:
        if value < 2:
            raise InvalidInputError(f"scan_steps must be >= 2, got {value}.")

    @times.validator
    def _check_times(self, attribute, value) -> None:
        if not value or value[0] != 0.0:
            raise InvalidInputError("times must start at 0.")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise InvalidInputError(f"times must be strictly ascending, got {value}.")

    @property
    def bath(self) -> ThermalBath:
        return ThermalBath(self.temperature)

    @property
    def tensor(self) -> PolarizabilityTensor:
        return polarizability_from_volume(self.alpha_volumes)

    @property
    def scan_range(self) -> tuple[float, float]:
        start, stop = SCAN_RANGES[self.scan_axis.name]
        start = start if self.scan_start is None else self.scan_start
        stop = stop if self.scan_stop is None else self.scan_stop
        if start == stop:
            raise InvalidInputError(f"Scan range is empty: start = stop = {start}.")
        return start, stop


# config-file key -> RunConfig field
CONFIG_KEYS = {
    "temp_K": "temperature",
    "alpha_vol_m3": "alpha_volumes",
    "omega_rad": "omega",
    "grid_order": "grid_order",
    "pol_convention": "convention",
    "cross_rule": "cross_rule",
    "lmax": "lmax",
    "scan_axis": "scan_axis",
    "scan_start": "scan_start",
    "scan_stop": "scan_stop",
    "scan_steps": "scan_steps",
    "angles": "angles",
    "times": "times",
    "seed": "seed",
    "out": "out",
    "state": "state",
}


def build_run_config(file_values: Optional[dict] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Merge defaults < config file < command-line overrides (None means 'not given')."""
    unknown = sorted(set(file_values or {}) - set(CONFIG_KEYS))
    if unknown:
        raise InvalidInputError(f"Unknown config key(s): {', '.join(unknown)}.")
    fields = {CONFIG_KEYS[key]: value for key, value in (file_values or {}).items()}
    fields.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return RunConfig(**fields)
