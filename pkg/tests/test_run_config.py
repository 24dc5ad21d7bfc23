import json
import logging
import math
import os
import sys

import pytest

from classes.errors import InvalidInputError
from classes.run_config import RunConfig, ScanAxis, build_run_config
from classes.scattering_model import CrossTermRule, PolarizationConvention
from classes.utilities import load_config, resolve_workers, set_logging
from constants.defaults import ALPHA_VOLUMES_M3, THREADS_ENV


def test_defaults():
    config = build_run_config()
    assert config.temperature == 300.0
    assert config.alpha_volumes == ALPHA_VOLUMES_M3
    assert config.omega == math.pi / 2
    assert config.grid_order == 8
    assert config.convention is PolarizationConvention.AVG_AVG
    assert config.cross_rule is CrossTermRule.DYADIC
    assert config.scan_axis is ScanAxis.TEMPERATURE
    assert config.scan_range == (30.0, 300.0)
    assert config.out is None


def test_key_value_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# comment\n"
        "temp_K = 77   # liquid nitrogen\n"
        "alpha_vol_m3 = 2e-25, 1e-25, 1e-25\n"
        "\n"
        "pol_convention = sum_sum\n",
        encoding="utf-8",
    )
    values = load_config(str(path))
    assert values == {"temp_K": "77", "alpha_vol_m3": "2e-25, 1e-25, 1e-25", "pol_convention": "sum_sum"}
    config = build_run_config(values)
    assert config.temperature == 77.0
    assert config.alpha_volumes == (2e-25, 1e-25, 1e-25)
    assert config.convention is PolarizationConvention.SUM_SUM


def test_json_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"temp_K": 10, "alpha_vol_m3": [1e-25, 0.0, 0.0], "lmax": 2}), encoding="utf-8")
    config = build_run_config(load_config(str(path)))
    assert config.temperature == 10.0
    assert config.alpha_volumes == (1e-25, 0.0, 0.0)
    assert config.lmax == 2


@pytest.mark.parametrize(
    "text",
    ["temp_K = 1\ntemp_K = 2\n", "temp_K 300\n", "= 4\n"],
)
def test_malformed_files(tmp_path, text):
    path = tmp_path / "bad.conf"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(InvalidInputError):
        load_config(str(path))


def test_missing_and_invalid_json(tmp_path):
    with pytest.raises(InvalidInputError):
        load_config(str(tmp_path / "missing.conf"))
    path = tmp_path / "bad.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(InvalidInputError):
        load_config(str(path))
    path.write_text("{", encoding="utf-8")
    with pytest.raises(InvalidInputError):
        load_config(str(path))


def test_overrides_beat_file_values():
    config = build_run_config({"temp_K": "77", "omega_rad": "0.5"}, {"temperature": "4", "omega": None})
    assert config.temperature == 4.0
    assert config.omega == 0.5


def test_unknown_keys_are_rejected():
    with pytest.raises(InvalidInputError):
        build_run_config({"temperature": "300"})


@pytest.mark.parametrize(
    "overrides",
    [
        {"temperature": "-1"},
        {"temperature": "hot"},
        {"temperature": "inf"},
        {"alpha_volumes": "1e-25,1e-25"},
        {"alpha_volumes": "1e-25,-1e-25,0"},
        {"grid_order": "0"},
        {"grid_order": "2.5"},
        {"lmax": "7"},
        {"convention": "SUM"},
        {"cross_rule": "none"},
        {"scan_axis": "pressure"},
        {"scan_steps": "1"},
        {"times": "1,2"},
        {"times": "0,5,5"},
    ],
)
def test_invalid_values(overrides):
    with pytest.raises(InvalidInputError):
        build_run_config(overrides=overrides)


def test_empty_scan_range():
    config = build_run_config(overrides={"scan_axis": "omega", "scan_start": "1", "scan_stop": "1"})
    with pytest.raises(InvalidInputError):
        config.scan_range


def test_config_builds_physics_objects():
    config = RunConfig(temperature=77.0)
    assert config.bath.temperature == 77.0
    assert config.tensor.is_diagonal()


def test_resolve_workers(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_workers() == 3
    assert resolve_workers(2) == 2
    monkeypatch.setenv(THREADS_ENV, "0")
    assert resolve_workers() == (os.cpu_count() or 1)
    monkeypatch.delenv(THREADS_ENV)
    assert resolve_workers() == (os.cpu_count() or 1)
    monkeypatch.setenv(THREADS_ENV, "many")
    with pytest.raises(InvalidInputError):
        resolve_workers()
    with pytest.raises(InvalidInputError):
        resolve_workers(-1)


def test_set_logging(tmp_path):
    log_file = tmp_path / "rotodec.log"
    logger, console = set_logging(console_level=logging.WARNING, filename=str(log_file))
    assert console.stream is sys.stderr
    assert console.level == logging.WARNING
    assert len(logger.handlers) == 2
    logging.getLogger("rotodec.test").debug("only in the file")
    for handler in logger.handlers:
        handler.flush()
    assert "only in the file" in log_file.read_text(encoding="utf-8")
    logger, _ = set_logging()
    assert len(logger.handlers) == 1
