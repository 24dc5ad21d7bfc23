import math

import numpy as np
import pytest

from classes.core_types import PolarizabilityTensor, polarizability_from_volume
from classes.planck_bath import ThermalBath
from constants.defaults import ALPHA_VOLUMES_M3, TEMPERATURE_K


@pytest.fixture
def bath() -> ThermalBath:
    return ThermalBath(TEMPERATURE_K)


@pytest.fixture
def canonical_tensor() -> PolarizabilityTensor:
    return polarizability_from_volume(ALPHA_VOLUMES_M3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_unit_vectors(rng: np.random.Generator, count: int) -> np.ndarray:
    vectors = rng.normal(size=(count, 3))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def random_symmetric(rng: np.random.Generator, scale: float = 1.0) -> PolarizabilityTensor:
    """Positive definite, not diagonal."""
    a = rng.normal(size=(3, 3))
    return PolarizabilityTensor.symmetrized(scale * (a @ a.T + 0.1 * np.eye(3)))


def random_diagonal(rng: np.random.Generator) -> PolarizabilityTensor:
    volumes = 10.0 ** rng.uniform(math.log10(1e-27), math.log10(1e-24), size=3)
    return polarizability_from_volume(volumes)
