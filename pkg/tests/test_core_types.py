import math

import numpy as np
import pytest
from scipy import constants as codata

from classes.core_types import (
    CONSTANTS,
    OrientationPair,
    PhysicalConstants,
    PolarizabilityTensor,
    SymmetricTensor,
    UnitDirection,
    delta_polarizability,
    polarizability_from_volume,
    rotate_direction_z,
    rotate_polarizability,
    rotation_matrix_z,
)
from classes.errors import InvalidInputError
from conftest import random_symmetric


def test_constants_are_codata():
    assert CONSTANTS.c == codata.c
    assert CONSTANTS.hbar == codata.hbar
    assert CONSTANTS.k_B == codata.k
    assert CONSTANTS.epsilon_0 == codata.epsilon_0


@pytest.mark.parametrize("field", ["c", "hbar", "k_B", "epsilon_0"])
def test_constants_must_be_positive(field):
    with pytest.raises(InvalidInputError):
        PhysicalConstants(**{field: 0.0})


def test_tensor_rejects_asymmetric_and_bad_shape():
    with pytest.raises(InvalidInputError):
        SymmetricTensor([[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(InvalidInputError):
        SymmetricTensor(np.eye(2))
    with pytest.raises(InvalidInputError):
        SymmetricTensor(np.diag([1.0, math.nan, 1.0]))


def test_polarizability_must_be_positive_semidefinite():
    PolarizabilityTensor.from_diagonal(1.0, 0.0, 0.5)
    with pytest.raises(InvalidInputError):
        PolarizabilityTensor.from_diagonal(1.0, -0.5, 0.5)


def test_is_diagonal_tolerance():
    tensor = SymmetricTensor([[1.0, 1e-14, 0.0], [1e-14, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert not tensor.is_diagonal()
    assert tensor.is_diagonal(rtol=1e-12)


def test_polarizability_from_volume():
    tensor = polarizability_from_volume((1.0e-25, 0.5e-25, 0.5e-25))
    factor = 4.0 * math.pi * codata.epsilon_0
    assert tensor.diagonal == (factor * 1.0e-25, factor * 0.5e-25, factor * 0.5e-25)
    with pytest.raises(InvalidInputError):
        polarizability_from_volume((1.0, 2.0))
    with pytest.raises(InvalidInputError):
        polarizability_from_volume((1.0, -2.0, 1.0))


def test_rotation_by_zero_is_identity():
    tensor = PolarizabilityTensor.from_diagonal(3.0, 2.0, 1.0)
    assert rotate_polarizability(tensor, 0.0).matrix == pytest.approx(tensor.matrix, abs=0.0)


def test_quarter_turn_swaps_x_and_y():
    tensor = PolarizabilityTensor.from_diagonal(3.0, 2.0, 1.0)
    rotated = rotate_polarizability(tensor, math.pi / 2).matrix
    assert rotated == pytest.approx(np.diag([2.0, 3.0, 1.0]), abs=1e-15)


def test_uniaxial_about_z_is_invariant():
    tensor = PolarizabilityTensor.from_diagonal(2.0, 2.0, 5.0)
    for omega in (0.3, 1.1, 2.9):
        assert rotate_polarizability(tensor, omega).matrix == pytest.approx(tensor.matrix, rel=1e-15, abs=1e-15)
        assert not np.any(delta_polarizability(tensor, omega).matrix)


def test_rotation_preserves_invariants(rng):
    for _ in range(10):
        tensor = random_symmetric(rng)
        omega = rng.uniform(-math.pi, math.pi)
        rotated = rotate_polarizability(tensor, omega).matrix
        assert np.trace(rotated) == pytest.approx(np.trace(tensor.matrix), rel=1e-12)
        scale = np.max(np.abs(tensor.matrix)) ** 3
        assert np.linalg.det(rotated) == pytest.approx(np.linalg.det(tensor.matrix), rel=1e-12, abs=1e-12 * scale)


def test_delta_vanishes_at_zero_angle():
    tensor = PolarizabilityTensor.from_diagonal(3.0, 2.0, 1.0)
    assert not np.any(delta_polarizability(tensor, 0.0).matrix)


def test_delta_matches_direct_difference(rng):
    for _ in range(10):
        tensor = random_symmetric(rng)
        omega = rng.uniform(-math.pi, math.pi)
        rotation = rotation_matrix_z(omega)
        expected = tensor.matrix - rotation.T @ tensor.matrix @ rotation
        assert delta_polarizability(tensor, omega).matrix == pytest.approx(expected, abs=1e-13)


def test_delta_of_diagonal_tensor():
    alpha_x, alpha_y, omega = 3.0, 1.0, 0.7
    delta = delta_polarizability(PolarizabilityTensor.from_diagonal(alpha_x, alpha_y, 2.0), omega)
    s, c = math.sin(omega), math.cos(omega)
    d = alpha_x - alpha_y
    expected = np.array([[s * s * d, s * c * d, 0.0], [s * c * d, -s * s * d, 0.0], [0.0, 0.0, 0.0]])
    assert delta.matrix == pytest.approx(expected, abs=1e-14)
    assert delta.matrix[2].tolist() == [0.0, 0.0, 0.0]
    assert delta.frobenius_squared() == pytest.approx(2.0 * d * d * s * s, rel=1e-12)


def test_relabeling_antisymmetry(rng):
    for _ in range(10):
        tensor = random_symmetric(rng)
        omega = rng.uniform(-math.pi, math.pi)
        rotation = rotation_matrix_z(omega)
        forward = delta_polarizability(tensor, omega).matrix
        backward = rotation.T @ delta_polarizability(tensor, -omega).matrix @ rotation
        assert np.max(np.abs(forward + backward)) <= 1e-12 * np.max(np.abs(tensor.matrix))


@pytest.mark.parametrize(
    "alpha, alpha_prime, omega",
    [
        (0.0, 0.0, 0.0),
        (math.pi, 0.0, math.pi),
        (0.0, math.pi, math.pi),
        (1.5 * math.pi, 0.0, -0.5 * math.pi),
        (0.25, -0.5, 0.75),
    ],
)
def test_orientation_pair_reduces_omega(alpha, alpha_prime, omega):
    assert OrientationPair(alpha, alpha_prime).omega == pytest.approx(omega, abs=1e-15)


def test_unit_direction():
    with pytest.raises(InvalidInputError):
        UnitDirection(-0.1, 0.0)
    with pytest.raises(InvalidInputError):
        UnitDirection(4.0, 0.0)
    d = UnitDirection(1.0, -0.5)
    assert 0.0 <= d.phi < 2.0 * math.pi
    assert float(np.linalg.norm(d.cartesian)) == pytest.approx(1.0, abs=1e-15)
    back = UnitDirection.from_vector(3.0 * d.cartesian)
    assert back.theta == pytest.approx(d.theta, abs=1e-14)
    assert back.phi == pytest.approx(d.phi, abs=1e-14)
    with pytest.raises(InvalidInputError):
        UnitDirection.from_vector((0.0, 0.0, 0.0))


def test_rotate_direction_z():
    d = UnitDirection(0.8, 1.2)
    assert rotate_direction_z(d, 0.0) == d
    there_and_back = rotate_direction_z(rotate_direction_z(d, 0.4), -0.4)
    assert there_and_back.phi == pytest.approx(d.phi, abs=1e-15)
    assert rotate_direction_z(d, 0.4).cartesian == pytest.approx(rotation_matrix_z(-0.4) @ d.cartesian, abs=1e-15)
