"""
Product Gauss–Legendre × trapezoid quadrature on S² and on products of spheres.

A grid of band limit L integrates every polynomial of degree <= L in the
Cartesian components exactly. Products of spheres are swept one outer node at
a time, with the remaining spheres broadcast as arrays, so the full product
table is never materialised. Outer-node partial sums are combined with
math.fsum, which is exactly rounded and therefore independent of the order
in which workers finish.
"""

import logging
import math
from typing import Callable, Sequence

import attrs
import numpy as np
from joblib import Parallel, delayed

from classes.core_types import UnitDirection
from classes.errors import InvalidInputError
from classes.utilities import resolve_workers
from constants.defaults import GRID_ORDER_MAX, GRID_ORDER_MIN

logger = logging.getLogger("rotodec.angular_quadrature")

MIN_SPHERES = 2
MAX_SPHERES = 4


@attrs.frozen
class NodeBlock:
    """Quadrature nodes of one sphere, shaped for broadcasting against other spheres."""

    theta: np.ndarray = attrs.field(eq=False)
    phi: np.ndarray = attrs.field(eq=False)
    xyz: np.ndarray = attrs.field(eq=False)


@attrs.frozen
class SphereGrid:
    """Nodes in canonical theta-major order with their solid-angle weights."""

    order: int
    theta: np.ndarray = attrs.field(eq=False, repr=False)
    phi: np.ndarray = attrs.field(eq=False, repr=False)
    weights: np.ndarray = attrs.field(eq=False, repr=False)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def xyz(self) -> np.ndarray:
        sin_theta = np.sin(self.theta)
        return np.stack(
            [sin_theta * np.cos(self.phi), sin_theta * np.sin(self.phi), np.cos(self.theta)], axis=-1
        )

    @property
    def nodes(self) -> list[tuple[UnitDirection, float]]:
        return [
            (UnitDirection(theta, phi), float(weight))
            for theta, phi, weight in zip(self.theta, self.phi, self.weights)
        ]

    def block(self, axis: int, ndim: int) -> NodeBlock:
        """All nodes laid along `axis` of an `ndim`-dimensional broadcast shape."""
        shape = [1] * ndim
        shape[axis] = self.size
        return NodeBlock(
            self.theta.reshape(shape), self.phi.reshape(shape), self.xyz.reshape(shape + [3])
        )

    def node(self, index: int) -> NodeBlock:
        return NodeBlock(self.theta[index], self.phi[index], self.xyz[index])


def build_sphere_grid(L: int) -> SphereGrid:
    """Gauss–Legendre in cos θ (L//2 + 1 points) times L + 1 equispaced azimuths."""
    if int(L) != L or not GRID_ORDER_MIN <= L <= GRID_ORDER_MAX:
        raise InvalidInputError(
            f"Grid order must be an integer in [{GRID_ORDER_MIN}, {GRID_ORDER_MAX}], got {L}."
        )
    L = int(L)
    n_theta, n_phi = L // 2 + 1, L + 1
    cos_theta, theta_weights = np.polynomial.legendre.leggauss(n_theta)
    phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
    theta, phi = np.meshgrid(np.arccos(cos_theta), phis, indexing="ij")
    weights = np.repeat(theta_weights * (2.0 * np.pi / n_phi), n_phi)
    logger.debug(f"Sphere grid L={L}: {n_theta} x {n_phi} = {weights.size} nodes")
    return SphereGrid(L, theta.ravel(), phi.ravel(), weights)


def integrate_s2(grid: SphereGrid, f: Callable, *, vectorized: bool = False):
    """Σ w_i f(d_i). A vectorized f receives (theta, phi) arrays."""
    if vectorized:
        values = np.asarray(f(grid.theta, grid.phi))
    else:
        values = np.array([f(direction) for direction, _ in grid.nodes])
    # numpy reduces contiguous arrays pairwise.
    return np.sum(values * grid.weights)[()]


def _inner_weights(grids: Sequence[SphereGrid]) -> np.ndarray:
    weights = np.ones(())
    for grid in grids:
        weights = np.multiply.outer(weights, grid.weights)
    return weights


def sweep_product(
    grids: Sequence[SphereGrid],
    chunk: Callable[[NodeBlock, Sequence[NodeBlock], np.ndarray], np.ndarray],
    *,
    n_jobs: int | None = None,
) -> np.ndarray:
    """Apply `chunk` to every node of the first sphere and fsum the partial results.

    `chunk(outer, inner_blocks, inner_weights)` returns an array of partial
    sums (any fixed shape); the outer weight is applied here.
    """
    if not MIN_SPHERES <= len(grids) <= MAX_SPHERES:
        raise InvalidInputError(
            f"Product quadrature supports {MIN_SPHERES} to {MAX_SPHERES} spheres, got {len(grids)}."
        )
    outer, rest = grids[0], grids[1:]
    inner_blocks = [grid.block(axis, len(rest)) for axis, grid in enumerate(rest)]
    inner_weights = _inner_weights(rest)
    workers = resolve_workers(n_jobs)
    logger.debug(
        f"Product sweep over {len(grids)} spheres: {outer.size} x {inner_weights.size} nodes, {workers} worker(s)"
    )

    def _outer_node(index: int) -> np.ndarray:
        partial = np.asarray(chunk(outer.node(index), inner_blocks, inner_weights), dtype=float)
        return outer.weights[index] * partial

    partials = Parallel(n_jobs=workers, backend="threading")(
        delayed(_outer_node)(index) for index in range(outer.size)
    )
    stacked = np.stack(partials)
    result = np.empty(stacked.shape[1:])
    for position in np.ndindex(result.shape):
        result[position] = math.fsum(stacked[(slice(None),) + position])
    return result


def integrate_product(
    grids: Sequence[SphereGrid], f: Callable[..., np.ndarray], *, n_jobs: int | None = None
) -> float:
    """Tensor-product quadrature of f(d1, d2, ...) over 2-4 spheres.

    f receives one NodeBlock per sphere (the first holds a single node) and
    returns values broadcastable to the product of the remaining spheres.
    """

    def _chunk(outer: NodeBlock, inner: Sequence[NodeBlock], weights: np.ndarray) -> float:
        values = np.broadcast_to(f(outer, *inner), weights.shape)
        return np.sum(values * weights)

    return float(sweep_product(grids, _chunk, n_jobs=n_jobs))
