"""
Geometry of the finite box with a fixed + boundary.

The exterior boundary layer is never stored: each interior site only records how many of its ``2d`` neighbors
lie outside the box. Sites are indexed in row-major order.
"""
from dataclasses import dataclass
from typing import Tuple
import numpy as np
from begfad.errors import LatticeError


@dataclass(frozen=True, eq=False)
class BoxLattice:
    """
    A ``d``-dimensional cube of odd side ``L`` with its neighbor tables.

    ``neighbors`` has shape ``(site_count, 2d)``; interior neighbors come first in each row and the row is
    padded with -1. ``boundary_contacts[i]`` is the number of boundary sites adjacent to ``i``.
    """

    dimension: int
    side: int
    site_count: int
    origin_index: int
    neighbors: np.ndarray
    interior_degree: np.ndarray
    boundary_contacts: np.ndarray
    internal_boundary_mask: np.ndarray
    interior_edges: np.ndarray

    @property
    def internal_boundary(self) -> frozenset:
        """
        The interior sites adjacent to the boundary.

        :rtype: frozenset
        """
        return frozenset(int(i) for i in np.flatnonzero(self.internal_boundary_mask))

    @property
    def coordination(self) -> int:
        return 2 * self.dimension

    def neighbors_of(self, index: int) -> Tuple[int, ...]:
        """
        Returns the interior neighbors of a site.

        :param index: The site.
        :type index: int
        :return: Neighboring interior sites.
        :rtype: Tuple[int, ...]
        """
        _check_index(self, index)
        return tuple(int(j) for j in self.neighbors[index, :self.interior_degree[index]])

    def boundary_edge_count(self) -> int:
        """
        Returns the number of (interior, boundary) edges.

        :rtype: int
        """
        return int(self.boundary_contacts.sum())

    def __repr__(self) -> str:
        return f"BoxLattice(dimension={self.dimension}, side={self.side})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoxLattice):
            return NotImplemented
        return self.dimension == other.dimension and self.side == other.side

    def __hash__(self) -> int:
        return hash((self.dimension, self.side))


def build_box(dimension: int, side: int) -> BoxLattice:
    """
    Builds the box ``{0, ..., side-1}^dimension`` with + boundary.

    :param dimension: Number of axes, at least 1.
    :type dimension: int
    :param side: Sites per axis; must be odd so that the box has a central site.
    :type side: int
    :return: The lattice.
    :rtype: BoxLattice
    :raises LatticeError: If the dimension is below 1, or the side is below 1 or even.
    """
    if int(dimension) != dimension or dimension < 1:
        raise LatticeError(f"dimension must be a positive integer, got {dimension}")
    if int(side) != side or side < 1:
        raise LatticeError(f"side must be at least 1, got {side}")
    if side % 2 == 0:
        raise LatticeError(f"side must be odd, got {side}")
    dimension, side = int(dimension), int(side)

    site_count = side ** dimension
    shape = (side,) * dimension
    coords = np.stack(np.unravel_index(np.arange(site_count), shape), axis=1)

    coordination = 2 * dimension
    neighbors = np.full((site_count, coordination), -1, dtype=np.int32)
    interior_degree = np.zeros(site_count, dtype=np.int8)
    boundary_contacts = np.zeros(site_count, dtype=np.int8)
    edges = []
    for axis in range(dimension):
        for step in (-1, 1):
            moved = coords.copy()
            moved[:, axis] += step
            inside = (moved[:, axis] >= 0) & (moved[:, axis] < side)
            boundary_contacts += (~inside).astype(np.int8)
            targets = np.ravel_multi_index(tuple(moved[inside].T), shape) if inside.any() else np.empty(0, int)
            sources = np.flatnonzero(inside)
            neighbors[sources, interior_degree[sources]] = targets
            interior_degree[sources] += 1
            if step == 1:
                edges.append(np.stack([sources, targets], axis=1))

    interior_edges = np.concatenate(edges).astype(np.int32) if edges else np.empty((0, 2), np.int32)
    origin = int(np.ravel_multi_index(((side - 1) // 2,) * dimension, shape))
    internal_boundary_mask = boundary_contacts > 0

    for array in (neighbors, interior_degree, boundary_contacts, internal_boundary_mask, interior_edges):
        array.setflags(write=False)
    return BoxLattice(dimension, side, site_count, origin, neighbors, interior_degree, boundary_contacts,
                      internal_boundary_mask, interior_edges)


def site_coordinates(lattice: BoxLattice, index: int) -> Tuple[int, ...]:
    """
    Returns the coordinates of a site, the inverse of row-major indexing.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param index: The site index.
    :type index: int
    :return: One coordinate per axis.
    :rtype: Tuple[int, ...]
    :raises LatticeError: If the index is out of range.
    """
    _check_index(lattice, index)
    return tuple(int(c) for c in np.unravel_index(int(index), (lattice.side,) * lattice.dimension))


def coordinates_to_index(lattice: BoxLattice, coordinates: Tuple[int, ...]) -> int:
    """
    Returns the row-major index of a coordinate vector.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param coordinates: One coordinate per axis.
    :type coordinates: Tuple[int, ...]
    :rtype: int
    :raises LatticeError: If the vector has the wrong length or lies outside the box.
    """
    if len(coordinates) != lattice.dimension or any(not 0 <= c < lattice.side for c in coordinates):
        raise LatticeError(f"coordinates {tuple(coordinates)} outside {lattice!r}")
    return int(np.ravel_multi_index(tuple(int(c) for c in coordinates), (lattice.side,) * lattice.dimension))


def _check_index(lattice: BoxLattice, index: int) -> None:
    if not 0 <= index < lattice.site_count:
        raise LatticeError(f"site {index} out of range for {lattice!r}")
