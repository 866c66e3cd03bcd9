"""
Exact ground-state counting by transfer matrices over slices.

The box is cut into the ``L`` slices of fixed first coordinate. A slice word is feasible on its own, and two
consecutive words are compatible when no site faces an opposite sign in the next slice. Sites can be pinned to
a subset of values, which is how origin-spin and origin-cluster counts are obtained without listing
configurations.
"""
from itertools import product
from logging import getLogger
from typing import Dict, Iterator, Optional, Set
import numpy as np
from begfad.lattice import BoxLattice

_logger = getLogger(__name__)


class SliceTransfer:
    """
    Slice words and their compatibility matrix for one box.
    """

    def __init__(self, lattice: BoxLattice) -> None:
        """
        Enumerates the feasible slice words.

        :param lattice: The box.
        :type lattice: BoxLattice
        """
        self.lattice = lattice
        self.width = lattice.site_count // lattice.side
        width = self.width
        # Counts can exceed int64 only far beyond the enumeration cap; fall back to Python integers there.
        self.dtype = np.int64 if 3 ** lattice.site_count < 2 ** 62 else object

        edges = lattice.interior_edges
        inside = (edges[:, 0] < width) & (edges[:, 1] < width)
        slice_edges = edges[inside]

        words = []
        for word in product((-1, 0, 1), repeat=width):
            array = np.array(word, dtype=np.int8)
            if np.any(array[slice_edges[:, 0]].astype(np.int16) * array[slice_edges[:, 1]] == -1):
                continue
            words.append(array)
        self.words = np.array(words, dtype=np.int8).reshape(-1, width)

        # A -1 may not sit next to the boundary; contacts differ per slice only along the first axis.
        self.valid = np.zeros((lattice.side, self.words.shape[0]), dtype=bool)
        minus = self.words == -1
        for s in range(lattice.side):
            contacts = lattice.boundary_contacts[s * width:(s + 1) * width] > 0
            self.valid[s] = ~np.any(minus & contacts[None, :], axis=1)

        facing = self.words[:, None, :].astype(np.int16) * self.words[None, :, :]
        self.compat = (~np.any(facing == -1, axis=2)).astype(self.dtype)
        _logger.debug("%r: %d slice words of width %d", lattice, self.words.shape[0], width)

    def count(self, pins: Optional[Dict[int, Set[int]]] = None) -> int:
        """
        Returns the number of ground states whose pinned sites take allowed values.

        :param pins: Site to allowed values.
        :type pins: Optional[Dict[int, Set[int]]]
        :rtype: int
        """
        vector = None
        for s in range(self.lattice.side):
            mask = self._slice_mask(s, pins)
            if vector is None:
                vector = mask.astype(self.dtype)
            else:
                vector = (vector @ self.compat) * mask
        return int(vector.sum())

    def _slice_mask(self, s: int, pins: Optional[Dict[int, Set[int]]]) -> np.ndarray:
        mask = self.valid[s].copy()
        if not pins:
            return mask
        width = self.width
        for site, allowed in pins.items():
            if s * width <= site < (s + 1) * width:
                column = self.words[:, site - s * width]
                mask &= np.isin(column, list(allowed))
        return mask


def connected_sets(lattice: BoxLattice, root: int, allowed: Set[int]) -> Iterator[frozenset]:
    """
    Yields every connected set of ``allowed`` sites that contains ``root``, each exactly once.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param root: The site every set contains.
    :type root: int
    :param allowed: Sites the sets may use.
    :type allowed: Set[int]
    """
    if root not in allowed:
        return

    def grow(current: frozenset, candidates: list, excluded: frozenset) -> Iterator[frozenset]:
        yield current
        for i, site in enumerate(candidates):
            taken = current | {site}
            skipped = excluded | frozenset(candidates[:i])
            frontier = set(candidates[i + 1:])
            frontier.update(j for j in lattice.neighbors_of(site) if j in allowed)
            frontier -= taken
            frontier -= skipped
            yield from grow(taken, sorted(frontier), skipped)

    start = sorted(j for j in lattice.neighbors_of(root) if j in allowed)
    yield from grow(frozenset((root,)), start, frozenset())


def outer_boundary(lattice: BoxLattice, sites: frozenset) -> Set[int]:
    """
    Returns the interior sites adjacent to ``sites`` but not in it.
    """
    return {j for i in sites for j in lattice.neighbors_of(i)} - sites
