from dataclasses import dataclass
import numpy as np
from begfad.errors import ClusterError, LatticeMismatchError
from begfad.kernels import origin_cluster
from begfad.spins import SpinConfig


@dataclass(frozen=True)
class PlusCluster:
    """
    The connected component of equal-sign spins containing the origin.

    ``sign`` is +1 for the clusters the magnetization is about; -1 clusters appear on the other side of
    :func:`flip_cluster`.
    """

    sites: frozenset
    touches_internal_boundary: bool
    sign: int = 1

    def __len__(self) -> int:
        return len(self.sites)


class ClusterFinder:
    """
    Origin-cluster extraction on one box with reusable search buffers.
    """

    def __init__(self, lattice) -> None:
        self.lattice = lattice
        self._visited = np.zeros(lattice.site_count, dtype=np.uint8)
        self._queue = np.empty(lattice.site_count, dtype=np.int32)

    def size_and_touch(self, values: np.ndarray, target: int):
        """
        Returns ``(size, touches_internal_boundary)`` for the origin component of ``target`` values.
        """
        lattice = self.lattice
        size, touches = origin_cluster(values, target, lattice.neighbors, lattice.interior_degree,
                                       lattice.boundary_contacts, lattice.origin_index, self._visited, self._queue)
        return int(size), bool(touches)

    def members(self, values: np.ndarray, target: int) -> frozenset:
        """
        Returns the sites of the origin component of ``target`` values.
        """
        size, _ = self.size_and_touch(values, target)
        return frozenset(int(i) for i in self._queue[:size])

    def cluster(self, config: SpinConfig, sign: int = 1) -> PlusCluster:
        if config.lattice != self.lattice:
            raise LatticeMismatchError(f"{config.lattice!r} is not {self.lattice!r}")
        size, touches = self.size_and_touch(config.spins, sign)
        return PlusCluster(frozenset(int(i) for i in self._queue[:size]), touches, sign)


def plus_cluster_at_origin(config: SpinConfig) -> PlusCluster:
    """
    Returns the +1 cluster of the origin, empty when the origin is not +1.

    :param config: The configuration.
    :type config: SpinConfig
    :rtype: PlusCluster
    """
    return ClusterFinder(config.lattice).cluster(config, 1)


def minus_cluster_at_origin(config: SpinConfig) -> PlusCluster:
    """
    Returns the -1 cluster of the origin, empty when the origin is not -1.

    :rtype: PlusCluster
    """
    return ClusterFinder(config.lattice).cluster(config, -1)


def flip_cluster(config: SpinConfig, cluster: PlusCluster) -> SpinConfig:
    """
    Returns a copy of ``config`` with the sign of every cluster site reversed. Flipping a +1 cluster that does
    not reach the internal boundary gives a feasible configuration with a negative origin; flipping the
    resulting -1 cluster gives ``config`` back.

    :param config: The configuration the cluster was extracted from.
    :type config: SpinConfig
    :param cluster: The origin cluster.
    :type cluster: PlusCluster
    :rtype: SpinConfig
    :raises ClusterError: If a +1 cluster touches the internal boundary or does not match the configuration.
    """
    flipped = config.copy()
    if not cluster.sites:
        return flipped
    if cluster.sign > 0 and cluster.touches_internal_boundary:
        raise ClusterError("a cluster touching the internal boundary cannot be flipped to -1")
    members = np.fromiter(cluster.sites, dtype=np.int64)
    if np.any(config.spins[members] != cluster.sign):
        raise ClusterError("cluster sites do not carry the cluster sign")
    flipped.spins[members] = -cluster.sign
    return flipped
