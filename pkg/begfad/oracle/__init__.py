"""
Exact results on small boxes: the ground-state census, the exact central magnetization, the connectivity
identity ``sum(sigma_0) == #{origin +1 cluster reaches the internal boundary}`` and the exact transition matrix
of the heat-bath chain.
"""
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from logging import getLogger
from typing import List, Optional, Tuple
import numpy as np
from begfad.errors import EnumerationCapError, InvariantViolation
from begfad.lattice import BoxLattice, build_box
from begfad.oracle.transfer import SliceTransfer, connected_sets, outer_boundary
from begfad.sampler import neighbor_values, update_law
from begfad.spins import SpinConfig, dumps
from begfad.spins.clusters import ClusterFinder, flip_cluster
from begfad.utils.settings import Settings

_logger = getLogger(__name__)

# Above this many sites the census is counted by transfer matrices unless configurations must be listed.
DFS_SITE_LIMIT = 12


@dataclass
class GroundStateCensus:
    """
    Exact counts over the ground states of a box with + boundary.
    """

    lattice: BoxLattice
    count: int
    sum_origin_spin: int
    count_origin_connected: int
    count_origin_plus: int = 0
    count_origin_minus: int = 0
    method: str = "dfs"
    configs: Optional[List[SpinConfig]] = field(default=None, repr=False)

    def merge(self, other: "GroundStateCensus") -> "GroundStateCensus":
        configs = None
        if self.configs is not None and other.configs is not None:
            configs = self.configs + other.configs
        return GroundStateCensus(self.lattice, self.count + other.count,
                                 self.sum_origin_spin + other.sum_origin_spin,
                                 self.count_origin_connected + other.count_origin_connected,
                                 self.count_origin_plus + other.count_origin_plus,
                                 self.count_origin_minus + other.count_origin_minus, self.method, configs)


def _check_cap(lattice: BoxLattice, cap: Optional[int]) -> None:
    if cap is None:
        cap = int(Settings().get("enumeration_cap_sites"))
    if lattice.site_count > cap:
        # 3^n overflows a float near n = 647.
        estimate = 3.0 ** lattice.site_count if lattice.site_count < 600 else float("inf")
        raise EnumerationCapError(lattice.site_count, cap, estimate)


def enumerate_ground_states(lattice: BoxLattice, store_configs: bool = False, cap: Optional[int] = None,
                            method: str = "auto", symmetric: bool = False, workers: int = 1) -> GroundStateCensus:
    """
    Takes the exact census of the ground states of ``lattice``.

    ``method="dfs"`` assigns sites in row-major order and prunes as soon as a -1 touches the boundary or two
    neighbors have opposite signs. ``method="transfer"`` counts slice by slice without listing anything.
    ``"auto"`` lists when asked to or when the box is tiny, and counts otherwise.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param store_configs: Keep the list of ground states.
    :type store_configs: bool
    :param cap: Largest enumerable site count; the ``enumeration_cap_sites`` setting when omitted.
    :type cap: Optional[int]
    :param method: ``"auto"``, ``"dfs"`` or ``"transfer"``.
    :type method: str
    :param symmetric: For DFS, skip the negative origin branch and recover it through the cluster flip.
    :type symmetric: bool
    :param workers: Processes for DFS, split over the values of the first site.
    :type workers: int
    :rtype: GroundStateCensus
    :raises EnumerationCapError: If the box is over the cap or too many configurations would be stored.
    """
    _check_cap(lattice, cap)
    if method == "auto":
        method = "dfs" if store_configs or lattice.site_count <= DFS_SITE_LIMIT else "transfer"
    if method == "transfer":
        if store_configs:
            raise ValueError("the transfer method does not list configurations")
        return _transfer_census(lattice)
    if method != "dfs":
        raise ValueError(f"unknown enumeration method {method!r}")

    if store_configs and lattice.site_count > DFS_SITE_LIMIT:
        store_cap = int(Settings().get("store_cap_configs"))
        expected = SliceTransfer(lattice).count()
        if expected > store_cap:
            raise EnumerationCapError(lattice.site_count, store_cap, float(expected), "stored configuration")

    if workers > 1:
        tasks = [(lattice.dimension, lattice.side, first, store_configs, symmetric) for first in (-1, 0, 1)]
        with ProcessPoolExecutor(max_workers=min(workers, 3)) as executor:
            parts = list(executor.map(_dfs_task, tasks))
        census = parts[0]
        for part in parts[1:]:
            census = census.merge(part)
    else:
        census = _dfs_census(lattice, None, store_configs, symmetric)
    _logger.debug("DFS census of %r: %d ground states", lattice, census.count)
    return census


def _dfs_task(task: Tuple[int, int, int, bool, bool]) -> GroundStateCensus:
    dimension, side, first, store_configs, symmetric = task
    return _dfs_census(build_box(dimension, side), first, store_configs, symmetric)


def _dfs_census(lattice: BoxLattice, first: Optional[int], store_configs: bool,
                symmetric: bool) -> GroundStateCensus:
    n = lattice.site_count
    origin = lattice.origin_index
    contacts = lattice.boundary_contacts
    earlier = [[j for j in lattice.neighbors_of(i) if j < i] for i in range(n)]
    finder = ClusterFinder(lattice)
    spins = np.zeros(n, dtype=np.int8)
    census = GroundStateCensus(lattice, 0, 0, 0, configs=[] if store_configs else None)

    def allowed(site: int, value: int) -> bool:
        if value < 0 and contacts[site] > 0:
            return False
        if symmetric and site == origin and value < 0:
            return False
        return all(spins[j] * value != -1 for j in earlier[site])

    def leaf() -> None:
        census.count += 1
        origin_spin = int(spins[origin])
        if origin_spin > 0:
            census.count_origin_plus += 1
            size, touches = finder.size_and_touch(spins, 1)
            if touches:
                census.count_origin_connected += 1
            elif symmetric:
                # The flipped partner has a negative origin and is not visited by the search.
                census.count += 1
                census.count_origin_minus += 1
                if store_configs:
                    config = SpinConfig(lattice, spins)
                    census.configs.append(flip_cluster(config, finder.cluster(config, 1)))
        elif origin_spin < 0:
            census.count_origin_minus += 1
        if store_configs:
            census.configs.append(SpinConfig(lattice, spins))

    # Iterative depth-first search; each frame is the site and the values still to try.
    values_at_start = (-1, 0, 1) if first is None else (first,)
    stack = deque([(0, list(values_at_start))])
    while stack:
        site, pending = stack[-1]
        if not pending:
            stack.pop()
            spins[site] = 0
            continue
        value = pending.pop(0)
        if not allowed(site, value):
            continue
        spins[site] = value
        if site == n - 1:
            leaf()
            continue
        stack.append((site + 1, [-1, 0, 1]))
    census.sum_origin_spin = census.count_origin_plus - census.count_origin_minus
    census.method = "dfs-symmetric" if symmetric else "dfs"
    return census


def _transfer_census(lattice: BoxLattice) -> GroundStateCensus:
    transfer = SliceTransfer(lattice)
    origin = lattice.origin_index
    count = transfer.count()
    plus = transfer.count({origin: {1}})
    minus = transfer.count({origin: {-1}})
    core = {i for i in range(lattice.site_count) if lattice.boundary_contacts[i] == 0}
    enclosed = 0
    for cluster in connected_sets(lattice, origin, core):
        pins = {i: {1} for i in cluster}
        pins.update({j: {0} for j in outer_boundary(lattice, cluster)})
        enclosed += transfer.count(pins)
    _logger.debug("Transfer census of %r: %d ground states, %d enclosed origin clusters", lattice, count, enclosed)
    return GroundStateCensus(lattice, count, plus - minus, plus - enclosed, plus, minus, "transfer")


def exact_magnetization(census: GroundStateCensus) -> Fraction:
    """
    Returns the exact expected central spin.

    :rtype: fractions.Fraction
    """
    return Fraction(census.sum_origin_spin, census.count)


def lemma1_sides(census: GroundStateCensus) -> Tuple[int, int]:
    """
    Returns ``(sum of origin spins, number of ground states whose origin +1 cluster reaches the internal
    boundary)``. With stored configurations both sides are recomputed from the list.

    :rtype: Tuple[int, int]
    """
    if census.configs is None:
        return census.sum_origin_spin, census.count_origin_connected
    finder = ClusterFinder(census.lattice)
    left = sum(int(config.spins[census.lattice.origin_index]) for config in census.configs)
    right = sum(1 for config in census.configs if finder.size_and_touch(config.spins, 1)[1])
    return left, right


def verify_lemma1(census: GroundStateCensus) -> bool:
    """
    Returns true if the sum of origin spins equals the number of ground states connecting the origin to the
    internal boundary through +1 sites.

    :rtype: bool
    """
    left, right = lemma1_sides(census)
    return left == right


@dataclass
class TransitionMatrix:
    """
    The exact transition matrix of the heat-bath chain over the ground states of a box.
    """

    states: List[SpinConfig]
    entries: List[List[Fraction]]

    @property
    def size(self) -> int:
        return len(self.states)

    def is_symmetric(self) -> bool:
        return all(self.entries[a][b] == self.entries[b][a] for a in range(self.size) for b in range(a))

    def row_sums(self) -> List[Fraction]:
        return [sum(row, Fraction(0)) for row in self.entries]

    def column_sums(self) -> List[Fraction]:
        return [sum((row[b] for row in self.entries), Fraction(0)) for b in range(self.size)]

    def is_doubly_stochastic(self) -> bool:
        return all(total == 1 for total in self.row_sums()) and all(total == 1 for total in self.column_sums())

    def is_aperiodic(self) -> bool:
        """
        Sufficient check: every state can stay put.
        """
        return all(self.entries[a][a] > 0 for a in range(self.size))

    def is_irreducible(self) -> bool:
        """
        Returns true if state 0 reaches every state and every state reaches state 0 along positive entries.
        """
        forward = self._reachable(lambda a, b: self.entries[a][b] > 0)
        backward = self._reachable(lambda a, b: self.entries[b][a] > 0)
        return len(forward) == self.size and len(backward) == self.size

    def _reachable(self, positive) -> set:
        seen = {0}
        queue = deque([0])
        while queue:
            a = queue.popleft()
            for b in range(self.size):
                if b not in seen and positive(a, b):
                    seen.add(b)
                    queue.append(b)
        return seen

    def left_multiply(self, vector: List[Fraction]) -> List[Fraction]:
        return [sum((vector[a] * self.entries[a][b] for a in range(self.size)), Fraction(0)) for b in range(self.size)]

    def is_uniform_stationary(self) -> bool:
        uniform = [Fraction(1, self.size)] * self.size
        return self.left_multiply(uniform) == uniform


def exact_transition_matrix(lattice: BoxLattice, cap: Optional[int] = None) -> TransitionMatrix:
    """
    Builds the exact transition matrix over the ground states of ``lattice``: for every state, every site
    (probability ``1/|Lambda|``) and every quantile cell of that site's law, the cell's mass goes to the state
    with the site set to the cell's value.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param cap: Largest number of states; the ``transition_cap_states`` setting when omitted.
    :type cap: Optional[int]
    :rtype: TransitionMatrix
    :raises EnumerationCapError: If there are too many ground states.
    :raises InvariantViolation: If a row does not sum to one.
    """
    if cap is None:
        cap = int(Settings().get("transition_cap_states"))
    census = enumerate_ground_states(lattice, store_configs=True)
    if census.count > cap:
        raise EnumerationCapError(lattice.site_count, cap, float(census.count), "transition state")
    states = census.configs
    index = {config.spins.tobytes(): k for k, config in enumerate(states)}
    site_weight = Fraction(1, lattice.site_count)
    entries = [[Fraction(0)] * len(states) for _ in states]
    for a, config in enumerate(states):
        for site in range(lattice.site_count):
            law = update_law(neighbor_values(config, site))
            for value, probability in zip(law.allowed_values, law.probabilities):
                target = config.spins.copy()
                target[site] = value
                b = index.get(target.tobytes())
                if b is None:
                    raise InvariantViolation(f"update leaves the ground states from {dumps(config)}", 0, site)
                entries[a][b] += site_weight * probability
        if sum(entries[a], Fraction(0)) != 1:
            raise InvariantViolation(f"row of {dumps(config)} does not sum to 1", 0)
    return TransitionMatrix(states, entries)


def census_report(census: GroundStateCensus) -> List[str]:
    """
    Returns the census as ``key=value`` lines.

    :rtype: List[str]
    """
    magnetization = exact_magnetization(census)
    return [f"dimension={census.lattice.dimension}",
            f"side={census.lattice.side}",
            f"method={census.method}",
            f"count={census.count}",
            f"sum_origin_spin={census.sum_origin_spin}",
            f"count_origin_connected={census.count_origin_connected}",
            f"magnetization={magnetization}",
            f"magnetization_decimal={float(magnetization):.12f}"]
