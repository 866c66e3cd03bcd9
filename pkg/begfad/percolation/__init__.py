"""
Site percolation at p = 1/2 and its coupling with the heat-bath chain.

The percolation chain opens the updated site when ``u < 1/2`` and closes it otherwise. Driven by the same
events as the heat-bath chain, it keeps every +1 site of the spin chain open, so the +1 cluster of the origin
sits inside the open cluster of the origin.
"""
from logging import getLogger
from dataclasses import dataclass, field
from typing import List, Optional, Tuple
import numpy as np
import pandas as pd
from scipy.stats import linregress
from tqdm import tqdm
from begfad.errors import InvariantViolation
from begfad.kernels import percolation_origin_sizes, run_beg_percolation
from begfad.lattice import BoxLattice
from begfad.sampler import ChainState, apply_update, neighbor_values, update_law
from begfad.spins import dumps, extremal_top
from begfad.spins.clusters import ClusterFinder
from begfad.utils.streams import draw_block, stream

_logger = getLogger(__name__)

OPEN_PROBABILITY = 0.5


class PercConfig:
    """
    Open (True) and closed (False) sites of a box. Stored as uint8 so the cluster kernels can read it.
    """

    __slots__ = ("lattice", "open_sites")

    def __init__(self, lattice: BoxLattice, open_sites=None) -> None:
        self.lattice = lattice
        if open_sites is None:
            self.open_sites = np.ones(lattice.site_count, dtype=np.uint8)
        else:
            self.open_sites = np.ascontiguousarray(np.asarray(open_sites, dtype=bool), dtype=np.uint8).copy()

    def is_open(self, site: int) -> bool:
        return bool(self.open_sites[site])

    def open_count(self) -> int:
        return int(self.open_sites.sum())


@dataclass
class PercCoupledPair:
    """
    The heat-bath chain and the percolation chain driven by the same events.
    """

    beg: ChainState
    perc: PercConfig
    visited_mask: np.ndarray
    rng: np.random.Generator
    step_count: int = 0
    finder: ClusterFinder = field(default=None, repr=False)

    @classmethod
    def start(cls, lattice: BoxLattice, seed: int, *key: int) -> "PercCoupledPair":
        """
        Starts both chains from the all +1 state.
        """
        rng = stream(seed, *key)
        return cls(ChainState(extremal_top(lattice), rng, seed), PercConfig(lattice),
                   np.zeros(lattice.site_count, dtype=np.uint8), rng, 0, ClusterFinder(lattice))

    def coverage(self) -> float:
        """
        Returns the fraction of sites updated at least once.
        """
        return float(self.visited_mask.mean())


@dataclass(frozen=True)
class TailHistogram:
    """
    Empirical distribution of the origin open-cluster size.
    """

    lattice: BoxLattice
    samples: int
    counts: np.ndarray

    def sizes(self) -> np.ndarray:
        return np.arange(self.counts.shape[0])

    def tail(self) -> np.ndarray:
        """
        Returns ``P(|cluster| >= n)`` for every ``n``.
        """
        return np.cumsum(self.counts[::-1])[::-1] / self.samples

    def rows(self) -> List[Tuple[int, int, float]]:
        """
        Returns ``(n, count, empirical_tail)`` for every size up to the largest one seen.
        """
        tail = self.tail()
        return [(int(n), int(self.counts[n]), float(tail[n])) for n in range(self.counts.shape[0])]

    def to_frame(self) -> pd.DataFrame:
        """
        Returns the histogram as a table with columns ``n``, ``count`` and ``empirical_tail``.
        """
        return pd.DataFrame({"n": self.sizes(), "count": self.counts.astype(np.int64),
                             "empirical_tail": self.tail()})


@dataclass(frozen=True)
class TailFit:
    """
    Least-squares line through ``log P(|cluster| >= n)``.
    """

    slope: float
    intercept: float
    r_squared: float
    points: int


def perc_step(config: PercConfig, site: int, u: float, visited: Optional[np.ndarray] = None) -> PercConfig:
    """
    Opens ``site`` if ``u < 1/2`` and closes it otherwise.

    :param config: The percolation configuration, updated in place.
    :type config: PercConfig
    :param site: The site.
    :type site: int
    :param u: The uniform variate.
    :type u: float
    :param visited: Optional mask marking updated sites.
    :type visited: Optional[numpy.ndarray]
    :rtype: PercConfig
    """
    config.open_sites[site] = 1 if u < OPEN_PROBABILITY else 0
    if visited is not None:
        visited[site] = 1
    return config


def coupled_beg_perc_step(pair: PercCoupledPair, site: Optional[int] = None,
                          u: Optional[float] = None) -> PercCoupledPair:
    """
    Advances both chains with one shared event.

    :param pair: The coupled chains.
    :type pair: PercCoupledPair
    :param site: Optional forced site.
    :type site: Optional[int]
    :param u: Optional forced variate.
    :type u: Optional[float]
    :rtype: PercCoupledPair
    """
    config = pair.beg.config
    if site is None or u is None:
        sites, us = draw_block(pair.rng, config.lattice.site_count, 1)
        site, u = int(sites[0]), float(us[0])
    config.spins[site] = apply_update(update_law(neighbor_values(config, site)), u)
    perc_step(pair.perc, site, u, pair.visited_mask)
    pair.beg.step_count += 1
    pair.step_count += 1
    return pair


def check_containment(pair: PercCoupledPair) -> bool:
    """
    Returns true if every site of the +1 cluster of the origin is in the open cluster of the origin.

    :rtype: bool
    """
    finder = pair.finder or ClusterFinder(pair.beg.config.lattice)
    beg = finder.cluster(pair.beg.config, 1)
    if not beg.sites:
        return True
    return beg.sites <= finder.members(pair.perc.open_sites, 1)


def run_containment(pair: PercCoupledPair, steps: int, checkpoint: Optional[int] = None,
                    progress: bool = False) -> int:
    """
    Runs the coupled chains for ``steps`` steps, checking the updated site at every step and the cluster
    containment every ``checkpoint`` steps.

    :param pair: The coupled chains.
    :type pair: PercCoupledPair
    :param steps: Number of steps.
    :type steps: int
    :param checkpoint: Steps between cluster checks; ``|Lambda|`` when omitted, 1 checks every step.
    :type checkpoint: Optional[int]
    :param progress: Show a progress bar.
    :type progress: bool
    :return: The number of checkpoints passed.
    :rtype: int
    :raises InvariantViolation: On the first violation.
    """
    lattice = pair.beg.config.lattice
    if checkpoint is None:
        checkpoint = lattice.site_count
    checkpoint = max(1, int(checkpoint))
    passed = 0
    done = 0
    with tqdm(total=steps, disable=not progress, unit="step", unit_scale=True) as bar:
        while done < steps:
            length = min(checkpoint, steps - done)
            sites, us = draw_block(pair.rng, lattice.site_count, length)
            bad = run_beg_percolation(pair.beg.config.spins, pair.perc.open_sites, pair.visited_mask,
                                      lattice.neighbors, lattice.interior_degree, lattice.boundary_contacts,
                                      sites, us)
            if bad >= 0:
                site = int(sites[bad])
                pair.step_count += int(bad) + 1
                pair.beg.step_count += int(bad) + 1
                raise InvariantViolation("+1 spin over a closed site", pair.step_count, site, _dump(pair, site))
            done += length
            pair.step_count += length
            pair.beg.step_count += length
            if not check_containment(pair):
                raise InvariantViolation("origin +1 cluster not contained in the open cluster", pair.step_count,
                                         int(sites[-1]), _dump(pair, int(sites[-1])))
            passed += 1
            _logger.info("Checkpoint %d at step %d: containment holds, coverage %.3f", passed, pair.step_count,
                         pair.coverage())
            bar.update(length)
    _logger.debug("Containment held at %d checkpoints, coverage %.3f", passed, pair.coverage())
    return passed


def _dump(pair: PercCoupledPair, site: int) -> str:
    open_line = "".join("o" if value else "." for value in pair.perc.open_sites)
    return (f"spin at site: {pair.beg.config[site]}, open: {pair.perc.is_open(site)}\n"
            f"beg:  {dumps(pair.beg.config)}\nperc: {open_line}")


def perc_cluster_tail(lattice: BoxLattice, samples: int, rng_seed: int, batch: int = 4096,
                      progress: bool = False) -> TailHistogram:
    """
    Draws independent p = 1/2 site configurations and records the size of the open cluster of the origin.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param samples: Number of configurations.
    :type samples: int
    :param rng_seed: Run seed.
    :type rng_seed: int
    :param batch: Configurations drawn per block.
    :type batch: int
    :param progress: Show a progress bar.
    :type progress: bool
    :rtype: TailHistogram
    """
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")
    rng = stream(rng_seed, lattice.dimension, lattice.side)
    sizes = np.empty(samples, dtype=np.int64)
    with tqdm(total=samples, disable=not progress, unit="sample") as bar:
        for start in range(0, samples, batch):
            count = min(batch, samples - start)
            open_batch = (rng.random((count, lattice.site_count)) < OPEN_PROBABILITY).astype(np.uint8)
            percolation_origin_sizes(open_batch, lattice.neighbors, lattice.interior_degree,
                                     lattice.boundary_contacts, lattice.origin_index, sizes[start:start + count])
            bar.update(count)
    return TailHistogram(lattice, samples, np.bincount(sizes))


def tail_fit(histogram: TailHistogram, max_size: Optional[int] = None) -> TailFit:
    """
    Fits ``log P(|cluster| >= n)`` against ``n`` for ``1 <= n <= max_size`` where the tail is positive.

    :param histogram: The empirical distribution.
    :type histogram: TailHistogram
    :param max_size: Largest size used; all observed sizes when omitted.
    :type max_size: Optional[int]
    :rtype: TailFit
    """
    tail = histogram.tail()
    sizes = np.arange(tail.shape[0])
    keep = (sizes >= 1) & (tail > 0)
    if max_size is not None:
        keep &= sizes <= max_size
    if np.count_nonzero(keep) < 2:
        return TailFit(float("nan"), float("nan"), float("nan"), int(np.count_nonzero(keep)))
    fit = linregress(sizes[keep], np.log(tail[keep]))
    return TailFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2), int(np.count_nonzero(keep)))
