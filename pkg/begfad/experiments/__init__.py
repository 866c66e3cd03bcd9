"""
Monte Carlo estimation of the central magnetization and its dependence on the box side.

Every sample ``k`` of a box draws from its own stream ``(seed, dimension, side, k)``, so estimates are the same
whether samples are drawn in one process or spread over several.
"""
from enum import Enum
from time import perf_counter
from logging import getLogger
from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple
import numpy as np
import pandas as pd
from tqdm import tqdm
from begfad.experiments.stats import LinearFit, log_linear_fit, mean_and_std_error
from begfad.lattice import BoxLattice, build_box
from begfad.sampler.perfect import perfect_sample_cftp, perfect_sample_forward
from begfad.spins import SpinConfig
from begfad.spins.clusters import ClusterFinder
from begfad.utils.streams import stream

_logger = getLogger(__name__)

CSV_HEADER = ("dimension", "side", "estimator", "sampler", "n", "mean", "std_error", "waste_rate", "seed",
              "wall_time_ms")


class SamplerKind(Enum):
    FORWARD = "forward"
    CFTP = "cftp"


class EstimatorKind(Enum):
    SPIN_AVERAGE = "spin-average"
    CONNECTIVITY = "connectivity-indicator"


@dataclass(frozen=True)
class SampleBatch:
    """
    Per-sample observables of a run of perfect samples, in sample order.
    """

    origin_spins: np.ndarray
    connected: np.ndarray
    wasted: int
    configs: Optional[List[SpinConfig]] = None

    @property
    def accepted(self) -> int:
        return int(self.origin_spins.shape[0])

    def observable(self, estimator_kind: EstimatorKind) -> np.ndarray:
        if estimator_kind is EstimatorKind.SPIN_AVERAGE:
            return self.origin_spins
        return self.connected


@dataclass(frozen=True)
class MagnetizationEstimate:
    """
    An estimate of the expected central spin on one box.
    """

    dimension: int
    side: int
    sampler_kind: SamplerKind
    estimator_kind: EstimatorKind
    samples_accepted: int
    samples_wasted: int
    mean: float
    std_error: float
    seed: int
    wall_time: float

    @property
    def waste_rate(self) -> Optional[float]:
        """
        Fraction of forward runs rejected; ``None`` for coupling from the past.
        """
        if self.sampler_kind is not SamplerKind.FORWARD:
            return None
        attempts = self.samples_accepted + self.samples_wasted
        return self.samples_wasted / attempts if attempts else 0.0


@dataclass(frozen=True)
class SweepResult:
    """
    Estimates over increasing sides and, in two dimensions, the fit of ``log(mean)`` against the side.
    """

    estimates: Tuple[MagnetizationEstimate, ...]
    fit: Optional[LinearFit]

    @property
    def sides(self) -> List[int]:
        return [estimate.side for estimate in self.estimates]

    @property
    def means(self) -> List[float]:
        return [estimate.mean for estimate in self.estimates]


@dataclass(frozen=True)
class WasteReport:
    """
    How many forward runs of a given horizon failed to coalesce.
    """

    side: int
    dimension: int
    horizon: int
    attempts: int
    rejected: int

    @property
    def rate(self) -> float:
        return self.rejected / self.attempts if self.attempts else 0.0


def _draw_one(lattice: BoxLattice, sampler_kind: SamplerKind, seed: int, index: int,
              horizon: Optional[int]) -> Tuple[SpinConfig, int]:
    rng = stream(seed, lattice.dimension, lattice.side, index)
    if sampler_kind is SamplerKind.CFTP:
        return perfect_sample_cftp(lattice, rng=rng), 0
    wasted = 0
    while True:
        config = perfect_sample_forward(lattice, horizon, rng=rng)
        if config is not None:
            return config, wasted
        wasted += 1


def _draw_range(task) -> SampleBatch:
    dimension, side, sampler_value, seed, start, stop, horizon, keep_configs, progress = task
    lattice = build_box(dimension, side)
    sampler_kind = SamplerKind(sampler_value)
    finder = ClusterFinder(lattice)
    origin_spins = np.empty(stop - start, dtype=np.int8)
    connected = np.empty(stop - start, dtype=np.int8)
    configs = [] if keep_configs else None
    wasted = 0
    for offset, index in enumerate(tqdm(range(start, stop), disable=not progress, unit="sample", leave=False)):
        config, rejected = _draw_one(lattice, sampler_kind, seed, index, horizon)
        wasted += rejected
        origin_spins[offset] = config.spins[lattice.origin_index]
        connected[offset] = 1 if finder.size_and_touch(config.spins, 1)[1] else 0
        if keep_configs:
            configs.append(config)
    return SampleBatch(origin_spins, connected, wasted, configs)


def draw_samples(lattice: BoxLattice, sampler_kind: SamplerKind, n_samples: int, seed: int,
                 horizon: Optional[int] = None, workers: int = 1, keep_configs: bool = False,
                 progress: bool = False) -> SampleBatch:
    """
    Draws ``n_samples`` perfect samples and records the central spin and whether the origin +1 cluster reaches
    the internal boundary. Forward rejections are retried on the same sample stream and counted.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param sampler_kind: Forward coalescence or coupling from the past.
    :type sampler_kind: SamplerKind
    :param n_samples: Number of accepted samples.
    :type n_samples: int
    :param seed: Run seed.
    :type seed: int
    :param horizon: Forward horizon; ``|Lambda|^2`` when omitted.
    :type horizon: Optional[int]
    :param workers: Processes to spread the samples over.
    :type workers: int
    :param keep_configs: Keep the sampled configurations.
    :type keep_configs: bool
    :param progress: Show a progress bar.
    :type progress: bool
    :rtype: SampleBatch
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be at least 1, got {n_samples}")
    workers = max(1, min(int(workers), n_samples))
    bounds = np.linspace(0, n_samples, workers + 1).astype(int)
    tasks = [(lattice.dimension, lattice.side, sampler_kind.value, seed, int(bounds[w]), int(bounds[w + 1]), horizon,
              keep_configs, progress and workers == 1) for w in range(workers)]
    if workers == 1:
        parts = [_draw_range(tasks[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(_draw_range, tasks))
    configs = None
    if keep_configs:
        configs = [config for part in parts for config in part.configs]
    return SampleBatch(np.concatenate([part.origin_spins for part in parts]),
                       np.concatenate([part.connected for part in parts]),
                       sum(part.wasted for part in parts), configs)


def estimate_from_batch(lattice: BoxLattice, batch: SampleBatch, sampler_kind: SamplerKind,
                        estimator_kind: EstimatorKind, seed: int, wall_time: float = 0.0) -> MagnetizationEstimate:
    mean, std_error = mean_and_std_error(batch.observable(estimator_kind))
    return MagnetizationEstimate(lattice.dimension, lattice.side, sampler_kind, estimator_kind, batch.accepted,
                                 batch.wasted, mean, std_error, seed, wall_time)


def estimate_magnetization(lattice: BoxLattice, sampler_kind: SamplerKind = SamplerKind.CFTP,
                           estimator_kind: EstimatorKind = EstimatorKind.SPIN_AVERAGE, n_samples: int = 10000,
                           seed: int = 0, horizon: Optional[int] = None, workers: int = 1,
                           progress: bool = False) -> MagnetizationEstimate:
    """
    Estimates the expected central spin from perfect samples, either by averaging the spin or by averaging the
    indicator that the origin +1 cluster reaches the internal boundary. Both have the same expectation.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param sampler_kind: Forward coalescence or coupling from the past.
    :type sampler_kind: SamplerKind
    :param estimator_kind: Spin average or connectivity indicator.
    :type estimator_kind: EstimatorKind
    :param n_samples: Number of accepted samples.
    :type n_samples: int
    :param seed: Run seed.
    :type seed: int
    :param horizon: Forward horizon; ``|Lambda|^2`` when omitted.
    :type horizon: Optional[int]
    :param workers: Processes to spread the samples over.
    :type workers: int
    :param progress: Show a progress bar.
    :type progress: bool
    :rtype: MagnetizationEstimate
    """
    started = perf_counter()
    batch = draw_samples(lattice, sampler_kind, n_samples, seed, horizon, workers, progress=progress)
    estimate = estimate_from_batch(lattice, batch, sampler_kind, estimator_kind, seed, perf_counter() - started)
    _logger.info("d=%d L=%d %s/%s: mean %.5f +- %.5f (%d samples, %d wasted)", lattice.dimension, lattice.side,
                 sampler_kind.value, estimator_kind.value, estimate.mean, estimate.std_error,
                 estimate.samples_accepted, estimate.samples_wasted)
    return estimate


def validate_sides(side_list: Sequence[int]) -> List[int]:
    """
    Checks that the sides are odd, positive and strictly increasing.

    :raises ValueError: Otherwise.
    """
    sides = [int(side) for side in side_list]
    if not sides:
        raise ValueError("at least one side is required")
    for side in sides:
        if side < 1 or side % 2 == 0:
            raise ValueError(f"side must be odd and positive, got {side}")
    if any(b <= a for a, b in zip(sides, sides[1:])):
        raise ValueError(f"sides must be strictly increasing, got {sides}")
    return sides


def sweep(dimension: int, side_list: Sequence[int], sampler_kind: SamplerKind = SamplerKind.CFTP,
          n_samples_per_side: int = 10000, seed: int = 0,
          estimator_kind: EstimatorKind = EstimatorKind.SPIN_AVERAGE, horizon: Optional[int] = None,
          workers: int = 1, progress: bool = False) -> SweepResult:
    """
    Estimates the central magnetization for each side; in two dimensions also fits ``log(mean)`` against the
    side over the positive means.

    :param dimension: Box dimension.
    :type dimension: int
    :param side_list: Odd, strictly increasing sides.
    :type side_list: Sequence[int]
    :param sampler_kind: Forward coalescence or coupling from the past.
    :type sampler_kind: SamplerKind
    :param n_samples_per_side: Samples per box.
    :type n_samples_per_side: int
    :param seed: Run seed.
    :type seed: int
    :param estimator_kind: Spin average or connectivity indicator.
    :type estimator_kind: EstimatorKind
    :param horizon: Forward horizon; ``|Lambda|^2`` of each box when omitted.
    :type horizon: Optional[int]
    :param workers: Processes per box.
    :type workers: int
    :param progress: Show a progress bar over the sides.
    :type progress: bool
    :rtype: SweepResult
    """
    sides = validate_sides(side_list)
    estimates = []
    for side in tqdm(sides, disable=not progress, unit="side"):
        estimates.append(estimate_magnetization(build_box(dimension, side), sampler_kind, estimator_kind,
                                                n_samples_per_side, seed, horizon, workers))
    fit = None
    if dimension == 2:
        fit = log_linear_fit([e.side for e in estimates], [e.mean for e in estimates])
    return SweepResult(tuple(estimates), fit)


def waste_report(lattice: BoxLattice, horizon: Optional[int], attempts: int, seed: int) -> WasteReport:
    """
    Runs ``attempts`` independent forward runs and counts those that did not coalesce.

    :rtype: WasteReport
    """
    if horizon is None:
        horizon = lattice.site_count ** 2
    rejected = 0
    for attempt in range(attempts):
        rng = stream(seed, lattice.dimension, lattice.side, horizon, attempt)
        if perfect_sample_forward(lattice, horizon, rng=rng) is None:
            rejected += 1
    _logger.info("d=%d L=%d horizon %d: %d of %d forward runs rejected", lattice.dimension, lattice.side, horizon,
                 rejected, attempts)
    return WasteReport(lattice.side, lattice.dimension, horizon, attempts, rejected)


def estimate_rows(estimates: Sequence[MagnetizationEstimate], timing: bool = True) -> List[str]:
    """
    Formats estimates as CSV lines, header first.

    :param estimates: The estimates.
    :type estimates: Sequence[MagnetizationEstimate]
    :param timing: Write wall times; zeros otherwise, for byte-identical reruns.
    :type timing: bool
    :rtype: List[str]
    """
    records = []
    for estimate in estimates:
        waste = estimate.waste_rate
        records.append([estimate.dimension, estimate.side, estimate.estimator_kind.value,
                        estimate.sampler_kind.value, estimate.samples_accepted, f"{estimate.mean:.10f}",
                        f"{estimate.std_error:.10f}", "" if waste is None else f"{waste:.6f}", estimate.seed,
                        int(round(estimate.wall_time * 1000)) if timing else 0])
    frame = pd.DataFrame(records, columns=list(CSV_HEADER))
    return frame.to_csv(index=False).splitlines()
