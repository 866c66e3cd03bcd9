"""
Seeded, splittable pseudorandom streams.

Every replica gets its own :class:`numpy.random.Generator` derived from the run seed and a key tuple, so the
numbers a replica sees depend only on ``(seed, key)`` and never on how replicas are spread over workers.
"""
from typing import Tuple
import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """
    Returns the stream identified by ``seed`` and ``key``.

    :param seed: The run seed.
    :type seed: int
    :param key: Replica coordinates, e.g. ``(dimension, side, sample_index)``.
    :type key: int
    :return: A PCG64 generator.
    :rtype: numpy.random.Generator
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))))


def draw_block(rng: np.random.Generator, site_count: int, length: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draws ``length`` update events: a uniform site index and a uniform variate in [0, 1) each.

    :param rng: The stream to draw from.
    :type rng: numpy.random.Generator
    :param site_count: Number of sites to choose from.
    :type site_count: int
    :param length: Number of events.
    :type length: int
    :return: ``(sites, us)`` as int32 and float64 arrays.
    :rtype: Tuple[numpy.ndarray, numpy.ndarray]
    """
    sites = rng.integers(0, site_count, size=length, dtype=np.int32)
    us = rng.random(length)
    return sites, us
