"""
Perfect samplers built on the monotone grand coupling.

Both samplers run the bottom and top ground states with shared events. Every other ground state stays
sandwiched between them, so once the two agree every start would have given the same configuration.
"""
from logging import getLogger
from dataclasses import dataclass
from typing import Optional
import numpy as np
from begfad.errors import CoalescenceError
from begfad.kernels import run_coupled
from begfad.lattice import BoxLattice
from begfad.spins import SpinConfig, extremal_bottom, extremal_top
from begfad.utils.settings import Settings
from begfad.utils.streams import draw_block, stream

_logger = getLogger(__name__)

# Forward runs draw their events in chunks of at most this many steps.
_CHUNK = 1 << 20


@dataclass(frozen=True)
class CftpResult:
    """
    A coupling-from-the-past draw and the length of the past it needed.
    """

    config: SpinConfig
    epochs: int
    horizon: int


def default_horizon(lattice: BoxLattice) -> int:
    """
    The forward horizon ``|Lambda|^2``.

    :rtype: int
    """
    return lattice.site_count ** 2


def _resolve_rng(rng: Optional[np.random.Generator], rng_seed: Optional[int]) -> np.random.Generator:
    if rng is not None:
        return rng
    return stream(Settings().seed if rng_seed is None else rng_seed)


def perfect_sample_forward(lattice: BoxLattice, horizon: Optional[int] = None, rng_seed: Optional[int] = None,
                           rng: Optional[np.random.Generator] = None) -> Optional[SpinConfig]:
    """
    Runs the coupled chains forward from the bottom and top ground states for ``horizon`` steps and keeps the
    result if they have met.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param horizon: Number of coupled steps; ``|Lambda|^2`` when omitted.
    :type horizon: Optional[int]
    :param rng_seed: Seed of a fresh stream, used when ``rng`` is not given.
    :type rng_seed: Optional[int]
    :param rng: Stream to draw the events from.
    :type rng: Optional[numpy.random.Generator]
    :return: The common configuration, or ``None`` when the run is rejected.
    :rtype: Optional[SpinConfig]
    """
    if horizon is None:
        horizon = default_horizon(lattice)
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    rng = _resolve_rng(rng, rng_seed)
    low = extremal_bottom(lattice)
    high = extremal_top(lattice)
    mismatch = int(np.count_nonzero(low.spins != high.spins))
    remaining = horizon
    while remaining > 0:
        length = min(remaining, _CHUNK)
        sites, us = draw_block(rng, lattice.site_count, length)
        mismatch = run_coupled(low.spins, high.spins, lattice.neighbors, lattice.interior_degree,
                               lattice.boundary_contacts, sites, us, mismatch)
        remaining -= length
    if mismatch != 0:
        _logger.debug("Forward run rejected: %d sites still differ after %d steps", mismatch, horizon)
        return None
    return low


def cftp(lattice: BoxLattice, rng_seed: Optional[int] = None, rng: Optional[np.random.Generator] = None,
         max_epochs: Optional[int] = None) -> CftpResult:
    """
    Monotone coupling from the past. Epoch ``k`` starts ``2^k`` steps before time 0; the events of later
    epochs are reused unchanged when the start is pushed further back.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param rng_seed: Seed of a fresh stream, used when ``rng`` is not given.
    :type rng_seed: Optional[int]
    :param rng: Stream to draw the events from.
    :type rng: Optional[numpy.random.Generator]
    :param max_epochs: Epoch cap; the ``cftp_max_epochs`` setting when omitted.
    :type max_epochs: Optional[int]
    :rtype: CftpResult
    :raises CoalescenceError: If the chains have not met after ``max_epochs`` epochs.
    """
    if max_epochs is None:
        max_epochs = int(Settings().get("cftp_max_epochs"))
    rng = _resolve_rng(rng, rng_seed)
    bottom = extremal_bottom(lattice).spins
    top = extremal_top(lattice).spins
    initial_mismatch = int(np.count_nonzero(bottom != top))
    blocks = []
    horizon = 0
    for epoch in range(max_epochs):
        length = 1 if epoch == 0 else horizon
        blocks.append(draw_block(rng, lattice.site_count, length))
        horizon += length
        low = bottom.copy()
        high = top.copy()
        mismatch = initial_mismatch
        # Oldest events first.
        for sites, us in reversed(blocks):
            mismatch = run_coupled(low, high, lattice.neighbors, lattice.interior_degree,
                                   lattice.boundary_contacts, sites, us, mismatch)
        if mismatch == 0:
            return CftpResult(SpinConfig(lattice, low), epoch + 1, horizon)
        _logger.debug("CFTP epoch %d (horizon %d): %d sites differ", epoch, horizon, mismatch)
    raise CoalescenceError(f"no coalescence on {lattice!r} after {max_epochs} epochs (horizon {horizon})")


def perfect_sample_cftp(lattice: BoxLattice, rng_seed: Optional[int] = None,
                        rng: Optional[np.random.Generator] = None, max_epochs: Optional[int] = None) -> SpinConfig:
    """
    Returns an exact uniform draw from the ground states of ``lattice``.

    :rtype: SpinConfig
    """
    return cftp(lattice, rng_seed, rng, max_epochs).config
