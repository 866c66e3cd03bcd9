"""
The zero-temperature heat-bath chain on ground states and its order-preserving grand coupling.

A step picks a site uniformly and resamples it uniformly over the values compatible with its neighborhood.
All chains driven by the same ``(site, u)`` events use descending inverse-quantile selection: the highest
allowed value owns the lowest interval of ``u``. That single rule keeps coupled chains ordered and never
returns +1 when ``u >= 1/2``.
"""
from fractions import Fraction
from dataclasses import dataclass
from typing import Optional, Tuple
import numpy as np
from begfad.errors import InvariantViolation, LatticeMismatchError
from begfad.kernels import ORDER_VIOLATION, neighbor_flags, run_chain, run_sandwich
from begfad.lattice import BoxLattice
from begfad.spins import SpinConfig, dumps, extremal_bottom, extremal_top, partial_order_leq
from begfad.utils.streams import draw_block, stream


@dataclass(frozen=True)
class NeighborValueSet:
    """
    Which spin values occur around a site; boundary neighbors count as +1.
    """

    has_minus: bool
    has_zero: bool
    has_plus: bool

    @property
    def values(self) -> frozenset:
        return frozenset(value for value, present in ((-1, self.has_minus), (0, self.has_zero),
                                                      (1, self.has_plus)) if present)

    @classmethod
    def of(cls, *values: int) -> "NeighborValueSet":
        return cls(-1 in values, 0 in values, 1 in values)


@dataclass(frozen=True)
class UpdateLaw:
    """
    The distribution of the new value of a site, values listed from highest to lowest.
    """

    allowed_values: Tuple[int, ...]
    probabilities: Tuple[Fraction, ...]

    def cells(self):
        """
        Yields ``(low, high, value)`` for each quantile interval of [0, 1).
        """
        low = Fraction(0)
        for value, probability in zip(self.allowed_values, self.probabilities):
            yield low, low + probability, value
            low += probability


_THIRD = Fraction(1, 3)
_HALF = Fraction(1, 2)
LAW_FREE = UpdateLaw((1, 0, -1), (_THIRD, _THIRD, _THIRD))
LAW_PLUS = UpdateLaw((1, 0), (_HALF, _HALF))
LAW_MINUS = UpdateLaw((0, -1), (_HALF, _HALF))
LAW_FROZEN = UpdateLaw((0,), (Fraction(1),))


def neighbor_values(config: SpinConfig, site: int) -> NeighborValueSet:
    """
    Returns the set of values seen around ``site``.

    :param config: The configuration.
    :type config: SpinConfig
    :param site: The site index.
    :type site: int
    :rtype: NeighborValueSet
    """
    lattice = config.lattice
    has_minus, has_zero, has_plus = neighbor_flags(config.spins, lattice.neighbors, lattice.interior_degree,
                                                   lattice.boundary_contacts, site)
    return NeighborValueSet(bool(has_minus), bool(has_zero), bool(has_plus))


def update_law(nv: NeighborValueSet) -> UpdateLaw:
    """
    Returns the heat-bath law for a neighborhood.

    :param nv: The neighbor values.
    :type nv: NeighborValueSet
    :rtype: UpdateLaw
    """
    if nv.has_minus and nv.has_plus:
        return LAW_FROZEN
    if nv.has_plus:
        return LAW_PLUS
    if nv.has_minus:
        return LAW_MINUS
    return LAW_FREE


def apply_update(law: UpdateLaw, u: float) -> int:
    """
    Selects a value by inverse quantile in descending order.

    The interval ends are compared as floats so the result matches the compiled kernels bit for bit.

    :param law: The law.
    :type law: UpdateLaw
    :param u: A uniform variate in [0, 1).
    :type u: float
    :rtype: int
    """
    for low, high, value in law.cells():
        if u < float(high):
            return value
    return law.allowed_values[-1]


@dataclass
class ChainState:
    """
    A heat-bath chain: its configuration, its step count and its random stream.
    """

    config: SpinConfig
    rng: np.random.Generator
    seed: Optional[int] = None
    step_count: int = 0

    @classmethod
    def start(cls, config: SpinConfig, seed: int, *key: int) -> "ChainState":
        return cls(config.copy(), stream(seed, *key), seed)


@dataclass
class CoupledPair:
    """
    Two chains driven by the same events, ``low`` below ``high`` at all times.
    """

    low: ChainState
    high: ChainState
    rng: np.random.Generator
    seed: Optional[int] = None
    step_count: int = 0

    @classmethod
    def extremal(cls, lattice: BoxLattice, seed: int, *key: int) -> "CoupledPair":
        """
        Starts a pair at the bottom and top ground states.
        """
        rng = stream(seed, *key)
        return cls(ChainState(extremal_bottom(lattice), rng, seed), ChainState(extremal_top(lattice), rng, seed),
                   rng, seed)

    @classmethod
    def between(cls, low: SpinConfig, high: SpinConfig, seed: int, *key: int) -> "CoupledPair":
        if not partial_order_leq(low, high):
            raise ValueError("low configuration is not below high configuration")
        rng = stream(seed, *key)
        return cls(ChainState(low.copy(), rng, seed), ChainState(high.copy(), rng, seed), rng, seed)

    @property
    def coalesced(self) -> bool:
        return bool(np.array_equal(self.low.config.spins, self.high.config.spins))


def _draw_event(rng: np.random.Generator, site_count: int) -> Tuple[int, float]:
    sites, us = draw_block(rng, site_count, 1)
    return int(sites[0]), float(us[0])


def chain_step(state: ChainState, site: Optional[int] = None, u: Optional[float] = None) -> ChainState:
    """
    Performs one heat-bath step in place. The site and variate are drawn from the chain's stream unless given.

    :param state: The chain.
    :type state: ChainState
    :param site: Optional forced site.
    :type site: Optional[int]
    :param u: Optional forced variate.
    :type u: Optional[float]
    :return: The same chain, advanced by one step.
    :rtype: ChainState
    """
    if site is None or u is None:
        site, u = _draw_event(state.rng, state.config.lattice.site_count)
    state.config.spins[site] = apply_update(update_law(neighbor_values(state.config, site)), u)
    state.step_count += 1
    return state


def run_steps(state: ChainState, steps: int) -> ChainState:
    """
    Advances a chain by ``steps`` heat-bath steps using one block of events from its stream.

    :rtype: ChainState
    """
    lattice = state.config.lattice
    sites, us = draw_block(state.rng, lattice.site_count, steps)
    run_chain(state.config.spins, lattice.neighbors, lattice.interior_degree, lattice.boundary_contacts, sites, us)
    state.step_count += steps
    return state


def coupled_step(pair: CoupledPair, site: Optional[int] = None, u: Optional[float] = None) -> CoupledPair:
    """
    Updates the same site of both chains with the same variate.

    :param pair: The coupled chains.
    :type pair: CoupledPair
    :param site: Optional forced site.
    :type site: Optional[int]
    :param u: Optional forced variate.
    :type u: Optional[float]
    :rtype: CoupledPair
    """
    low, high = pair.low.config, pair.high.config
    if low.lattice != high.lattice:
        raise LatticeMismatchError(f"{low.lattice!r} and {high.lattice!r} differ")
    if site is None or u is None:
        site, u = _draw_event(pair.rng, low.lattice.site_count)
    low_value = apply_update(update_law(neighbor_values(low, site)), u)
    high_value = apply_update(update_law(neighbor_values(high, site)), u)
    low.spins[site] = low_value
    high.spins[site] = high_value
    pair.low.step_count += 1
    pair.high.step_count += 1
    pair.step_count += 1
    return pair


def coupled_values(low_nv: NeighborValueSet, high_nv: NeighborValueSet, u: float) -> Tuple[int, int]:
    """
    Returns the values the coupling assigns to a site whose neighborhoods are ``low_nv`` and ``high_nv``.

    :rtype: Tuple[int, int]
    """
    return apply_update(update_law(low_nv), u), apply_update(update_law(high_nv), u)


def admissible_pair(low_nv: NeighborValueSet, high_nv: NeighborValueSet) -> bool:
    """
    Returns true if the two neighborhoods can surround the same site of ordered configurations
    (``low`` below ``high``): a -1 around ``high`` forces one around ``low``, a +1 around ``low`` forces one
    around ``high``.

    :rtype: bool
    """
    if high_nv.has_minus and not low_nv.has_minus:
        return False
    if low_nv.has_plus and not high_nv.has_plus:
        return False
    return bool(low_nv.values) and bool(high_nv.values)


def sandwich_run(lattice: BoxLattice, steps: int, seed: int, middle: Optional[SpinConfig] = None,
                 chunk: int = 1 << 18, key: Tuple[int, ...] = ()) -> Tuple[SpinConfig, SpinConfig, SpinConfig]:
    """
    Evolves the bottom, ``middle`` (all zero by default) and top configurations with shared events, checking
    at every step that the updated site stays ordered and feasible in all three chains.

    :param lattice: The box.
    :type lattice: BoxLattice
    :param steps: Number of steps.
    :type steps: int
    :param seed: Run seed.
    :type seed: int
    :param middle: Feasible start of the middle chain.
    :type middle: Optional[SpinConfig]
    :param chunk: Events drawn per block.
    :type chunk: int
    :param key: Stream key below the seed.
    :type key: Tuple[int, ...]
    :return: The three final configurations, lowest first.
    :rtype: Tuple[SpinConfig, SpinConfig, SpinConfig]
    :raises InvariantViolation: With the offending step, site and local states.
    """
    low = extremal_bottom(lattice)
    high = extremal_top(lattice)
    middle = SpinConfig(lattice) if middle is None else middle.copy()
    rng = stream(seed, *key)
    done = 0
    while done < steps:
        length = min(chunk, steps - done)
        sites, us = draw_block(rng, lattice.site_count, length)
        step, code = run_sandwich(low.spins, middle.spins, high.spins, lattice.neighbors, lattice.interior_degree,
                                  lattice.boundary_contacts, sites, us)
        if step >= 0:
            site = int(sites[step])
            what = "order broken" if code == ORDER_VIOLATION else "feasibility broken"
            dump = "\n".join(f"{name}: site value {config[site]}, neighbors {neighbor_values(config, site).values}"
                             f"\n{name}: {dumps(config)}"
                             for name, config in (("low", low), ("middle", middle), ("high", high)))
            raise InvariantViolation(what, done + int(step) + 1, site, dump)
        done += length
    return low, middle, high
