"""
Compiled inner loops.

All kernels work on flat arrays: int8 spins, the int32 neighbor table of :class:`begfad.lattice.BoxLattice`
(interior neighbors first, padded with -1), int8 interior degrees and int8 boundary-contact counts. The
exterior boundary always reads as +1.
"""
import numpy as np
from numba import njit

ONE_THIRD = 1.0 / 3.0
TWO_THIRDS = 2.0 / 3.0

# Codes returned by run_sandwich.
NO_VIOLATION = 0
ORDER_VIOLATION = 1
FEASIBILITY_VIOLATION = 2


@njit(cache=True)
def neighbor_flags(spins, neighbors, degree, contacts, site):
    has_minus = False
    has_zero = False
    has_plus = contacts[site] > 0
    for k in range(degree[site]):
        value = spins[neighbors[site, k]]
        if value < 0:
            has_minus = True
        elif value > 0:
            has_plus = True
        else:
            has_zero = True
    return has_minus, has_zero, has_plus


@njit(cache=True)
def law_value(has_minus, has_plus, u):
    """
    Descending inverse-quantile selection: the highest allowed value owns the lowest interval of u.
    """
    if has_minus and has_plus:
        return 0
    if has_plus:
        return 1 if u < 0.5 else 0
    if has_minus:
        return 0 if u < 0.5 else -1
    if u < ONE_THIRD:
        return 1
    if u < TWO_THIRDS:
        return 0
    return -1


@njit(cache=True)
def heat_bath_value(spins, neighbors, degree, contacts, site, u):
    has_minus, has_zero, has_plus = neighbor_flags(spins, neighbors, degree, contacts, site)
    return law_value(has_minus, has_plus, u)


@njit(cache=True)
def is_locally_feasible(spins, neighbors, degree, contacts, site):
    value = spins[site]
    if value == 0:
        return True
    if value < 0 and contacts[site] > 0:
        return False
    for k in range(degree[site]):
        if spins[neighbors[site, k]] * value < 0:
            return False
    return True


@njit(cache=True)
def run_chain(spins, neighbors, degree, contacts, sites, us):
    for t in range(sites.shape[0]):
        site = sites[t]
        spins[site] = heat_bath_value(spins, neighbors, degree, contacts, site, us[t])


@njit(cache=True)
def run_coupled(low, high, neighbors, degree, contacts, sites, us, mismatch):
    """
    Runs the grand coupling on two chains and returns the updated count of sites where they differ.
    """
    for t in range(sites.shape[0]):
        site = sites[t]
        u = us[t]
        before = low[site] != high[site]
        low[site] = heat_bath_value(low, neighbors, degree, contacts, site, u)
        high[site] = heat_bath_value(high, neighbors, degree, contacts, site, u)
        after = low[site] != high[site]
        if after and not before:
            mismatch += 1
        elif before and not after:
            mismatch -= 1
    return mismatch


@njit(cache=True)
def run_sandwich(low, middle, high, neighbors, degree, contacts, sites, us):
    """
    Runs three coupled chains and checks, at every updated site, order and local feasibility.

    Returns ``(step, code)``; ``step`` is -1 when nothing was violated.
    """
    for t in range(sites.shape[0]):
        site = sites[t]
        u = us[t]
        low[site] = heat_bath_value(low, neighbors, degree, contacts, site, u)
        middle[site] = heat_bath_value(middle, neighbors, degree, contacts, site, u)
        high[site] = heat_bath_value(high, neighbors, degree, contacts, site, u)
        if low[site] > middle[site] or middle[site] > high[site]:
            return t, ORDER_VIOLATION
        if not (is_locally_feasible(low, neighbors, degree, contacts, site)
                and is_locally_feasible(middle, neighbors, degree, contacts, site)
                and is_locally_feasible(high, neighbors, degree, contacts, site)):
            return t, FEASIBILITY_VIOLATION
    return -1, NO_VIOLATION


@njit(cache=True)
def run_beg_percolation(spins, open_sites, visited, neighbors, degree, contacts, sites, us):
    """
    Drives the heat-bath chain and the p = 1/2 site percolation chain with the same events.

    Returns the first step where the updated site is +1 in the spin chain but closed in the percolation
    chain, or -1.
    """
    for t in range(sites.shape[0]):
        site = sites[t]
        u = us[t]
        spins[site] = heat_bath_value(spins, neighbors, degree, contacts, site, u)
        open_sites[site] = 1 if u < 0.5 else 0
        visited[site] = 1
        if spins[site] > 0 and open_sites[site] == 0:
            return t
    return -1


@njit(cache=True)
def origin_cluster(values, target, neighbors, degree, contacts, origin, visited, queue):
    """
    Breadth-first search of the component of sites equal to ``target`` containing ``origin``.

    Members are left in ``queue[:size]``; ``visited`` is restored to zero before returning so the buffer can
    be reused. Returns ``(size, touches_internal_boundary)``.
    """
    if values[origin] != target:
        return 0, False
    head = 0
    size = 1
    queue[0] = origin
    visited[origin] = 1
    touches = False
    while head < size:
        site = queue[head]
        head += 1
        if contacts[site] > 0:
            touches = True
        for k in range(degree[site]):
            other = neighbors[site, k]
            if visited[other] == 0 and values[other] == target:
                visited[other] = 1
                queue[size] = other
                size += 1
    for k in range(size):
        visited[queue[k]] = 0
    return size, touches


@njit(cache=True)
def percolation_origin_sizes(open_batch, neighbors, degree, contacts, origin, sizes):
    """
    Fills ``sizes[b]`` with the origin open-cluster size of each row of ``open_batch``.
    """
    visited = np.zeros(open_batch.shape[1], dtype=np.uint8)
    queue = np.empty(open_batch.shape[1], dtype=np.int32)
    for b in range(open_batch.shape[0]):
        size, touches = origin_cluster(open_batch[b], 1, neighbors, degree, contacts, origin, visited, queue)
        sizes[b] = size
