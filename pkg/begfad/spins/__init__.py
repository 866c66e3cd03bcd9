"""
Spin configurations at the FAD point: feasibility, energies, the coordinatewise order and the two extremal
ground states.
"""
from enum import Enum
from math import isfinite
from dataclasses import dataclass
from typing import Iterable, List, Optional
import numpy as np
from begfad.lattice import BoxLattice
from begfad.errors import ConfigCodecError, LatticeMismatchError

SPIN_CHARS = {-1: "-", 0: "0", 1: "+"}
CHAR_SPINS = {char: value for value, char in SPIN_CHARS.items()}


class SpinConfig:
    """
    An assignment of -1, 0 or +1 to every interior site of a :class:`BoxLattice`. The boundary is +1 and is
    not stored. A configuration may be infeasible; see :func:`is_feasible`.
    """

    __slots__ = ("lattice", "spins")

    def __init__(self, lattice: BoxLattice, spins: Optional[Iterable[int]] = None) -> None:
        """
        :param lattice: The box the configuration lives on.
        :type lattice: BoxLattice
        :param spins: One value per site in row-major order; all zero when omitted.
        :type spins: Optional[Iterable[int]]
        :raises ValueError: If the length is wrong or a value is not in {-1, 0, 1}.
        """
        self.lattice = lattice
        if spins is None:
            self.spins = np.zeros(lattice.site_count, dtype=np.int8)
            return
        array = np.ascontiguousarray(np.asarray(spins).reshape(-1), dtype=np.int8)
        if array.shape[0] != lattice.site_count:
            raise ValueError(f"expected {lattice.site_count} spins, got {array.shape[0]}")
        if np.any((array < -1) | (array > 1)):
            raise ValueError("spin values must be -1, 0 or +1")
        self.spins = array.copy()

    def copy(self) -> "SpinConfig":
        return SpinConfig(self.lattice, self.spins)

    def __getitem__(self, site: int) -> int:
        return int(self.spins[site])

    def __setitem__(self, site: int, value: int) -> None:
        if value not in (-1, 0, 1):
            raise ValueError(f"spin value must be -1, 0 or +1, got {value}")
        self.spins[site] = value

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpinConfig):
            return NotImplemented
        return self.lattice == other.lattice and bool(np.array_equal(self.spins, other.spins))

    def __hash__(self) -> int:
        return hash((self.lattice, self.spins.tobytes()))

    def __repr__(self) -> str:
        return f"SpinConfig({self.lattice!r}, {dumps(self)!r})"


@dataclass(frozen=True)
class CouplingParams:
    """
    The two couplings of the general Hamiltonian.
    """

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (isfinite(self.x) and isfinite(self.y)):
            raise ValueError(f"couplings must be finite, got ({self.x}, {self.y})")


# The FAD point.
FAD_PARAMS = CouplingParams(0.0, -1.0)


class Region(Enum):
    """
    Zero-temperature phase regions of the coupling plane, their interface lines and the FAD point.
    """

    F = "F"
    D = "D"
    A = "A"
    DF = "DF"
    AF = "AF"
    AD = "AD"
    FAD = "FAD"
    UNCLASSIFIED = "unclassified"


def energy_general(config: SpinConfig, params: CouplingParams) -> float:
    """
    Returns the general Hamiltonian ``-sum(s_i s_j + y s_i^2 s_j^2 + x (s_i^2 + s_j^2))`` over all nearest
    neighbor pairs, including pairs with the +1 boundary.

    :param config: The configuration.
    :type config: SpinConfig
    :param params: The couplings.
    :type params: CouplingParams
    :rtype: float
    """
    s = config.spins.astype(np.int64)
    edges = config.lattice.interior_edges
    a = s[edges[:, 0]]
    b = s[edges[:, 1]]
    product = a * b
    interior = -(product + params.y * product * product + params.x * (a * a + b * b)).sum()
    contacts = config.lattice.boundary_contacts.astype(np.int64)
    boundary = -(contacts * (s + params.y * s * s + params.x * (s * s + 1))).sum()
    return float(interior + boundary)


def energy_fad(config: SpinConfig) -> int:
    """
    Returns the number of frustrated edges, i.e. nearest neighbor pairs (boundary pairs included) whose spin
    product is -1.

    :param config: The configuration.
    :type config: SpinConfig
    :rtype: int
    """
    s = config.spins
    edges = config.lattice.interior_edges
    interior = int(np.count_nonzero(s[edges[:, 0]].astype(np.int16) * s[edges[:, 1]] == -1))
    boundary = int(config.lattice.boundary_contacts[s == -1].sum())
    return interior + boundary


def energy_fad_polynomial(config: SpinConfig) -> int:
    """
    Returns ``sum(-s_i s_j + (s_i s_j)^2)`` over all nearest neighbor pairs. Each frustrated edge contributes 2,
    every other edge 0.

    :rtype: int
    """
    return 2 * energy_fad(config)


def is_feasible(config: SpinConfig) -> bool:
    """
    Returns true if no two neighbors carry opposite signs and no -1 touches the boundary.

    :rtype: bool
    """
    return energy_fad(config) == 0


def magnetization_at_origin(config: SpinConfig) -> int:
    return int(config.spins[config.lattice.origin_index])


def classify_region(params: CouplingParams, tolerance: Optional[float] = None) -> Region:
    """
    Locates a coupling pair in the zero-temperature phase diagram. Equalities are tested within ``tolerance``;
    open regions need a margin larger than ``tolerance``.

    :param params: The couplings.
    :type params: CouplingParams
    :param tolerance: Interface tolerance; the ``region_tolerance`` setting when omitted.
    :type tolerance: Optional[float]
    :rtype: Region
    """
    if tolerance is None:
        from begfad.utils.settings import Settings
        tolerance = float(Settings().get("region_tolerance"))
    x, y = params.x, params.y
    ferro = 1 + 2 * x + y
    anti = 1 + x + y

    def zero(value: float) -> bool:
        return abs(value) <= tolerance

    if zero(x) and zero(y + 1):
        return Region.FAD
    if zero(ferro) and x < -tolerance:
        return Region.DF
    if zero(anti) and x > tolerance:
        return Region.AF
    if zero(x) and y < -1 - tolerance:
        return Region.AD
    if ferro > tolerance and anti > tolerance:
        return Region.F
    if ferro < -tolerance and x < -tolerance:
        return Region.D
    if anti < -tolerance and x > tolerance:
        return Region.A
    return Region.UNCLASSIFIED


def partial_order_leq(a: SpinConfig, b: SpinConfig) -> bool:
    """
    Returns true if ``a`` is below ``b`` at every site.

    :raises LatticeMismatchError: If the configurations live on different boxes.
    """
    if a.lattice != b.lattice:
        raise LatticeMismatchError(f"{a.lattice!r} and {b.lattice!r} differ")
    return bool(np.all(a.spins <= b.spins))


def extremal_top(lattice: BoxLattice) -> SpinConfig:
    """
    Returns the all +1 configuration, the maximum of the order.
    """
    return SpinConfig(lattice, np.ones(lattice.site_count, dtype=np.int8))


def extremal_bottom(lattice: BoxLattice) -> SpinConfig:
    """
    Returns the minimum feasible configuration: 0 on the internal boundary and -1 everywhere else.

    :param lattice: The box.
    :type lattice: BoxLattice
    :rtype: SpinConfig
    """
    spins = np.where(lattice.internal_boundary_mask, 0, -1).astype(np.int8)
    return SpinConfig(lattice, spins)


def dumps(config: SpinConfig) -> str:
    """
    Serializes a configuration as one line, one character per site in row-major order.

    :rtype: str
    """
    return "".join(SPIN_CHARS[int(value)] for value in config.spins)


def loads(lattice: BoxLattice, text: str) -> SpinConfig:
    """
    Parses a line written by :func:`dumps`.

    :param lattice: The box the line was written for.
    :type lattice: BoxLattice
    :param text: The serialized configuration.
    :type text: str
    :rtype: SpinConfig
    :raises ConfigCodecError: If the line has the wrong length or an unknown character.
    """
    text = text.strip()
    if len(text) != lattice.site_count:
        raise ConfigCodecError(f"expected {lattice.site_count} characters, got {len(text)}")
    try:
        return SpinConfig(lattice, [CHAR_SPINS[char] for char in text])
    except KeyError as error:
        raise ConfigCodecError(f"unknown spin character {error.args[0]!r}") from None


def loads_many(lattice: BoxLattice, lines: Iterable[str]) -> List[SpinConfig]:
    return [loads(lattice, line) for line in lines if line.strip() and not line.startswith("#")]
