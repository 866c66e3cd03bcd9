from itertools import product
import numpy as np
import pytest
from begfad.errors import ConfigCodecError, LatticeMismatchError
from begfad.lattice import build_box
from begfad.oracle import enumerate_ground_states
from begfad.spins import (FAD_PARAMS, CouplingParams, Region, SpinConfig, classify_region, dumps, energy_fad,
                          energy_fad_polynomial, energy_general, extremal_bottom, extremal_top, is_feasible, loads,
                          loads_many, magnetization_at_origin, partial_order_leq)


def test_empty_config_is_all_zero_and_feasible():
    config = SpinConfig(build_box(2, 3))
    assert not config.spins.any()
    assert is_feasible(config)
    assert energy_fad(config) == 0


def test_minus_on_the_internal_boundary_is_frustrated():
    lattice = build_box(2, 3)
    config = SpinConfig(lattice)
    config[0] = -1
    assert energy_fad(config) == 2
    assert not is_feasible(config)


def test_opposite_neighbors_are_frustrated():
    lattice = build_box(2, 3)
    config = SpinConfig(lattice)
    config[4] = -1
    config[1] = 1
    assert energy_fad(config) == 1
    assert not is_feasible(config)


def test_bad_values_are_refused():
    lattice = build_box(1, 3)
    with pytest.raises(ValueError):
        SpinConfig(lattice, [0, 2, 0])
    with pytest.raises(ValueError):
        SpinConfig(lattice, [0, 0])
    config = SpinConfig(lattice)
    with pytest.raises(ValueError):
        config[0] = 3


def test_energies_agree_on_every_configuration_of_a_small_square():
    lattice = build_box(2, 3)
    rng = np.random.default_rng(11)
    for spins in rng.integers(-1, 2, size=(500, lattice.site_count)):
        config = SpinConfig(lattice, spins)
        assert energy_general(config, FAD_PARAMS) == 2 * energy_fad(config)
        assert energy_fad_polynomial(config) == 2 * energy_fad(config)
        assert is_feasible(config) == (energy_fad(config) == 0)


def test_energies_agree_exhaustively_on_a_segment():
    lattice = build_box(1, 5)
    for spins in product((-1, 0, 1), repeat=lattice.site_count):
        config = SpinConfig(lattice, spins)
        assert energy_general(config, FAD_PARAMS) == energy_fad_polynomial(config)


def test_general_energy_of_the_top_configuration():
    lattice = build_box(2, 3)
    top = extremal_top(lattice)
    edges = lattice.interior_edges.shape[0] + lattice.boundary_edge_count()
    params = CouplingParams(0.5, 0.25)
    # Every pair is (+1, +1): -(1 + y + 2x) each.
    assert energy_general(top, params) == pytest.approx(-edges * (1 + params.y + 2 * params.x))


@pytest.mark.parametrize("x, y, region", [
    (0.0, -1.0, Region.FAD),
    (0.0, 0.0, Region.F),
    (0.0, -0.5, Region.F),
    (-1.0, 1.0, Region.DF),
    (-2.0, 0.0, Region.D),
    (1.0, -2.0, Region.AF),
    (1.0, -5.0, Region.A),
    (0.0, -3.0, Region.AD),
])
def test_classify_region(x, y, region):
    assert classify_region(CouplingParams(x, y)) is region


def test_classify_region_tolerance():
    assert classify_region(CouplingParams(1e-13, -1.0)) is Region.FAD
    assert classify_region(CouplingParams(1e-6, -1.0), tolerance=1e-3) is Region.FAD


def test_non_finite_couplings_are_refused():
    with pytest.raises(ValueError):
        CouplingParams(float("nan"), 0.0)
    with pytest.raises(ValueError):
        CouplingParams(0.0, float("inf"))


def test_extremal_configurations():
    lattice = build_box(2, 3)
    bottom = extremal_bottom(lattice)
    top = extremal_top(lattice)
    assert dumps(bottom) == "0000-0000"
    assert dumps(top) == "+" * 9
    assert is_feasible(bottom)
    assert is_feasible(top)
    assert partial_order_leq(bottom, top)
    assert not partial_order_leq(top, bottom)


def test_every_ground_state_lies_between_the_extremes():
    lattice = build_box(2, 3)
    census = enumerate_ground_states(lattice, store_configs=True)
    bottom, top = extremal_bottom(lattice), extremal_top(lattice)
    assert len(census.configs) == 528
    for config in census.configs:
        assert partial_order_leq(bottom, config)
        assert partial_order_leq(config, top)


def test_order_needs_the_same_box():
    with pytest.raises(LatticeMismatchError):
        partial_order_leq(SpinConfig(build_box(2, 3)), SpinConfig(build_box(1, 9)))


def test_magnetization_at_origin():
    lattice = build_box(1, 3)
    assert magnetization_at_origin(loads(lattice, "0-0")) == -1
    assert magnetization_at_origin(loads(lattice, "+0+")) == 0


def test_codec():
    lattice = build_box(2, 3)
    config = loads(lattice, "+0+0-0+0+")
    assert config[4] == -1
    assert config[0] == 1
    assert dumps(config) == "+0+0-0+0+"
    assert loads(lattice, dumps(config)) == config


def test_codec_errors():
    lattice = build_box(2, 3)
    with pytest.raises(ConfigCodecError):
        loads(lattice, "+0+")
    with pytest.raises(ConfigCodecError):
        loads(lattice, "+0+0x0+0+")


def test_loads_many_skips_comments_and_blank_lines():
    lattice = build_box(1, 3)
    configs = loads_many(lattice, ["# seed: 1", "", "+0+", "000"])
    assert [dumps(config) for config in configs] == ["+0+", "000"]


def test_configs_hash_by_content():
    lattice = build_box(1, 3)
    assert len({loads(lattice, "+0+"), loads(lattice, "+0+"), loads(lattice, "000")}) == 2
