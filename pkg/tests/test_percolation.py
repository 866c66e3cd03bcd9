import logging
import numpy as np
import pytest
from begfad.errors import InvariantViolation
from begfad.lattice import build_box
from begfad.percolation import (PercConfig, PercCoupledPair, check_containment, coupled_beg_perc_step,
                                perc_cluster_tail, perc_step, run_containment, tail_fit)


def test_new_percolation_config_is_all_open():
    config = PercConfig(build_box(2, 3))
    assert config.open_count() == 9
    assert config.is_open(4)


def test_perc_step_opens_below_one_half():
    config = PercConfig(build_box(2, 3))
    visited = np.zeros(9, dtype=np.uint8)
    perc_step(config, 4, 0.7, visited)
    assert not config.is_open(4)
    assert visited[4] == 1
    perc_step(config, 4, 0.2)
    assert config.is_open(4)


def test_plus_sites_stay_open():
    lattice = build_box(2, 7)
    pair = PercCoupledPair.start(lattice, 3, 0)
    for _ in range(20000):
        coupled_beg_perc_step(pair)
        plus = pair.beg.config.spins == 1
        assert np.all(pair.perc.open_sites[plus] == 1)
    assert check_containment(pair)
    assert pair.step_count == 20000


def test_containment_run_passes_every_checkpoint():
    lattice = build_box(2, 9)
    pair = PercCoupledPair.start(lattice, 4, 0)
    assert run_containment(pair, 50000, checkpoint=100) == 500
    assert pair.step_count == 50000
    assert pair.coverage() == 1.0


def test_containment_run_without_steps():
    pair = PercCoupledPair.start(build_box(2, 5), 4, 0)
    assert run_containment(pair, 0) == 0
    assert check_containment(pair)


def test_containment_in_three_dimensions():
    pair = PercCoupledPair.start(build_box(3, 5), 8, 0)
    assert run_containment(pair, 30000) > 0


def test_closed_plus_site_breaks_containment():
    pair = PercCoupledPair.start(build_box(2, 3), 1, 0)
    pair.perc.open_sites[1] = 0
    assert not check_containment(pair)


def test_broken_containment_is_reported(monkeypatch):
    import begfad.percolation
    monkeypatch.setattr(begfad.percolation, "check_containment", lambda pair: False)
    pair = PercCoupledPair.start(build_box(2, 3), 1, 0)
    with pytest.raises(InvariantViolation, match="not contained") as caught:
        run_containment(pair, 5, checkpoint=1)
    assert caught.value.step == 1
    assert "perc:" in caught.value.dump


def test_percolation_opens_half_of_the_visits():
    pair = PercCoupledPair.start(build_box(2, 1), 12, 0)
    opened = 0
    visits = 100000
    for _ in range(visits):
        coupled_beg_perc_step(pair)
        opened += pair.perc.is_open(0)
    assert pair.coverage() == 1.0
    assert abs(opened / visits - 0.5) < 3 * 0.5 / np.sqrt(visits)


def test_closed_plus_site_is_reported_with_both_step_counts(monkeypatch):
    import begfad.percolation
    monkeypatch.setattr(begfad.percolation, "run_beg_percolation", lambda *arrays: 2)
    pair = PercCoupledPair.start(build_box(2, 3), 1, 0)
    with pytest.raises(InvariantViolation, match="closed site") as caught:
        run_containment(pair, 10, checkpoint=5)
    assert caught.value.step == 3
    assert pair.step_count == pair.beg.step_count == 3


def test_every_checkpoint_is_logged(caplog):
    caplog.set_level(logging.INFO, logger="begfad.percolation")
    pair = PercCoupledPair.start(build_box(2, 5), 4, 0)
    assert run_containment(pair, 100, checkpoint=25) == 4
    messages = [record.getMessage() for record in caplog.records if record.name == "begfad.percolation"]
    checkpoints = [message for message in messages if message.startswith("Checkpoint")]
    assert len(checkpoints) == 4
    assert checkpoints[-1].startswith("Checkpoint 4 at step 100")
    assert pair.beg.step_count == 100


def test_histogram_table():
    histogram = perc_cluster_tail(build_box(2, 1), 1000, 6)
    frame = histogram.to_frame()
    assert list(frame.columns) == ["n", "count", "empirical_tail"]
    assert frame["count"].sum() == 1000
    assert frame["empirical_tail"].iloc[0] == 1.0


def test_tail_of_a_single_site():
    histogram = perc_cluster_tail(build_box(2, 1), 4000, 6)
    assert histogram.counts.sum() == 4000
    assert histogram.counts.shape[0] == 2
    tail = histogram.tail()
    assert tail[0] == 1.0
    assert abs(tail[1] - 0.5) < 4 * 0.5 / np.sqrt(4000)


def test_single_sample_histogram():
    histogram = perc_cluster_tail(build_box(2, 5), 1, 2)
    assert histogram.counts.sum() == 1
    assert histogram.rows()[0] == (0, int(histogram.counts[0]), 1.0)


def test_tail_is_non_increasing_and_decays():
    histogram = perc_cluster_tail(build_box(2, 21), 20000, 5)
    tail = histogram.tail()
    assert np.all(np.diff(tail) <= 0)
    assert abs(tail[1] - 0.5) < 4 * 0.5 / np.sqrt(20000)
    fit = tail_fit(histogram, max_size=30)
    assert fit.slope < 0
    assert fit.points >= 2


def test_tail_draws_are_reproducible():
    lattice = build_box(2, 11)
    first = perc_cluster_tail(lattice, 3000, 9, batch=128)
    second = perc_cluster_tail(lattice, 3000, 9, batch=128)
    assert np.array_equal(first.counts, second.counts)


def test_tail_needs_samples():
    with pytest.raises(ValueError):
        perc_cluster_tail(build_box(2, 3), 0, 1)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_long_containment_runs(seed):
    pair = PercCoupledPair.start(build_box(2, 21), seed, 21)
    assert run_containment(pair, 1000000) > 0


@pytest.mark.slow
def test_large_box_tail_fit():
    histogram = perc_cluster_tail(build_box(2, 41), 100000, 5)
    tail = histogram.tail()
    assert abs(tail[1] - 0.5) < 3 * 0.5 / np.sqrt(100000)
    fit = tail_fit(histogram, max_size=40)
    assert fit.slope < 0
    assert fit.r_squared > 0.95
