import logging
import pytest
from begfad.cli import EXIT_CAP, EXIT_OK, EXIT_USAGE, main
from begfad.io import FileManager
from begfad.lattice import build_box
from begfad.spins import is_feasible, loads_many


def _run(*argv):
    return main(["--quiet", "--no-timing", "--workers", "1", *argv])


def test_sample_is_deterministic(tmp_path):
    first = tmp_path / "a.txt"
    outputs = []
    for _ in range(2):
        assert _run("sample", "--dim", "2", "--side", "5", "--sampler", "cftp", "--seed", "7", "--count", "3",
                    "--output", str(first)) == EXIT_OK
        outputs.append(first.read_bytes())
    assert outputs[0] == outputs[1]
    configs = loads_many(build_box(2, 5), FileManager.read_body(str(first)))
    assert len(configs) == 3
    assert all(is_feasible(config) for config in configs)


def test_output_starts_with_the_manifest(tmp_path):
    path = tmp_path / "out.txt"
    assert _run("sample", "--dim", "2", "--side", "3", "--seed", "11", "--output", str(path)) == EXIT_OK
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# begfad ")
    assert "# subcommand: sample" in lines
    assert "# seed: 11" in lines
    assert "# stream: numpy.PCG64/SeedSequence" in lines
    assert "# timestamp: none" in lines
    assert not lines[-1].startswith("#")


def test_seed_from_the_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("BEGFAD_SEED", "123")
    path = tmp_path / "out.txt"
    assert _run("sample", "--dim", "1", "--side", "3", "--output", str(path)) == EXIT_OK
    assert "# seed: 123" in path.read_text().splitlines()


def test_even_side_is_a_usage_error(capsys):
    assert _run("sample", "--dim", "2", "--side", "4") == EXIT_USAGE
    assert "side must be odd" in capsys.readouterr().err


def test_missing_subcommand_is_a_usage_error():
    assert main([]) == EXIT_USAGE


def test_single_site_samples_are_half_plus(tmp_path):
    path = tmp_path / "out.txt"
    assert _run("sample", "--dim", "2", "--side", "1", "--count", "1000", "--seed", "1",
                "--output", str(path)) == EXIT_OK
    body = FileManager.read_body(str(path))
    assert len(body) == 1000
    assert set(body) <= {"0", "+"}
    assert abs(body.count("+") / 1000 - 0.5) < 4 * 0.5 / 1000 ** 0.5


def test_sweep_writes_one_row_per_side(tmp_path):
    path = tmp_path / "sweep.csv"
    assert _run("sweep", "--dim", "2", "--sides", "3,5,7", "--samples", "200", "--seed", "1",
                "--output", str(path)) == EXIT_OK
    body = FileManager.read_body(str(path))
    assert body[0].startswith("dimension,side,estimator")
    assert [row.split(",")[1] for row in body[1:]] == ["3", "5", "7"]
    assert any(line.startswith("# fit_log_mean_slope") for line in path.read_text().splitlines())


def test_sweep_in_three_dimensions(tmp_path):
    path = tmp_path / "sweep.csv"
    assert _run("sweep", "--dim", "3", "--sides", "1,3", "--samples", "100", "--seed", "1",
                "--output", str(path)) == EXIT_OK
    rows = FileManager.read_body(str(path))[1:]
    assert len(rows) == 2
    assert all(float(row.split(",")[5]) > 0 for row in rows)


def test_sweep_output_does_not_depend_on_workers(tmp_path):
    bodies = []
    for workers in ("1", "2"):
        path = tmp_path / f"sweep-{workers}.csv"
        assert main(["--quiet", "--no-timing", "--workers", workers, "sweep", "--dim", "2", "--sides", "3,5",
                     "--samples", "60", "--seed", "4", "--output", str(path)]) == EXIT_OK
        bodies.append(FileManager.read_body(str(path)))
    assert bodies[0] == bodies[1]


@pytest.mark.parametrize("sides", ["", "3,4", "5,3"])
def test_bad_side_lists_are_usage_errors(sides):
    assert _run("sweep", "--dim", "2", "--sides", sides) == EXIT_USAGE


def test_oracle_single_site(capsys):
    assert _run("oracle", "--dim", "2", "--side", "1", "--check-lemma1") == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert "count=2" in out
    assert "magnetization=1/2" in out
    assert "lemma1=PASS" in out


@pytest.mark.parametrize("side", ["3", "5"])
def test_oracle_identity_passes(capsys, side):
    assert _run("oracle", "--dim", "2", "--side", side, "--check-lemma1") == EXIT_OK
    assert "lemma1=PASS" in capsys.readouterr().out.splitlines()


def test_oracle_listing_method(capsys):
    assert _run("oracle", "--dim", "2", "--side", "3", "--method", "dfs", "--check-lemma1") == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert "count=528" in out
    assert "lemma1_sum_origin_spin=240" in out


def test_oracle_checks_the_identity_on_listed_states(capsys):
    assert _run("oracle", "--dim", "2", "--side", "3", "--check-lemma1") == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert "method=dfs" in out
    assert "lemma1_source=listed-states" in out
    assert "lemma1_count_connected=240" in out


def test_oracle_counts_larger_boxes(capsys):
    assert _run("oracle", "--dim", "2", "--side", "5", "--check-lemma1") == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert "method=transfer" in out
    assert "lemma1_source=census" in out
    assert "magnetization=992015/3010962" in out


def test_oracle_over_the_cap(capsys):
    assert _run("oracle", "--dim", "2", "--side", "99") == EXIT_CAP
    assert "cap" in capsys.readouterr().err


def test_couple_check(capsys):
    assert _run("couple-check", "--dim", "2", "--side", "5", "--steps", "20000", "--seed", "3") == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert "containment=PASS" in out
    assert "containment_checkpoints=800" in out


def test_couple_check_in_three_dimensions():
    assert _run("couple-check", "--dim", "3", "--side", "3", "--steps", "5000", "--seed", "3",
                "--checkpoint", "10") == EXIT_OK


def test_couple_check_without_steps(capsys):
    assert _run("couple-check", "--dim", "2", "--side", "3", "--steps", "0", "--seed", "3") == EXIT_OK
    assert "containment_checkpoints=0" in capsys.readouterr().out.splitlines()


def test_perc_tail(tmp_path):
    path = tmp_path / "tail.csv"
    assert _run("perc-tail", "--side", "11", "--samples", "4000", "--seed", "5", "--output", str(path)) == EXIT_OK
    body = FileManager.read_body(str(path))
    assert body[0] == "n,count,empirical_tail"
    n, count, tail = body[2].split(",")
    assert n == "1"
    assert abs(float(tail) - 0.5) < 4 * 0.5 / 4000 ** 0.5
    assert any(line.startswith("# fit_slope") for line in path.read_text().splitlines())


def test_perc_tail_single_sample(tmp_path):
    path = tmp_path / "tail.csv"
    assert _run("perc-tail", "--side", "5", "--samples", "1", "--seed", "5", "--output", str(path)) == EXIT_OK
    body = FileManager.read_body(str(path))
    assert body[0] == "n,count,empirical_tail"
    assert len(body) >= 2


def test_unwritable_output_is_an_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert _run("sample", "--dim", "2", "--side", "1", "--output", str(blocker / "out.txt")) == 1


def test_global_flags_after_the_subcommand(tmp_path):
    path = tmp_path / "out.txt"
    assert main(["sample", "--dim", "2", "--side", "3", "--seed", "1", "--workers", "2", "--quiet", "--no-timing",
                 "--output", str(path)]) == EXIT_OK
    lines = path.read_text().splitlines()
    assert "# workers: 2" in lines
    assert "# quiet: True" in lines
    assert "# timestamp: none" in lines


def test_global_flags_before_the_subcommand_are_kept(tmp_path):
    path = tmp_path / "out.txt"
    assert _run("sample", "--dim", "2", "--side", "3", "--seed", "1", "--output", str(path)) == EXIT_OK
    lines = path.read_text().splitlines()
    assert "# workers: 1" in lines
    assert "# no_timing: True" in lines
    assert "# timestamp: none" in lines


def test_couple_check_logs_every_checkpoint(caplog):
    caplog.set_level(logging.INFO, logger="begfad.percolation")
    assert main(["--no-timing", "couple-check", "--dim", "2", "--side", "3", "--steps", "90", "--seed", "3",
                 "--checkpoint", "30"]) == EXIT_OK
    checkpoints = [record for record in caplog.records if record.getMessage().startswith("Checkpoint")]
    assert len(checkpoints) == 3
