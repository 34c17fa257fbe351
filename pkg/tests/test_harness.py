import dataclasses
import math

import pytest

from dynavoid.harness import (
    CSV_HEADER,
    BatchResult,
    BatchSpec,
    CellResult,
    EmptyResult,
    read_csv,
    render_plot,
    run_batch,
    trial_config,
    trial_seed,
    write_csv,
)

SMALL = BatchSpec(n_values=(1, 3), r_ca_values=(2.0, 3.0), trials=3, base_seed=5)


@pytest.fixture(scope="module")
def small_result():
    return run_batch(SMALL)


def test_grid_shape_and_counts(small_result):
    assert [(c.n, c.r_ca) for c in small_result.cells] == [(1, 2.0), (1, 3.0), (3, 2.0), (3, 3.0)]
    for c in small_result.cells:
        assert c.successes + c.collisions + c.timeouts == c.trials == 3
        assert 0.0 <= c.success_ratio <= 1.0


def test_workers_do_not_change_results(small_result):
    assert run_batch(SMALL, workers=2).cells == small_result.cells


def test_cell_independent_of_grid(small_result):
    alone = run_batch(dataclasses.replace(SMALL, n_values=(3,), r_ca_values=(2.0,)))
    assert alone.cells[0] == small_result.cell(3, 2.0)


def test_trial_seeds_distinct():
    seeds = {trial_seed(0, n, r, k) for n in range(1, 11) for r in (2, 3, 4, 5, 6) for k in range(50)}
    assert len(seeds) == 10 * 5 * 50
    assert trial_seed(0, 1, 2.0, 0) != trial_seed(1, 1, 2.0, 0)


def test_trial_config_applies_cell():
    cfg = trial_config(SMALL, 3, 2.0, 1)
    assert cfg.env.n == 3 and cfg.planner.r_ca == 2.0
    assert cfg.env.seed == trial_seed(5, 3, 2.0, 1)


def test_csv_roundtrip(tmp_path, small_result):
    path = tmp_path / "out.csv"
    write_csv(small_result, path, ["note"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# note"
    assert lines[1] == ",".join(CSV_HEADER)
    assert len(lines) == 2 + 4
    back = read_csv(path)
    for a, b in zip(back.cells, small_result.cells):
        assert (a.n, a.r_ca, a.trials, a.successes, a.collisions, a.timeouts) == \
               (b.n, b.r_ca, b.trials, b.successes, b.collisions, b.timeouts)


def test_csv_empty_and_nan(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv(BatchResult([]), path)
    assert path.read_text().splitlines() == [",".join(CSV_HEADER)]
    write_csv(BatchResult([CellResult(1, 2.0, 1, 0, 1, 0, math.nan)]), path)
    assert path.read_text().splitlines()[1] == "1,2,1,0,1,0,0.0000,nan"


def test_csv_bad_path(tmp_path):
    with pytest.raises(OSError):
        write_csv(BatchResult([]), tmp_path / "missing" / "x.csv")


def test_plot(tmp_path, small_result):
    import matplotlib.pyplot as plt

    path = tmp_path / "p.svg"
    render_plot(small_result, path)
    text = path.read_text()
    assert text.startswith("<?xml") and "svg" in text
    assert plt.get_fignums() == []
    with pytest.raises(EmptyResult):
        render_plot(BatchResult([]), path)


def test_plot_bytes_stable(tmp_path, small_result):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render_plot(small_result, a)
    render_plot(small_result, b)
    assert a.read_bytes() == b.read_bytes()


def test_spec_validation():
    with pytest.raises(ValueError):
        BatchSpec(trials=0)
    with pytest.raises(ValueError):
        BatchSpec(n_values=())
