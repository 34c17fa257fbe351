"""Monte Carlo sweep over obstacle count and critical-area radius.

Every trial gets its own seed derived from ``(base_seed, n, r_ca in mm,
trial index)``, so a cell's outcomes depend neither on which other cells are
run nor on how trials are spread over worker processes.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .simulator import COLLISION, SUCCESS, TIMEOUT, EpisodeConfig, run_episode

CSV_HEADER = ["n", "r_ca", "trials", "successes", "collisions", "timeouts",
              "success_ratio", "mean_travel_time"]

DEFAULT_N_VALUES = tuple(range(1, 11))
DEFAULT_R_CA_VALUES = (2.0, 3.0, 4.0, 5.0, 6.0)
DEFAULT_TRIALS = 200


class EmptyResult(ValueError):
    pass


@dataclass(frozen=True)
class BatchSpec:
    n_values: tuple[int, ...] = DEFAULT_N_VALUES
    r_ca_values: tuple[float, ...] = DEFAULT_R_CA_VALUES
    trials: int = DEFAULT_TRIALS
    base_seed: int = 0
    episode_template: EpisodeConfig = field(default_factory=EpisodeConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.n_values or not self.r_ca_values:
            raise ValueError("n_values and r_ca_values must be non-empty")


@dataclass(frozen=True)
class CellResult:
    n: int
    r_ca: float
    trials: int
    successes: int
    collisions: int
    timeouts: int
    mean_travel_time: float

    @property
    def success_ratio(self) -> float:
        return self.successes / self.trials


@dataclass
class BatchResult:
    cells: list[CellResult]

    def cell(self, n: int, r_ca: float) -> CellResult:
        for c in self.cells:
            if c.n == n and math.isclose(c.r_ca, r_ca):
                return c
        raise KeyError((n, r_ca))


def trial_seed(base_seed: int, n: int, r_ca: float, trial: int) -> int:
    """Stable 64-bit seed for one trial."""
    ss = np.random.SeedSequence([base_seed, n, int(round(r_ca * 1000)), trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def trial_config(spec: BatchSpec, n: int, r_ca: float, trial: int) -> EpisodeConfig:
    tpl = spec.episode_template
    env = dataclasses.replace(tpl.env, n=n, seed=trial_seed(spec.base_seed, n, r_ca, trial))
    planner = dataclasses.replace(tpl.planner, r_ca=r_ca)
    return dataclasses.replace(tpl, env=env, planner=planner)


def _run_trial(args) -> tuple[int, float, int, str, float]:
    spec, n, r_ca, trial = args
    result = run_episode(trial_config(spec, n, r_ca, trial))
    return n, r_ca, trial, result.outcome, result.travel_time


def _aggregate(n: int, r_ca: float, outcomes: list[tuple[str, float]]) -> CellResult:
    times = [t for o, t in outcomes if o == SUCCESS]
    return CellResult(
        n=n,
        r_ca=r_ca,
        trials=len(outcomes),
        successes=sum(o == SUCCESS for o, _ in outcomes),
        collisions=sum(o == COLLISION for o, _ in outcomes),
        timeouts=sum(o == TIMEOUT for o, _ in outcomes),
        mean_travel_time=sum(times) / len(times) if times else math.nan,
    )


def run_batch(spec: BatchSpec, workers: int = 1) -> BatchResult:
    tasks = [(spec, n, r_ca, k) for n in spec.n_values for r_ca in spec.r_ca_values
             for k in range(spec.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        rows = [_run_trial(t) for t in tasks]

    by_cell: dict[tuple[int, float], dict[int, tuple[str, float]]] = {}
    for n, r_ca, trial, outcome, travel in rows:
        by_cell.setdefault((n, r_ca), {})[trial] = (outcome, travel)
    cells = [_aggregate(n, r_ca, [by_cell[(n, r_ca)][k] for k in sorted(by_cell[(n, r_ca)])])
             for n, r_ca in sorted(by_cell)]
    return BatchResult(cells)


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.4f}"


def write_csv(result: BatchResult, path, comments: Sequence[str] = ()) -> None:
    """Write one row per cell, sorted by (n, r_ca), after optional ``#`` comment lines."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for c in sorted(result.cells, key=lambda c: (c.n, c.r_ca)):
                w.writerow([c.n, f"{c.r_ca:g}", c.trials, c.successes, c.collisions, c.timeouts,
                            _fmt(c.success_ratio), _fmt(c.mean_travel_time)])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path) -> BatchResult:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = csv.DictReader(line for line in fh if not line.startswith("#"))
        cells = [CellResult(int(r["n"]), float(r["r_ca"]), int(r["trials"]), int(r["successes"]),
                            int(r["collisions"]), int(r["timeouts"]), float(r["mean_travel_time"]))
                 for r in rows]
    return BatchResult(cells)


def render_plot(result: BatchResult, path, title: Optional[str] = "Critical area comparison") -> None:
    """Success ratio vs obstacle count, one line per critical-area radius, as SVG."""
    if not result.cells:
        raise EmptyResult("nothing to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed hash salt keeps the SVG byte-stable across runs
    matplotlib.rcParams["svg.hashsalt"] = "dynavoid"
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for r_ca in sorted({c.r_ca for c in result.cells}):
        cells = sorted((c for c in result.cells if c.r_ca == r_ca), key=lambda c: c.n)
        ax.plot([c.n for c in cells], [c.success_ratio for c in cells], marker="o",
                label=f"r_ca = {r_ca:g} m")
    ax.set_xlabel("number of dynamic obstacles")
    ax.set_ylabel("success ratio")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
