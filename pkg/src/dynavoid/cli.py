"""Command-line entry point: ``dynavoid episode`` and ``dynavoid batch``.

Exit codes: 0 success, 1 invalid configuration, 2 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import __version__
from .environment import EnvConfig
from .harness import DEFAULT_R_CA_VALUES, DEFAULT_TRIALS, BatchSpec, render_plot, run_batch, write_csv
from .planner import PlannerConfig
from .scenario import episode_to_dict, load_scenario
from .simulator import EpisodeConfig, run_episode, write_trajectory_log

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2

_ENV = EnvConfig()
_PLANNER = PlannerConfig()
_EPISODE = EpisodeConfig()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def parse_int_list(text: str) -> tuple[int, ...]:
    """``"1-10"``, ``"1..10"`` or ``"1,2,5"`` to a tuple of ints."""
    out = []
    for part in text.split(","):
        part = part.strip()
        for sep in ("..", "-"):
            if sep in part:
                lo, hi = part.split(sep, 1)
                out.extend(range(int(lo), int(hi) + 1))
                break
        else:
            out.append(int(part))
    if not out:
        raise ValueError(f"empty list {text!r}")
    return tuple(out)


def parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(",") if p.strip())


def _comments(payload: dict) -> list[str]:
    return [f"dynavoid {__version__}", "config " + json.dumps(payload, sort_keys=True)]


def _episode_config(args) -> EpisodeConfig:
    if args.scenario:
        return load_scenario(args.scenario)
    if args.seed is None or args.obstacles is None or args.r_ca is None:
        raise ValueError("without --scenario, --seed, --obstacles and --r-ca are required")
    return EpisodeConfig(
        env=dataclasses.replace(_ENV, n=args.obstacles, seed=args.seed),
        planner=dataclasses.replace(_PLANNER, r_ca=args.r_ca, d_sz=args.d_sz),
        v=args.v,
    )


def cmd_episode(args) -> int:
    cfg = _episode_config(args)
    result = run_episode(cfg)
    write_trajectory_log(result, args.out, _comments(episode_to_dict(cfg)))
    print(f"{result.outcome} travel_time={result.travel_time:.1f}s "
          f"path_length={result.path_length:.3f}m frames={len(result.frames)}")
    return EXIT_OK


def cmd_batch(args) -> int:
    template = EpisodeConfig(
        env=dataclasses.replace(_ENV, n_max=max(_ENV.n_max, max(args.obstacles))),
        planner=dataclasses.replace(_PLANNER, d_sz=args.d_sz,
                                    r_sensing_max=max(_PLANNER.r_sensing_max, max(args.r_ca))),
        v=args.v,
    )
    spec = BatchSpec(args.obstacles, args.r_ca, args.trials, args.seed, template)
    result = run_batch(spec, workers=args.workers)
    payload = {"n_values": list(spec.n_values), "r_ca_values": list(spec.r_ca_values),
               "trials": spec.trials, "base_seed": spec.base_seed,
               "template": episode_to_dict(template)}
    write_csv(result, args.out, _comments(payload))
    if args.plot:
        render_plot(result, args.plot)
    for c in result.cells:
        print(f"n={c.n:2d} r_ca={c.r_ca:g} success_ratio={c.success_ratio:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="dynavoid", formatter_class=fmt,
                     description="Local path planning among dynamic obstacles.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ep = sub.add_parser("episode", formatter_class=fmt, help="run one episode, write a trajectory log")
    ep.add_argument("--scenario", help="JSON scenario file (overrides the options below)")
    ep.add_argument("--seed", type=int, help="environment seed")
    ep.add_argument("--obstacles", type=int, help="number of dynamic obstacles")
    ep.add_argument("--r-ca", type=float, help="critical-area radius (m)")
    ep.add_argument("--d-sz", type=float, default=_PLANNER.d_sz, help="safe-zone distance (m)")
    ep.add_argument("--v", type=float, default=_EPISODE.v, help="robot speed (m/s)")
    ep.add_argument("--out", required=True, help="trajectory log (JSON lines)")
    ep.set_defaults(func=cmd_episode)

    b = sub.add_parser("batch", formatter_class=fmt, help="Monte Carlo sweep, write a CSV")
    b.add_argument("--obstacles", type=parse_int_list, default=tuple(range(1, 11)),
                   help="obstacle counts, e.g. 1-10 or 1,4,8")
    b.add_argument("--r-ca", type=parse_float_list, default=DEFAULT_R_CA_VALUES,
                   help="critical-area radii (m), comma separated")
    b.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="trials per cell")
    b.add_argument("--seed", type=int, default=0, help="base seed")
    b.add_argument("--d-sz", type=float, default=_PLANNER.d_sz, help="safe-zone distance (m)")
    b.add_argument("--v", type=float, default=_EPISODE.v, help="robot speed (m/s)")
    b.add_argument("--out", required=True, help="output CSV")
    b.add_argument("--plot", help="optional SVG plot of success ratio vs obstacle count")
    b.add_argument("--workers", type=int, default=1, help="worker processes")
    b.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"dynavoid: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"dynavoid: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
