"""Command-line front end.

Subcommands: run (one experiment), benchmark (algorithm x map matrix),
compare (shared-population head-to-head), map-info. A JSON config given
via --config overrides the command-line flags. SWARM_BENCH_OUT overrides
--out.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from .bench import (ENV_OUT, ExperimentConfig, emit_plot_data, map_info,
                    run_experiment)
from .errors import ConfigError, IoError
from .kernels import BACKEND
from .presets import DEFAULT_PRESET, PRESETS


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--map", help="path to an ASCII map file")
    p.add_argument("--algo", help="algorithm or preset name")
    p.add_argument("--cell-size", type=float, dest="cell_size")
    p.add_argument("--pop-size", type=int, dest="pop_size")
    p.add_argument("--k-targets", type=int, dest="k_targets")
    p.add_argument("--energy", type=int)
    p.add_argument("--robots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--max-gens", type=int, dest="max_gens")
    p.add_argument("--early-stop", type=int, dest="early_stop")
    p.add_argument("--scan-stride", type=int, dest="scan_stride")
    p.add_argument("--no-noise", action="store_true",
                   help="disable LIDAR range noise")
    p.add_argument("--out", help="output directory (default: results)")
    p.add_argument("--parallel", type=int,
                   help="concurrent repetitions (default: 1)")
    p.add_argument("--label", help="experiment directory name")
    p.add_argument("--config", help="JSON config file; overrides flags")


def _config_from_args(args, overrides=None) -> ExperimentConfig:
    data = {}
    for key in ("map", "algo", "cell_size", "pop_size", "k_targets", "energy",
                "robots", "seed", "reps", "max_gens", "early_stop",
                "scan_stride", "out", "parallel", "label"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if getattr(args, "no_noise", False):
        data["sensor_noise"] = False
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data.update(json.load(fh))
    if overrides:
        data.update(overrides)
    if "map" not in data:
        raise ConfigError("a map is required (--map or config file)")
    return ExperimentConfig(**data)


def _print_summary(cfg: ExperimentConfig, records):
    rates = [r.final_rate for r in records]
    avg = sum(rates) / len(rates)
    print(f"{cfg.experiment_label}: reps={len(records)} "
          f"rate avg={avg:.4f} min={min(rates):.4f} max={max(rates):.4f} "
          f"steps={sum(r.total_steps for r in records)} "
          f"fitevals={sum(r.total_fitevals for r in records)} "
          f"computation={sum(r.computation_s for r in records):.1f}s")


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    records = run_experiment(cfg)
    _print_summary(cfg, records)
    return 0


def cmd_benchmark(args) -> int:
    maps = args.maps.split(",")
    algos = args.algos.split(",")
    all_records = {}
    for map_path in maps:
        per_map = []
        for algo in algos:
            cfg = _config_from_args(args, overrides={"map": map_path, "algo": algo})
            records = run_experiment(cfg)
            _print_summary(cfg, records)
            per_map.extend(records)
        all_records[map_path] = per_map
        out_root = (Path(os.environ.get(ENV_OUT, cfg.out))
                    / f"plots_{Path(map_path).stem}")
        emit_plot_data(per_map, out_root)
        print(f"plot data: {out_root}")
    return 0


def cmd_compare(args) -> int:
    algos = args.algos.split(",")
    all_records = []
    hashes = set()
    for algo in algos:
        cfg = _config_from_args(args, overrides={"algo": algo})
        records = run_experiment(cfg)
        _print_summary(cfg, records)
        all_records.extend(records)
        hashes.update(r.init_population_hash for r in records if r.rep == 0)
    if len(hashes) > 1:
        print("warning: initial populations differ across algorithms",
              file=sys.stderr)
    out_root = Path(os.environ.get(ENV_OUT, cfg.out)) / "plots_compare"
    stats = emit_plot_data(all_records, out_root)
    front = [d["algorithm"] for d in stats["dominance"] if not d["dominated"]]
    print(f"pareto front (rate vs computation time): {', '.join(front)}")
    print(f"plot data: {out_root}")
    return 0


def cmd_map_info(args) -> int:
    info = map_info(args.map_path, args.cell_size or 0.1)
    print(f"{info['path']}: {info['width_cells']}x{info['height_cells']} cells, "
          f"{info['width_m']:.1f}x{info['height_m']:.1f} m at "
          f"{info['cell_size_m']} m/cell")
    print(f"interior obstacle ratio: {info['interior_obstacle_ratio']:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarm-bench",
        description="Multi-robot exploration simulator and metaheuristic "
                    "benchmarking harness")
    parser.add_argument("--version", action="store_true",
                        help="print version and kernel backend")
    sub = parser.add_subparsers(dest="command")

    p_run = sub.add_parser("run", help="run one experiment config")
    _add_common_flags(p_run)

    p_bench = sub.add_parser("benchmark", help="algorithm x map matrix")
    p_bench.add_argument("--maps", required=True, help="comma-separated map files")
    p_bench.add_argument("--algos", required=True, help="comma-separated algorithms")
    _add_common_flags(p_bench)

    p_cmp = sub.add_parser("compare", help="head-to-head with shared initial populations")
    p_cmp.add_argument("--algos", required=True, help="comma-separated algorithms")
    _add_common_flags(p_cmp)

    p_info = sub.add_parser("map-info", help="map dimensions and occupancy")
    p_info.add_argument("map_path")
    p_info.add_argument("--cell-size", type=float, dest="cell_size")
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        from . import __version__
        print(f"swarm-bench {__version__} (kernels: {BACKEND})")
        return 0
    if not args.command:
        parser.print_usage()
        return 2
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "benchmark":
            return cmd_benchmark(args)
        if args.command == "compare":
            return cmd_compare(args)
        if args.command == "map-info":
            return cmd_map_info(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"registered algorithms/presets: "
              f"{', '.join(sorted(set(PRESETS) | set(DEFAULT_PRESET)))}",
              file=sys.stderr)
        return 2
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


def main() -> None:
    sys.exit(cli_main())
