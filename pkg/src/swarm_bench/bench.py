"""Experiment harness: seeded repetitions, metrics files, plot-ready data.

Counted quantities (steps, rates, fitevals, poses) go into the series
files and are byte-reproducible for a given config and seed, regardless
of parallelism. Wall-clock measurements live in separate timing files and
the summary, outside the determinism contract.
"""

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigError, IoError
from .exploration import MissionConfig, MissionResult, run_mission
from .gridmap import interior_obstacle_ratio, load_map_file, write_pgm
from .presets import resolve
from .sensor import LidarConfig

ENV_OUT = "SWARM_BENCH_OUT"


@dataclass
class ExperimentConfig:
    map: str
    algo: str = "xboa"
    cell_size: float = 0.1
    robots: int = 1
    energy: int = 3000
    pop_size: int | None = None
    k_targets: int = 1
    max_gens: int = 30
    early_stop: int = 10
    seed: int = 25
    reps: int = 10
    out: str = "results"
    parallel: int = 1
    scan_stride: int = 1
    sensor_noise: bool = True
    stop_rate: float = 0.99
    label: str | None = None

    def __post_init__(self):
        for name in ("cell_size", "robots", "energy", "k_targets", "max_gens",
                     "seed", "reps", "parallel", "scan_stride"):
            if getattr(self, name) is not None and getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        try:
            resolve(self.algo)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def experiment_label(self) -> str:
        if self.label:
            return self.label
        stem = Path(self.map).stem
        return f"{self.algo}_{stem}_k{self.k_targets}_r{self.robots}"

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class MetricsRecord:
    """Per-repetition outcome; the summary statistics in the aggregate are
    recomputable from the series."""
    algorithm: str
    map_name: str
    rep: int
    seed: int
    final_rate: float
    total_steps: int
    total_fitevals: int
    ticks: int
    computation_s: float
    wall_s: float
    outcome: str
    init_population_hash: str = ""
    series: list = field(default_factory=list)
    optimizer_rows: list = field(default_factory=list)


def mission_config_for(cfg: ExperimentConfig, rep: int) -> MissionConfig:
    truth = load_map_file(cfg.map, cfg.cell_size)
    return MissionConfig(
        truth_grid=truth,
        preset=resolve(cfg.algo),
        n_robots=cfg.robots,
        energy=cfg.energy,
        k_targets=cfg.k_targets,
        max_gens=cfg.max_gens,
        early_stop=cfg.early_stop,
        pop_size=cfg.pop_size,
        seed=cfg.seed + rep,
        lidar=LidarConfig(),
        stop_rate=cfg.stop_rate,
        scan_stride=cfg.scan_stride,
        sensor_noise=cfg.sensor_noise,
    )


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _series_rows(result: MissionResult):
    return [(t, rid, steps, f"{rate:.6f}", fe)
            for t, rid, steps, rate, fe in result.series]


def _optimizer_rows(result: MissionResult):
    return [(rid, rnd, gen, repr(best), fe)
            for rid, rnd, gen, best, fe in result.optimizer_rows]


def _trajectory_rows(result: MissionResult):
    return [(t, rid, f"{x:.6f}", f"{y:.6f}", h, e, mode)
            for t, rid, x, y, h, e, mode in result.trajectory]


def write_repetition_files(out_dir: Path, rep: int, result: MissionResult) -> None:
    _write_csv(out_dir / f"rep{rep}_series.csv",
               ["tick", "robot_id", "steps_used", "exploration_rate", "fitevals_cum"],
               _series_rows(result))
    _write_csv(out_dir / f"rep{rep}_optimizer.csv",
               ["robot_id", "round", "generation", "best_fitness", "fitevals"],
               _optimizer_rows(result))
    _write_csv(out_dir / f"rep{rep}_trajectory.csv",
               ["tick", "robot_id", "x_m", "y_m", "heading_deg", "energy", "mode"],
               _trajectory_rows(result))
    _write_csv(out_dir / f"rep{rep}_timings.csv",
               ["robot_id", "round", "computation_ms"],
               [(rid, rnd, f"{ms:.3f}") for rid, rnd, ms in result.round_timings])
    write_pgm(result.final_map, out_dir / f"rep{rep}_final.pgm")


def _run_repetition(cfg_data: dict, rep: int, out_dir_s: str) -> dict:
    cfg = ExperimentConfig.from_json(cfg_data)
    result = run_mission(mission_config_for(cfg, rep))
    out_dir = Path(out_dir_s)
    write_repetition_files(out_dir, rep, result)
    return {
        "algorithm": cfg.algo,
        "map_name": Path(cfg.map).stem,
        "rep": rep,
        "seed": cfg.seed + rep,
        "final_rate": result.final_rate,
        "total_steps": result.total_steps,
        "total_fitevals": result.total_fitevals,
        "ticks": result.ticks,
        "computation_s": result.computation_s,
        "wall_s": result.wall_s,
        "outcome": result.outcome,
        "init_population_hash": result.init_population_hash,
        "series": result.series,
        "optimizer_rows": result.optimizer_rows,
    }


def run_experiment(cfg: ExperimentConfig) -> list:
    """Execute ``reps`` missions with seeds seed, seed+1, ... and write the
    per-repetition files plus an aggregate summary."""
    out_root = Path(os.environ.get(ENV_OUT, cfg.out))
    out_dir = out_root / cfg.experiment_label
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "config.json", "w") as fh:
            json.dump(cfg.to_json(), fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write to {out_dir}: {exc}") from None

    cfg_data = cfg.to_json()
    if cfg.parallel > 1 and cfg.reps > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            futures = [pool.submit(_run_repetition, cfg_data, rep, str(out_dir))
                       for rep in range(cfg.reps)]
            rep_dicts = [f.result() for f in futures]
    else:
        rep_dicts = [_run_repetition(cfg_data, rep, str(out_dir))
                     for rep in range(cfg.reps)]

    records = [MetricsRecord(**d) for d in rep_dicts]
    summary = summarize(cfg, records)
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return records


def summarize(cfg: ExperimentConfig, records: list) -> dict:
    rates = [r.final_rate for r in records]
    return {
        "config": cfg.to_json(),
        "repetitions": [
            {k: v for k, v in asdict(r).items() if k not in ("series", "optimizer_rows")}
            for r in records
        ],
        "final_rate_avg": sum(rates) / len(rates),
        "final_rate_min": min(rates),
        "final_rate_max": max(rates),
        "total_steps": sum(r.total_steps for r in records),
        "total_fitevals": sum(r.total_fitevals for r in records),
        "computation_s": sum(r.computation_s for r in records),
        "wall_s": sum(r.wall_s for r in records),
    }


def emit_plot_data(records: list, out_dir) -> dict:
    """Tidy CSV bundles for the standard comparison plots, plus the
    dominance table (exploration rate vs computation time)."""
    if not records:
        raise ValueError("no records to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rate_rows = []
    fit_rows = []
    for r in records:
        for tick, rid, steps, rate, fe in r.series:
            rate_rows.append((r.algorithm, r.map_name, r.rep, tick, rid,
                              steps, f"{rate:.6f}", fe))
        for rid, rnd, gen, best, fe in r.optimizer_rows:
            fit_rows.append((r.algorithm, r.map_name, r.rep, rid, rnd, gen,
                             repr(best), fe))
    _write_csv(out_dir / "rate_vs_steps.csv",
               ["algorithm", "map", "rep", "tick", "robot_id", "steps_used",
                "exploration_rate", "fitevals_cum"], rate_rows)
    _write_csv(out_dir / "fitness_vs_generation.csv",
               ["algorithm", "map", "rep", "robot_id", "round", "generation",
                "best_fitness", "fitevals"], fit_rows)

    by_algo: dict = {}
    for r in records:
        by_algo.setdefault(r.algorithm, []).append(r)
    algo_stats = []
    for algo in sorted(by_algo):
        rs = by_algo[algo]
        algo_stats.append({
            "algorithm": algo,
            "avg_rate": sum(x.final_rate for x in rs) / len(rs),
            "avg_computation_s": sum(x.computation_s for x in rs) / len(rs),
            "avg_fitevals": sum(x.total_fitevals for x in rs) / len(rs),
        })
    _write_csv(out_dir / "computation_time.csv",
               ["algorithm", "avg_computation_s"],
               [(s["algorithm"], f"{s['avg_computation_s']:.3f}") for s in algo_stats])
    _write_csv(out_dir / "fitevals.csv",
               ["algorithm", "avg_fitevals"],
               [(s["algorithm"], f"{s['avg_fitevals']:.1f}") for s in algo_stats])

    dominance = dominance_table(algo_stats)
    _write_csv(out_dir / "dominance.csv",
               ["algorithm", "avg_rate", "avg_computation_s", "dominated"],
               [(d["algorithm"], f"{d['avg_rate']:.6f}",
                 f"{d['avg_computation_s']:.3f}", int(d["dominated"]))
                for d in dominance])
    return {"algorithms": algo_stats, "dominance": dominance}


def dominance_table(algo_stats: list) -> list:
    """Mark algorithms dominated on (exploration rate, computation time):
    A dominates B when A is at least as good on both and strictly better
    on one. Non-dominated rows form the Pareto front."""
    out = []
    for b in algo_stats:
        dominated = False
        for a in algo_stats:
            if a is b:
                continue
            ge_rate = a["avg_rate"] >= b["avg_rate"]
            le_time = a["avg_computation_s"] <= b["avg_computation_s"]
            strict = (a["avg_rate"] > b["avg_rate"]
                      or a["avg_computation_s"] < b["avg_computation_s"])
            if ge_rate and le_time and strict:
                dominated = True
                break
        out.append({"algorithm": b["algorithm"], "avg_rate": b["avg_rate"],
                    "avg_computation_s": b["avg_computation_s"],
                    "dominated": dominated})
    return out


def map_info(map_path, cell_size: float = 0.1) -> dict:
    grid = load_map_file(map_path, cell_size)
    return {
        "path": str(map_path),
        "width_cells": grid.spec.width_cells,
        "height_cells": grid.spec.height_cells,
        "cell_size_m": cell_size,
        "width_m": grid.spec.width_m,
        "height_m": grid.spec.height_m,
        "interior_obstacle_ratio": interior_obstacle_ratio(grid),
    }
