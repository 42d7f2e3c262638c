"""Command-line front end.

Exit codes: 0 on success, 2 for configuration problems, 3 when a run
diverges, 4 for I/O failures.
"""

from __future__ import annotations

import os


def _export_thread_cap() -> str | None:
    """Honour FRACGRID_THREADS before numpy loads its BLAS backend.

    0 or unset means "let the libraries decide".  The cap is best-effort: it
    only seeds the usual thread-count environment variables and never
    overrides ones already set.  Returns an error message for bad values so
    main() can report them with a config-error exit.
    """
    raw = os.environ.get("FRACGRID_THREADS")
    if raw is None or raw.strip() == "":
        return None
    try:
        count = int(raw.strip())
    except ValueError:
        return f"FRACGRID_THREADS must be an integer, got {raw!r}"
    if count < 0:
        return f"FRACGRID_THREADS must be >= 0, got {count}"
    if count > 0:
        for var in (
            "OPENBLAS_NUM_THREADS",
            "OMP_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ.setdefault(var, str(count))
    return None


_THREAD_CAP_ERROR = _export_thread_cap()

import argparse
import datetime as _dt
import json
import logging
import sys

import numpy as np

from . import __version__
from .benchmark import gamma_sweep, run_comparison, source_cell
from .config import (
    BENCHMARK_SCENARIO,
    ConfigError,
    SPREAD_SCENARIO,
    build_simulation,
    build_sweep,
    config_as_dict,
    load_config_file,
    parse_source,
)
from .csvio import (
    format_float,
    read_grid_csv,
    write_benchmark_csv,
    write_grid_csv,
    write_profile_csv,
    write_schedule_csv,
    write_trace_csv,
)
from .grid import slice_profile
from .schedule import coverage_report, parse_memory_spec
from .solver import DivergenceError, run
from .svgplot import Series, write_line_plot

log = logging.getLogger("fracgrid")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4


def _add_simulation_flags(parser: argparse.ArgumentParser, *, sweep: bool) -> None:
    parser.add_argument("--config", help="INI configuration file")
    parser.add_argument("--out-dir", default="out", help="artifact directory (default: out)")
    if not sweep:
        parser.add_argument("--gamma", type=float, help="anomalous exponent in (0, 1]")
        parser.add_argument("--memory", help="history strategy: full, short:<length>, adaptive:<base>")
    parser.add_argument("--alpha", type=float, help="diffusion coefficient")
    parser.add_argument("--beta", type=float, help="linear decay rate")
    parser.add_argument("--dt", type=float, help="time step")
    parser.add_argument("--dx", type=float, help="grid spacing")
    parser.add_argument("--grid", help="grid extent NXxNY, e.g. 100x100")
    parser.add_argument("--steps", type=int, help="number of time steps")
    parser.add_argument(
        "--source",
        action="append",
        metavar="J,L=VALUE",
        help="point source (repeatable)",
    )
    parser.add_argument(
        "--initial-grid",
        metavar="CSV",
        help="dense initial field; grid extent and sources come from this file",
    )
    parser.add_argument("--snapshot-every", type=int, help="snapshot cadence in steps")
    parser.add_argument("--memory-cap", type=int, help="history allocation cap in bytes")


def _add_sweep_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gammas", help="comma-separated gamma values")
    parser.add_argument("--short-lengths", help="comma-separated short-memory horizons")
    parser.add_argument("--adaptive-bases", help="comma-separated adaptive base windows")
    parser.add_argument("--repeats", type=int, help="timing repeats per cell (best-of)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracgrid",
        description="Fractional reaction-diffusion on 2D grids with pluggable history memory.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log progress to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one simulation and write its artifacts")
    _add_simulation_flags(p, sweep=False)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser(
        "benchmark",
        help="score short/adaptive strategies against full memory",
    )
    _add_simulation_flags(p, sweep=True)
    _add_sweep_flags(p)
    p.set_defaults(handler=_cmd_benchmark)

    p = sub.add_parser(
        "sweep-gamma",
        help="run the same configuration across several gammas (full memory)",
    )
    _add_simulation_flags(p, sweep=True)
    p.add_argument("--gammas", help="comma-separated gamma values")
    p.set_defaults(handler=_cmd_sweep_gamma)

    p = sub.add_parser("schedule", help="dump a memory schedule and its coverage")
    p.add_argument("--k", type=int, required=True, help="step index")
    p.add_argument("--memory", required=True, help="full, short:<length> or adaptive:<base>")
    p.add_argument("--dt", type=float, default=1.0, help="time step (for short horizons)")
    p.add_argument("--out-dir", help="write schedule.csv and a manifest here")
    p.set_defaults(handler=_cmd_schedule)

    return parser


def _overrides_from_args(args: argparse.Namespace, *, sweep: bool) -> dict:
    over = {
        "alpha": args.alpha,
        "beta": args.beta,
        "dt": args.dt,
        "dx": args.dx,
        "grid": args.grid,
        "steps": args.steps,
        "snapshot_every": args.snapshot_every,
        "memory_cap": args.memory_cap,
        "sources": None,
        "gamma": None if sweep else args.gamma,
        "memory": None if sweep else args.memory,
    }
    if args.source:
        over["sources"] = tuple(parse_source(s) for s in args.source)
    if args.initial_grid:
        if args.grid or args.source:
            raise ConfigError(
                "--initial-grid already fixes the grid extent and sources; "
                "drop --grid/--source"
            )
        field = read_grid_csv(args.initial_grid)
        nz = np.argwhere(field != 0.0)
        over["grid"] = f"{field.shape[0]}x{field.shape[1]}"
        over["sources"] = tuple(
            (int(j), int(l), float(field[j, l])) for j, l in nz
        )
    return over


def _resolve_simulation(args: argparse.Namespace, *, sweep: bool, defaults=None):
    file_map = load_config_file(args.config) if args.config else {}
    overrides = _overrides_from_args(args, sweep=sweep)
    return build_simulation(file_map, overrides, defaults), file_map


def _utc_now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _write_manifest(
    out_dir: str,
    command: str,
    config: dict | None,
    artifacts: list[str],
    started: str,
    extra: dict | None = None,
) -> None:
    manifest = {
        "tool": "fracgrid",
        "version": __version__,
        "command": command,
        "started_utc": started,
        "finished_utc": _utc_now(),
        "config": config,
        "artifacts": sorted(artifacts),
    }
    if extra:
        manifest.update(extra)
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _gamma_tag(gamma: float) -> str:
    return format_float(gamma).replace(".", "p").replace("-", "m")


def _progress_every(n_steps: int, verbose: bool) -> int:
    return max(1, n_steps // 10) if verbose and n_steps else 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config, _ = _resolve_simulation(args, sweep=False)
    os.makedirs(args.out_dir, exist_ok=True)
    started = _utc_now()
    result = run(config, progress_every=_progress_every(config.n_steps, args.verbose))

    artifacts: list[str] = []

    def _path(name: str) -> str:
        artifacts.append(name)
        return os.path.join(args.out_dir, name)

    j, l = source_cell(config)
    write_grid_csv(result.final, _path("grid_final.csv"))
    profile = slice_profile(result.final, l)
    write_profile_csv(profile, _path("profile.csv"))
    steps = np.array([s for s, _ in result.snapshots], dtype=np.int64)
    values = np.array([g.data[j, l] for _, g in result.snapshots])
    write_trace_csv(steps, values, _path("trace.csv"))

    snap_dir = os.path.join(args.out_dir, "snapshots")
    os.makedirs(snap_dir, exist_ok=True)
    for step_no, grid in result.snapshots:
        name = os.path.join("snapshots", f"step_{step_no:06d}.csv")
        write_grid_csv(grid, _path(name))

    x = np.arange(config.nx, dtype=np.float64) * config.dx
    write_line_plot(
        [Series(name=f"step {config.n_steps}", x=x, y=profile)],
        _path("profile.svg"),
        title=f"Profile through cell ({j}, {l})",
        x_label="x",
        y_label="concentration",
    )
    _write_manifest(
        args.out_dir, "simulate", config_as_dict(config), artifacts, started,
        extra={"elapsed_seconds": result.elapsed_seconds},
    )
    log.info("wrote %d artifacts to %s", len(artifacts) + 1, args.out_dir)
    return EXIT_OK


def _cmd_benchmark(args: argparse.Namespace) -> int:
    config, file_map = _resolve_simulation(args, sweep=True, defaults=BENCHMARK_SCENARIO)
    sweep_over = {
        "gammas": args.gammas,
        "short_lengths": args.short_lengths,
        "adaptive_bases": args.adaptive_bases,
        "repeats": args.repeats,
    }
    spec = build_sweep(file_map, sweep_over)
    os.makedirs(args.out_dir, exist_ok=True)
    started = _utc_now()

    records = run_comparison(
        config,
        spec.gammas,
        spec.short_lengths,
        spec.adaptive_bases,
        repeats=spec.repeats,
    )
    for rec in records:
        if rec.failed:
            log.warning(
                "%s:%s at gamma=%s failed: %s",
                rec.strategy,
                format_float(rec.param),
                format_float(rec.gamma),
                rec.message,
            )

    artifacts: list[str] = []

    def _path(name: str) -> str:
        artifacts.append(name)
        return os.path.join(args.out_dir, name)

    write_benchmark_csv(records, _path("benchmark.csv"))

    for gamma in spec.gammas:
        series = []
        for name in ("short", "adaptive"):
            pts = [
                (r.elapsed_s, r.err_l2_pct)
                for r in records
                if r.strategy == name
                and r.gamma == gamma
                and not r.failed
                and r.err_l2_pct > 0.0
            ]
            if pts:
                pts.sort()
                series.append(
                    Series(
                        name=name,
                        x=np.array([p[0] for p in pts]),
                        y=np.array([p[1] for p in pts]),
                    )
                )
        if series:
            write_line_plot(
                series,
                _path(f"error_vs_time_gamma_{_gamma_tag(gamma)}.svg"),
                title=f"Relative L2 error vs run time, gamma={format_float(gamma)}",
                x_label="wall time (s)",
                y_label="relative L2 error (%)",
                log_y=True,
            )

    _write_manifest(
        args.out_dir,
        "benchmark",
        config_as_dict(config),
        artifacts,
        started,
        extra={
            "sweep": {
                "gammas": list(spec.gammas),
                "short_lengths": list(spec.short_lengths),
                "adaptive_bases": list(spec.adaptive_bases),
                "repeats": spec.repeats,
            }
        },
    )
    log.info("wrote %d artifacts to %s", len(artifacts) + 1, args.out_dir)
    return EXIT_OK


def _cmd_sweep_gamma(args: argparse.Namespace) -> int:
    config, file_map = _resolve_simulation(args, sweep=True, defaults=SPREAD_SCENARIO)
    sweep_over = {"gammas": args.gammas}
    spec = build_sweep(file_map, sweep_over)
    os.makedirs(args.out_dir, exist_ok=True)
    started = _utc_now()

    entries = gamma_sweep(config, spec.gammas)

    artifacts: list[str] = []

    def _path(name: str) -> str:
        artifacts.append(name)
        return os.path.join(args.out_dir, name)

    x = np.arange(config.nx, dtype=np.float64) * config.dx
    profile_series = []
    trace_series = []
    for entry in entries:
        tag = _gamma_tag(entry.gamma)
        write_profile_csv(entry.profile, _path(f"profile_gamma_{tag}.csv"))
        write_trace_csv(
            entry.trace_steps, entry.trace_values, _path(f"trace_gamma_{tag}.csv")
        )
        label = f"gamma={format_float(entry.gamma)}"
        profile_series.append(Series(name=label, x=x, y=entry.profile))
        trace_series.append(
            Series(
                name=label,
                x=entry.trace_steps.astype(np.float64) * config.dt,
                y=entry.trace_values,
            )
        )
    write_line_plot(
        profile_series,
        _path("profiles.svg"),
        title="Final profiles through the source",
        x_label="x",
        y_label="concentration",
    )
    write_line_plot(
        trace_series,
        _path("traces.svg"),
        title="Source-cell concentration over time",
        x_label="t",
        y_label="concentration",
    )
    _write_manifest(
        args.out_dir,
        "sweep-gamma",
        config_as_dict(config),
        artifacts,
        started,
        extra={"sweep": {"gammas": list(spec.gammas)}},
    )
    log.info("wrote %d artifacts to %s", len(artifacts) + 1, args.out_dir)
    return EXIT_OK


def _cmd_schedule(args: argparse.Namespace) -> int:
    try:
        strategy = parse_memory_spec(args.memory)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.k < 0:
        raise ConfigError(f"k must be >= 0, got {args.k}")
    if not args.dt > 0:
        raise ConfigError(f"dt must be positive, got {args.dt}")
    schedule = strategy.schedule_at(args.k, args.dt)
    stats = coverage_report(schedule, args.k)

    started = _utc_now()
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        write_schedule_csv(schedule, os.path.join(args.out_dir, "schedule.csv"))
        _write_manifest(
            args.out_dir,
            "schedule",
            {"memory": args.memory, "k": args.k, "dt": args.dt},
            ["schedule.csv"],
            started,
        )
    else:
        print("m,w")
        for m, w in schedule.pairs():
            print(f"{m},{w}")
    print(
        f"entries={stats.entry_count} weight_sum={stats.weight_sum} "
        f"gaps={stats.gap_count} overlaps={stats.overlap_count}"
    )
    if stats.gap_offsets:
        print("gap offsets: " + ",".join(str(g) for g in stats.gap_offsets))
    if stats.overlap_offsets:
        print("overlap offsets: " + ",".join(str(o) for o in stats.overlap_offsets))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    if _THREAD_CAP_ERROR is not None:
        print(f"fracgrid: {_THREAD_CAP_ERROR}", file=sys.stderr)
        return EXIT_CONFIG
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except DivergenceError as exc:
        print(f"fracgrid: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigError, ValueError) as exc:
        print(f"fracgrid: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"fracgrid: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
