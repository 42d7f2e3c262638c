"""End-to-end command-line tests, driving main() in process."""

import json
import os

import numpy as np
import pytest

import fracgrid.cli as cli
from fracgrid.cli import EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO, EXIT_OK, main
from fracgrid.csvio import read_grid_csv

SIM_FLAGS = [
    "--gamma", "0.8",
    "--dt", "1",
    "--dx", "10",
    "--grid", "12x12",
    "--steps", "10",
    "--source", "6,6=10",
    "--snapshot-every", "5",
]


def run_simulate(out_dir, extra=()):
    return main(["simulate", "--out-dir", str(out_dir), *SIM_FLAGS, *extra])


def test_simulate_writes_artifacts(tmp_path):
    out = tmp_path / "out"
    assert run_simulate(out) == EXIT_OK

    for name in ("grid_final.csv", "profile.csv", "trace.csv", "profile.svg"):
        assert (out / name).is_file()
    for step in (0, 5, 10):
        assert (out / "snapshots" / f"step_{step:06d}.csv").is_file()

    final = read_grid_csv(str(out / "grid_final.csv"))
    assert final.shape == (12, 12)
    assert np.all(final[0, :] == 0.0) and np.all(final[:, -1] == 0.0)

    assert (out / "profile.csv").read_text().count("\n") == 12
    first_trace = (out / "trace.csv").read_text().splitlines()[0]
    assert first_trace == "0,10"

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["tool"] == "fracgrid"
    assert manifest["command"] == "simulate"
    assert manifest["config"]["gamma"] == 0.8
    assert manifest["config"]["memory"] == "full"
    assert manifest["elapsed_seconds"] >= 0.0
    assert manifest["artifacts"] == sorted(manifest["artifacts"])
    for rel in manifest["artifacts"]:
        assert (out / rel).is_file(), rel


def test_simulate_missing_values(tmp_path, capsys):
    rc = main(["simulate", "--out-dir", str(tmp_path / "x")])
    assert rc == EXIT_CONFIG
    assert "missing required settings" in capsys.readouterr().err


def test_simulate_rejects_bad_gamma(tmp_path, capsys):
    rc = run_simulate(tmp_path / "x", ["--gamma", "2.5"])
    # later occurrence of --gamma wins in argparse
    assert rc == EXIT_CONFIG
    assert "gamma" in capsys.readouterr().err


def test_simulate_rejects_bad_memory(tmp_path, capsys):
    rc = run_simulate(tmp_path / "x", ["--memory", "sideways:3"])
    assert rc == EXIT_CONFIG
    assert "memory" in capsys.readouterr().err


@pytest.mark.parametrize("clash", [("--grid", "12x12"), ("--source", "6,6=10")])
def test_initial_grid_conflicts(tmp_path, capsys, clash):
    rc = main(
        [
            "simulate", "--out-dir", str(tmp_path / "x"),
            "--gamma", "0.8", "--dt", "1", "--dx", "10", "--steps", "10",
            "--initial-grid", str(tmp_path / "whatever.csv"),
            *clash,
        ]
    )
    assert rc == EXIT_CONFIG
    assert "--initial-grid" in capsys.readouterr().err


def test_missing_initial_grid_file(tmp_path, capsys):
    rc = main(
        [
            "simulate", "--out-dir", str(tmp_path / "x"),
            "--gamma", "0.8", "--dt", "1", "--dx", "10", "--steps", "10",
            "--initial-grid", str(tmp_path / "nope.csv"),
        ]
    )
    assert rc == EXIT_IO
    assert "fracgrid:" in capsys.readouterr().err


def test_out_dir_is_a_file(tmp_path, capsys):
    blocked = tmp_path / "blocked"
    blocked.write_text("not a directory")
    assert run_simulate(blocked) == EXIT_IO


def test_memory_cap_too_small(tmp_path, capsys):
    rc = run_simulate(tmp_path / "x", ["--memory-cap", "64"])
    assert rc == EXIT_CONFIG
    assert "fracgrid:" in capsys.readouterr().err


@pytest.mark.filterwarnings("ignore::fracgrid.solver.StabilityWarning")
@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
def test_divergent_run_exits_3(tmp_path, capsys):
    rc = main(
        [
            "simulate", "--out-dir", str(tmp_path / "x"),
            "--gamma", "1", "--dt", "1", "--dx", "1",
            "--grid", "9x9", "--steps", "500",
            "--source", "4,4=10",
        ]
    )
    assert rc == EXIT_DIVERGED
    assert "diverged at step" in capsys.readouterr().err


def test_schedule_stdout_golden(capsys):
    assert main(["schedule", "--k", "9", "--memory", "adaptive:3"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines == [
        "m,w",
        "0,1",
        "1,1",
        "2,1",
        "3,1",
        "5,3",
        "8,3",
        "entries=6 weight_sum=10 gaps=0 overlaps=0",
    ]


def test_schedule_reports_gaps_and_overlaps(capsys):
    assert main(["schedule", "--k", "260", "--memory", "adaptive:4"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert "entries=50 weight_sum=260 gaps=3 overlaps=2" in lines
    assert "gap offsets: 254,255,256" in lines
    assert "overlap offsets: 65,66" in lines


def test_schedule_out_dir(tmp_path, capsys):
    out = tmp_path / "sched"
    rc = main(
        ["schedule", "--k", "9", "--memory", "adaptive:3", "--out-dir", str(out)]
    )
    assert rc == EXIT_OK
    text = (out / "schedule.csv").read_text()
    assert text == "m,w\n0,1\n1,1\n2,1\n3,1\n5,3\n8,3\n"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "schedule"
    assert manifest["artifacts"] == ["schedule.csv"]
    # the table goes to the file, not stdout; the summary is still printed
    captured = capsys.readouterr().out
    assert "0,1" not in captured
    assert "entries=6" in captured


@pytest.mark.parametrize(
    "argv",
    [
        ["schedule", "--k", "-1", "--memory", "full"],
        ["schedule", "--k", "5", "--memory", "sideways:3"],
        ["schedule", "--k", "5", "--memory", "full", "--dt", "0"],
        ["schedule", "--k", "5", "--memory", "short:0"],
    ],
)
def test_schedule_bad_flags(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "fracgrid:" in capsys.readouterr().err


BENCH_FLAGS = [
    "--dt", "1", "--dx", "10", "--grid", "12x12", "--steps", "40",
    "--source", "6,6=10",
]


def test_benchmark_artifacts(tmp_path):
    out = tmp_path / "bench"
    rc = main(
        [
            "benchmark", "--out-dir", str(out), *BENCH_FLAGS,
            "--gammas", "0.5,1",
            "--short-lengths", "5,10",
            "--adaptive-bases", "3",
            "--repeats", "1",
        ]
    )
    assert rc == EXIT_OK

    lines = (out / "benchmark.csv").read_text().splitlines()
    assert lines[0] == "strategy,param,gamma,elapsed_s,err_l2_pct,err_linf_pct"
    # (full + 2 short + 1 adaptive) per gamma
    assert len(lines) == 1 + 2 * 4
    rows = [line.split(",") for line in lines[1:]]
    assert [r[0] for r in rows[:4]] == ["adaptive", "full", "short", "short"]
    assert all(r[2] == "0.5" for r in rows[:4])
    assert all(r[2] == "1" for r in rows[4:])

    by_key = {(r[0], r[1], r[2]): r for r in rows}
    assert by_key[("full", "0", "0.5")][4] == "0"  # reference error is exact
    assert float(by_key[("short", "5", "0.5")][4]) > 0.0
    # with gamma = 1 only the newest stencil field matters: every strategy
    # matches the reference exactly and the error-vs-time plot is skipped
    assert by_key[("short", "5", "1")][4] == "0"
    assert (out / "error_vs_time_gamma_0p5.svg").is_file()
    assert not (out / "error_vs_time_gamma_1.svg").exists()

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "benchmark"
    assert manifest["sweep"]["gammas"] == [0.5, 1.0]
    assert manifest["sweep"]["adaptive_bases"] == [3]


def test_benchmark_rejects_bad_sweep(tmp_path, capsys):
    rc = main(
        [
            "benchmark", "--out-dir", str(tmp_path / "x"), *BENCH_FLAGS,
            "--gammas", "0.5,1.5",
        ]
    )
    assert rc == EXIT_CONFIG
    assert "gammas" in capsys.readouterr().err


def test_sweep_gamma_artifacts(tmp_path):
    out = tmp_path / "sweep"
    rc = main(
        [
            "sweep-gamma", "--out-dir", str(out),
            "--dt", "0.5", "--dx", "5", "--grid", "12x12", "--steps", "20",
            "--source", "6,6=0.1",
            "--gammas", "0.75,1",
        ]
    )
    assert rc == EXIT_OK
    for name in (
        "profile_gamma_0p75.csv",
        "trace_gamma_0p75.csv",
        "profile_gamma_1.csv",
        "trace_gamma_1.csv",
        "profiles.svg",
        "traces.svg",
    ):
        assert (out / name).is_file(), name
    first = (out / "trace_gamma_0p75.csv").read_text().splitlines()[0]
    assert first == "0,0.1"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["sweep"]["gammas"] == [0.75, 1.0]


def test_initial_grid_reproduces_source_run(tmp_path):
    first = tmp_path / "first"
    assert run_simulate(first) == EXIT_OK

    second = tmp_path / "second"
    rc = main(
        [
            "simulate", "--out-dir", str(second),
            "--gamma", "0.8", "--dt", "1", "--dx", "10", "--steps", "10",
            "--snapshot-every", "5",
            "--initial-grid", str(first / "snapshots" / "step_000000.csv"),
        ]
    )
    assert rc == EXIT_OK
    assert (second / "grid_final.csv").read_bytes() == (
        first / "grid_final.csv"
    ).read_bytes()


def test_reruns_are_byte_identical(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run_simulate(out_a) == EXIT_OK
    assert run_simulate(out_b) == EXIT_OK
    for name in (
        "grid_final.csv",
        "profile.csv",
        "trace.csv",
        "profile.svg",
        os.path.join("snapshots", "step_000010.csv"),
    ):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


THREAD_VARS = (
    "OPENBLAS_NUM_THREADS",
    "OMP_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def clear_thread_env(monkeypatch):
    monkeypatch.delenv("FRACGRID_THREADS", raising=False)
    for var in THREAD_VARS:
        monkeypatch.delenv(var, raising=False)


def test_thread_cap_unset_or_zero(monkeypatch):
    clear_thread_env(monkeypatch)
    assert cli._export_thread_cap() is None
    monkeypatch.setenv("FRACGRID_THREADS", "")
    assert cli._export_thread_cap() is None
    monkeypatch.setenv("FRACGRID_THREADS", "0")
    assert cli._export_thread_cap() is None
    assert all(var not in os.environ for var in THREAD_VARS)


def test_thread_cap_seeds_blas_vars(monkeypatch):
    clear_thread_env(monkeypatch)
    monkeypatch.setenv("FRACGRID_THREADS", "2")
    assert cli._export_thread_cap() is None
    assert all(os.environ[var] == "2" for var in THREAD_VARS)


def test_thread_cap_never_overrides(monkeypatch):
    clear_thread_env(monkeypatch)
    monkeypatch.setenv("FRACGRID_THREADS", "2")
    monkeypatch.setenv("OMP_NUM_THREADS", "7")
    assert cli._export_thread_cap() is None
    assert os.environ["OMP_NUM_THREADS"] == "7"
    assert os.environ["OPENBLAS_NUM_THREADS"] == "2"


@pytest.mark.parametrize("bad", ["abc", "-1", "1.5"])
def test_thread_cap_bad_values(monkeypatch, bad):
    clear_thread_env(monkeypatch)
    monkeypatch.setenv("FRACGRID_THREADS", bad)
    message = cli._export_thread_cap()
    assert message is not None and "FRACGRID_THREADS" in message


def test_thread_cap_error_exits_config(monkeypatch, capsys):
    monkeypatch.setattr(cli, "_THREAD_CAP_ERROR", "FRACGRID_THREADS must be an integer, got 'x'")
    rc = main(["schedule", "--k", "1", "--memory", "full"])
    assert rc == EXIT_CONFIG
    assert "FRACGRID_THREADS" in capsys.readouterr().err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert "fracgrid" in capsys.readouterr().out
