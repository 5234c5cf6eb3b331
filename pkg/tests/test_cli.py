"""End-to-end command line runs."""

from __future__ import annotations

import json
import shlex
import sys
from pathlib import Path

import pytest

from montparnasse.cli import _parse_counts, main

STUB = str(Path(__file__).parent / "stub_folder.py")
FRUSTRATED = "(" * 12 + "." + ")" * 12


def stub_cmd(mode: str) -> str:
    return shlex.join([sys.executable, STUB, "--mode", mode])


def test_parse_counts() -> None:
    assert _parse_counts("5,10") == (5, 10)
    assert _parse_counts("1-3") == (1, 2, 3)
    assert _parse_counts("100-2300:100") == tuple(range(100, 2301, 100))
    with pytest.raises(ValueError):
        _parse_counts("5-3")
    with pytest.raises(ValueError):
        _parse_counts("")


def test_solve_prints_run_record(capsys) -> None:
    code = main(["solve", "--target", "(((...)))", "--budget", "500", "--seed", "2"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["solved"] is True
    assert record["best_bpd"] == 0
    assert record["algorithm"] == "mogrls"
    assert record["seed"] == 2
    assert len(record["best_sequence"]) == 9


def test_usage_errors_exit_2(capsys) -> None:
    cases = [
        ["solve", "--budget", "10"],  # no target at all
        ["solve", "--target", "((("],
        ["solve", "--target", "...", "--problems", "x.tsv"],
        ["solve", "--target", "(((...)))", "--algorithm", "pn"],  # pn without profile
        ["fold", "--sequence", "AAA", "--target", "..", "--kT", "0"],
    ]
    for argv in cases:
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == 2
        capsys.readouterr()


def test_engine_failure_exits_1(capsys) -> None:
    code = main(
        [
            "solve",
            "--target", "(((...)))",
            "--engine", "external",
            "--external-cmd", stub_cmd("die"),
        ]
    )
    assert code == 1
    assert "failed" in capsys.readouterr().err


def test_batch_and_report(tmp_path, capsys) -> None:
    out = tmp_path / "artifacts"
    problems = tmp_path / "problems.tsv"
    problems.write_text(f"id\tname\tstructure\n4\tfrustrated\t{FRUSTRATED}\n")
    code = main(
        [
            "batch",
            "--problems", str(problems),
            "--problem-id", "4",
            "--runs", "2",
            "--budget", "200",
            "--out", str(out),
        ]
    )
    assert code == 0
    stdout = capsys.readouterr().out
    assert "completed runs: 2, failed: 0" in stdout
    batch_dir = out / "4" / "mogrls"
    assert (batch_dir / "run_0.json").exists()
    assert (batch_dir / "dataset.csv").exists()

    code = main(["report", "--dir", str(batch_dir)])
    assert code == 0
    assert "problem 4" in capsys.readouterr().out
    assert (batch_dir / "curve.png").exists()


def test_report_without_artifacts_exits_1(tmp_path, capsys) -> None:
    assert main(["report", "--dir", str(tmp_path)]) == 1
    assert "no run artifacts" in capsys.readouterr().err


def test_pn_solve_via_cli(capsys) -> None:
    code = main(
        [
            "solve",
            "--target", "(((...)))",
            "--algorithm", "pn",
            "--profile", "100,400",
            "--restarts", "1",
        ]
    )
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["algorithm"] == "pn"
    assert record["solved"] is True


def test_fold_output(capsys) -> None:
    code = main(["fold", "--sequence", "GGGAAACCC", "--target", "(((...)))"])
    assert code == 0
    out = capsys.readouterr().out
    assert "mfe_structure        (((...)))" in out
    assert "mfe_energy           -3.0" in out
    assert "target_probability" in out


def test_tune_reports_best_strategy(tmp_path, capsys) -> None:
    dataset = tmp_path / "dataset.csv"
    rows = ["run_id,checkpoint,best_bpd"]
    for run_id in range(3):
        for i, bpd in enumerate((1, 0, 0)):
            rows.append(f"{run_id},{(i + 1) * 100},{bpd}")
    for run_id in range(3, 6):
        for i in range(3):
            rows.append(f"{run_id},{(i + 1) * 100},2")
    dataset.write_text("\n".join(rows) + "\n")

    code = main(
        [
            "tune",
            "--dataset", str(dataset),
            "--restart-options", "3",
            "--max-slots", "2",
            "--possible", "1,2,3",
            "--samples", "2000",
            "--seed", "0",
        ]
    )
    assert code == 0
    result = json.loads(capsys.readouterr().out)
    assert result["thresholds"] == [1, 2]
    assert result["restart_budget"] == 3
    assert 0.6 < result["solved_fraction"] < 1.0


def test_config_file_supplies_defaults(tmp_path, capsys) -> None:
    config = tmp_path / "run.cfg"
    config.write_text("# defaults for quick runs\nseed=9\nbudget=700\n")
    code = main(["--config", str(config), "solve", "--target", "(((...)))"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["seed"] == 9

    # An explicit flag still beats the config file.
    code = main(["--config", str(config), "solve", "--target", "(((...)))", "--seed", "4"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["seed"] == 4


def test_environment_supplies_external_command(monkeypatch, capsys) -> None:
    monkeypatch.setenv("MONTPARNASSE_EXTERNAL_CMD", stub_cmd("ok"))
    code = main(["solve", "--target", "(((...)))", "--engine", "external", "--budget", "5"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["solved"] is True  # the ok stub always claims the target

    # An explicit flag beats the environment.
    monkeypatch.setenv("MONTPARNASSE_EXTERNAL_CMD", stub_cmd("die"))
    code = main(
        [
            "solve",
            "--target", "(((...)))",
            "--engine", "external",
            "--external-cmd", stub_cmd("ok"),
            "--budget", "5",
        ]
    )
    assert code == 0
    capsys.readouterr()


def test_bad_config_file_exits_2(tmp_path, capsys) -> None:
    config = tmp_path / "bad.cfg"
    config.write_text("seed 9\n")
    with pytest.raises(SystemExit) as excinfo:
        main(["--config", str(config), "solve", "--target", "..."])
    assert excinfo.value.code == 2
    capsys.readouterr()
