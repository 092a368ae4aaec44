import json
from pathlib import Path

import pytest
import yaml

from lorenzlab.cli.main import EXIT_CONFIG, EXIT_OK, EXIT_STAGE, main
from lorenzlab.utils.files import read_csv

ROOT = Path(__file__).resolve().parents[2]
SMOKE = ROOT / "configs" / "experiments" / "smoke.yaml"


def test_smoke_run_and_report(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    out = tmp_path / "smoke_run"
    assert main(["run", "--config", str(SMOKE), "--out", str(out), "--threads", "1"]) == EXIT_OK
    assert (out / "run_manifest.json").exists()
    assert (out / "summary.md").exists()
    assert (out / "events.jsonl").exists()
    capsys.readouterr()
    assert main(["report", "--out", str(out)]) == EXIT_OK
    assert "S_n = 3^n" in capsys.readouterr().out


def test_invalid_config_exits_with_config_code(tmp_path: Path) -> None:
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: bad\nstationary:\n  epsilons: [0.01]\n  n_bins: 64\n", encoding="utf-8")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "bad_run")]) == EXIT_CONFIG
    assert main(["levels", "--config", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG


def test_failing_stage_exits_with_stage_code(tmp_path: Path) -> None:
    config = tmp_path / "failing.yaml"
    config.write_text(
        "name: failing\n"
        "tune:\n  types: [[2, 2], [2, 2], [2, 2]]\n  budget: 1\n"
        "recurrence:\n  visit_depth: 3\n",
        encoding="utf-8",
    )
    assert main(["tune", "--config", str(config), "--out", str(tmp_path / "failing_run")]) == EXIT_STAGE


def test_tune_flags_override_the_config(tmp_path: Path) -> None:
    out = tmp_path / "tune_run"
    argv = ["tune", "--config", str(SMOKE), "--out", str(out), "--types", "2:2", "--depth", "2", "--budget", "2000"]
    assert main(argv) == EXIT_OK
    snapshot = json.loads((out / "run_config_snapshot.json").read_text(encoding="utf-8"))
    assert snapshot["tune"]["types"] == [[2, 2], [2, 2]]
    assert snapshot["tune"]["budget"] == 2000
    assert len(read_csv(out / "tune.csv")) == 2

    failing = tmp_path / "tune_failing"
    assert main(["tune", "--config", str(SMOKE), "--out", str(failing), "--depth", "3", "--budget", "1"]) == EXIT_STAGE
    snapshot = json.loads((failing / "run_config_snapshot.json").read_text(encoding="utf-8"))
    assert snapshot["tune"]["types"] == [[2, 2]] * 3


def test_tune_flags_are_validated(tmp_path: Path) -> None:
    out = str(tmp_path / "rejected")
    assert main(["tune", "--config", str(SMOKE), "--out", out, "--alpha", "0.5"]) == EXIT_CONFIG
    assert main(["tune", "--config", str(SMOKE), "--out", out, "--c", "1.5"]) == EXIT_CONFIG
    assert main(["tune", "--config", str(SMOKE), "--out", out, "--types", "0:2"]) == EXIT_CONFIG


@pytest.mark.parametrize(
    "map_section",
    [
        {"u": 0.2, "v": 0.7},
        {"u": 0.96, "v": 0.2},
        {"u": 0.96, "v": 0.96, "margin": 0.3},
    ],
)
def test_unusable_explicit_map_is_a_config_error(tmp_path: Path, map_section: dict[str, float]) -> None:
    config = tmp_path / "explicit.yaml"
    config.write_text(yaml.safe_dump({"name": "explicit", "tune": {"enabled": False}, "map": map_section}), encoding="utf-8")
    assert main(["levels", "--config", str(config), "--out", str(tmp_path / "explicit_run")]) == EXIT_CONFIG
    assert not (tmp_path / "explicit_run" / "run_manifest.json").exists()
