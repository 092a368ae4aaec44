import math
from pathlib import Path

from lorenzlab.config.loader import load_model
from lorenzlab.config.types import ExperimentConfig, ProjectConfig
from lorenzlab.pipeline.reporting import report
from lorenzlab.pipeline.runner import load_manifest, run
from lorenzlab.schemas.common import StageName, StageStatus
from lorenzlab.utils.files import read_csv

ROOT = Path(__file__).resolve().parents[2]
SMOKE = ROOT / "configs" / "experiments" / "smoke.yaml"
SECTIONS = [stage.value for stage in StageName]


def project_for(tmp_path: Path) -> ProjectConfig:
    return ProjectConfig(results_dir=str(tmp_path / "results"), reports_dir=str(tmp_path / "reports"))


def smoke_config(output_dir: Path) -> ExperimentConfig:
    return load_model(SMOKE, ExperimentConfig).model_copy(update={"output_dir": str(output_dir)})


def test_run_with_every_stage_disabled(tmp_path: Path) -> None:
    payload = {"name": "idle", **{section: {"enabled": False} for section in SECTIONS}}
    manifest = run(ExperimentConfig.model_validate(payload), project_for(tmp_path))
    assert manifest.stages == []
    assert manifest.succeeded
    run_dir = tmp_path / "results" / "idle"
    assert (run_dir / "run_manifest.json").exists()
    assert "no stages run" in (run_dir / "summary.md").read_text(encoding="utf-8")
    assert (run_dir / "errors.log").read_text(encoding="utf-8") == ""


def test_smoke_pipeline_is_reproducible(tmp_path: Path) -> None:
    first = run(smoke_config(tmp_path / "first"), project_for(tmp_path))
    second = run(smoke_config(tmp_path / "second"), project_for(tmp_path))
    assert first.succeeded, [record.diagnostic for record in first.stages]
    assert [record.status for record in first.stages] == [StageStatus.OK] * len(first.stages)
    csv_names = sorted(name for name in first.outputs if name.endswith(".csv"))
    assert "levels.csv" in csv_names
    assert "stability.csv" in csv_names
    for name in csv_names:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes(), name

    recurrence = first.stage(StageName.RECURRENCE).summary
    assert len(recurrence["bounds"]) == len(recurrence["deltas"]) == 3
    assert all(math.isfinite(bound) for bound in recurrence["bounds"])
    bound_for = dict(zip(recurrence["deltas"], recurrence["bounds"]))
    rows = read_csv(tmp_path / "first" / "recurrence.csv")
    assert {row["start"] for row in rows} == {"c1_minus", "c1_plus"}
    assert all(float(row["bound"]) == bound_for[float(row["delta"])] for row in rows)
    lyapunov = first.stage(StageName.LYAPUNOV).summary
    assert lyapunov["endpoint_difference"] >= 0.0
    assert lyapunov["endpoints_agree"] == (lyapunov["endpoint_difference"] <= lyapunov["endpoint_spread"])

    summary = (tmp_path / "first" / "summary.md").read_text(encoding="utf-8")
    assert "S_n = 3^n" in summary
    assert "## Shadowing" in summary
    assert "c1- vs c1+ difference" in summary
    reloaded = load_manifest(tmp_path / "first")
    assert "S_n = 3^n" in report(reloaded)


def test_single_stage_builds_its_prerequisites(tmp_path: Path) -> None:
    manifest = run(smoke_config(tmp_path / "levels_only"), project_for(tmp_path), stages={StageName.LEVELS})
    assert [record.stage for record in manifest.stages] == [StageName.LEVELS]
    assert manifest.stages[0].status == StageStatus.OK
    assert (tmp_path / "levels_only" / "levels.csv").exists()
    assert not (tmp_path / "levels_only" / "tune.csv").exists()


def test_failed_tuning_is_reported_with_its_depth(tmp_path: Path) -> None:
    payload = {
        "name": "failing",
        "output_dir": str(tmp_path / "failing"),
        "tune": {"types": [[2, 2], [2, 2], [2, 2]], "budget": 1},
        "recurrence": {"visit_depth": 3},
    }
    manifest = run(ExperimentConfig.model_validate(payload), project_for(tmp_path))
    assert not manifest.succeeded
    assert manifest.stages[0].status == StageStatus.FAILED
    assert all(record.status == StageStatus.SKIPPED for record in manifest.stages[1:])
    summary = report(manifest)
    assert "TuningFailed" in summary
    assert "depth" in summary
    assert "tune:" in (tmp_path / "failing" / "errors.log").read_text(encoding="utf-8")
