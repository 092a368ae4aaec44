from __future__ import annotations

from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lorenzlab.config.loader import load_model
from lorenzlab.config.types import ExperimentConfig, ProjectConfig
from lorenzlab.pipeline.runner import run


def main() -> None:
    project_config = load_model(Path("configs/project.yaml"), ProjectConfig)
    config = load_model(Path("configs/experiments/smoke.yaml"), ExperimentConfig)
    manifest = run(config, project_config)
    for record in manifest.stages:
        print(f"{record.stage.value}={record.status.value}")
    print(f"smoke_dir={manifest.output_dir}")
    if not manifest.succeeded:
        raise SystemExit(3)


if __name__ == "__main__":
    main()
