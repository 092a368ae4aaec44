from __future__ import annotations

import argparse
from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lorenzlab.config.loader import load_model
from lorenzlab.config.types import ExperimentConfig, ProjectConfig
from lorenzlab.pipeline.reporting import report
from lorenzlab.pipeline.runner import run
from lorenzlab.utils.files import ensure_dir, write_text


def main() -> None:
    parser = argparse.ArgumentParser(description="Run the depth-4 (2,2) demo and copy its summary to reports/.")
    parser.add_argument("--config", default=None)
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    project_config = load_model(Path("configs/project.yaml"), ProjectConfig)
    config = load_model(Path(args.config or project_config.default_experiment), ExperimentConfig)
    manifest = run(config, project_config, threads=args.threads)
    summary = report(manifest)
    target = write_text(ensure_dir(project_config.reports_dir) / f"{config.name}.md", summary)
    print(summary, end="")
    print(f"report={target}")
    if not manifest.succeeded:
        raise SystemExit(3)


if __name__ == "__main__":
    main()
