from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from lorenzlab import __version__
from lorenzlab.config.loader import load_model
from lorenzlab.config.types import ExperimentConfig, ProjectConfig
from lorenzlab.errors import ConfigInvalid, StageFailed
from lorenzlab.pipeline.reporting import report
from lorenzlab.pipeline.runner import load_manifest, raise_for_failure, run
from lorenzlab.schemas.common import StageName

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STAGE = 3

PROJECT_CONFIG = Path("configs/project.yaml")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="Experiment YAML (default: project default_experiment).")
    parser.add_argument("--seed", type=int, default=None, help="Override the experiment seed.")
    parser.add_argument("--out", default=None, help="Output directory for CSVs, events and the manifest.")
    parser.add_argument("--threads", type=int, default=None, help="Worker processes (else LORENZLAB_THREADS, else 1).")


def _combinatorial_type(text: str) -> tuple[int, int]:
    try:
        a, b = (int(part) for part in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}") from exc
    return a, b


def _add_tune_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--c", type=float, default=None, help="Singular point c.")
    parser.add_argument("--alpha", type=float, default=None, help="Critical exponent.")
    parser.add_argument("--types", type=_combinatorial_type, nargs="+", default=None, help="Type sequence, e.g. 2:2 1:2.")
    parser.add_argument("--depth", type=int, default=None, help="Levels to certify; the type sequence repeats to fill them.")
    parser.add_argument("--budget", type=int, default=None, help="Maximum number of certification calls.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorenzlab")
    parser.add_argument("--version", action="version", version=f"lorenzlab {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    for stage in StageName:
        stage_parser = commands.add_parser(stage.value, help=f"Run the {stage.value} stage only.")
        _add_run_flags(stage_parser)
        if stage == StageName.TUNE:
            _add_tune_flags(stage_parser)
    run_parser = commands.add_parser("run", help="Run every enabled stage.")
    _add_run_flags(run_parser)
    _add_tune_flags(run_parser)
    report_parser = commands.add_parser("report", help="Summarize a finished run.")
    report_parser.add_argument("--out", required=True, help="Run directory or run_manifest.json path.")
    return parser


def _load_project() -> ProjectConfig:
    if PROJECT_CONFIG.exists():
        return load_model(PROJECT_CONFIG, ProjectConfig)
    return ProjectConfig()


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigInvalid("--threads must be positive")
        overrides["threads"] = args.threads
    map_updates = {key: getattr(args, key, None) for key in ("c", "alpha")}
    map_updates = {key: value for key, value in map_updates.items() if value is not None}
    if map_updates:
        overrides["map"] = map_updates
    tune_updates: dict[str, Any] = {}
    if getattr(args, "types", None) is not None:
        tune_updates["types"] = args.types
    if getattr(args, "budget", None) is not None:
        tune_updates["budget"] = args.budget
    if getattr(args, "depth", None) is not None:
        tune_updates["depth"] = args.depth
    if tune_updates:
        overrides["tune"] = tune_updates
    return overrides


def _load_experiment(args: argparse.Namespace, project: ProjectConfig) -> ExperimentConfig:
    return load_model(args.config or project.default_experiment, ExperimentConfig, _overrides(args))


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            print(report(load_manifest(args.out)), end="")
            return EXIT_OK
        project = _load_project()
        config = _load_experiment(args, project)
        stages = None if args.command == "run" else {StageName(args.command)}
        manifest = run(config, project, stages=stages, threads=args.threads)
        print(manifest.output_dir)
        raise_for_failure(manifest)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageFailed as exc:
        print(f"stage failure: {exc}", file=sys.stderr)
        return EXIT_STAGE
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
