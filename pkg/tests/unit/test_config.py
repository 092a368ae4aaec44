from pathlib import Path

import pytest
import yaml

from lorenzlab.config.loader import load_model
from lorenzlab.config.types import ExperimentConfig, ProjectConfig, bins_for
from lorenzlab.errors import ConfigInvalid

ROOT = Path(__file__).resolve().parents[2]


def write_config(tmp_path: Path, payload: dict) -> Path:
    path = tmp_path / "experiment.yaml"
    path.write_text(yaml.safe_dump(payload), encoding="utf-8")
    return path


def test_shipped_configs_validate() -> None:
    project = load_model(ROOT / "configs" / "project.yaml", ProjectConfig)
    demo = load_model(ROOT / project.default_experiment, ExperimentConfig)
    smoke = load_model(ROOT / "configs" / "experiments" / "smoke.yaml", ExperimentConfig)
    assert demo.tune.types == [(2, 2)] * 4
    assert smoke.tune.enabled
    assert smoke.run_dir(project) == Path("results/smoke")


def test_unknown_keys_are_rejected(tmp_path: Path) -> None:
    path = write_config(tmp_path, {"name": "x", "mapp": {"u": 0.9}})
    with pytest.raises(ConfigInvalid):
        load_model(path, ExperimentConfig)


def test_missing_file_is_a_config_error(tmp_path: Path) -> None:
    with pytest.raises(ConfigInvalid):
        load_model(tmp_path / "absent.yaml", ExperimentConfig)


def test_grid_must_resolve_the_noise(tmp_path: Path) -> None:
    path = write_config(tmp_path, {"stationary": {"epsilons": [1e-2], "n_bins": 256}})
    with pytest.raises(ConfigInvalid, match="resolve"):
        load_model(path, ExperimentConfig)
    assert bins_for(1e-2) == 500


def test_shadowing_parameters_are_checked(tmp_path: Path) -> None:
    with pytest.raises(ConfigInvalid):
        load_model(write_config(tmp_path, {"shadow": {"etas": [1e-3], "delta": 1e-4}}), ExperimentConfig)
    with pytest.raises(ConfigInvalid):
        load_model(write_config(tmp_path, {"shadow": {"xi": 0.75}}), ExperimentConfig)


def test_explicit_map_is_required_without_tuning(tmp_path: Path) -> None:
    with pytest.raises(ConfigInvalid, match="map.u"):
        load_model(write_config(tmp_path, {"tune": {"enabled": False}}), ExperimentConfig)
    config = load_model(
        write_config(tmp_path, {"tune": {"enabled": False}, "map": {"u": 0.96, "v": 0.96}}),
        ExperimentConfig,
    )
    assert config.map.explicit


def test_margin_must_stay_below_one_half(tmp_path: Path) -> None:
    with pytest.raises(ConfigInvalid):
        load_model(write_config(tmp_path, {"map": {"margin": 0.5}}), ExperimentConfig)


def test_geometry_needs_two_levels(tmp_path: Path) -> None:
    with pytest.raises(ConfigInvalid, match="two renormalization levels"):
        load_model(write_config(tmp_path, {"tune": {"types": [[2, 2]]}}), ExperimentConfig)
