from __future__ import annotations

from collections.abc import Mapping
from pathlib import Path
from typing import Any, TypeVar

import yaml
from pydantic import BaseModel, ValidationError

from lorenzlab.errors import ConfigInvalid

T = TypeVar("T", bound=BaseModel)


def load_yaml(path: str | Path) -> dict[str, Any]:
    try:
        with Path(path).open("r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigInvalid(f"YAML root must be a mapping: {path}")
    return data


def merge_overrides(data: Mapping[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Nested mappings merge key by key; any other override value replaces the original."""
    merged = dict(data)
    for key, value in overrides.items():
        current = merged.get(key)
        if isinstance(value, Mapping) and isinstance(current, Mapping):
            merged[key] = merge_overrides(current, value)
        else:
            merged[key] = value
    return merged


def load_model(path: str | Path, model_cls: type[T], overrides: Mapping[str, Any] | None = None) -> T:
    data = load_yaml(path)
    if overrides:
        data = merge_overrides(data, overrides)
    try:
        return model_cls.model_validate(data)
    except ValidationError as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc
