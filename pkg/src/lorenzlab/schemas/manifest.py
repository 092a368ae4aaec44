from __future__ import annotations

from typing import Any

from pydantic import Field

from .common import StageName, StageStatus, StrictModel


class StageRecord(StrictModel):
    stage: StageName
    status: StageStatus
    duration_s: float = Field(default=0.0, ge=0.0)
    outputs: list[str] = Field(default_factory=list)
    diagnostic: str | None = None
    summary: dict[str, Any] = Field(default_factory=dict)


class RunManifest(StrictModel):
    run_id: str
    timestamp_utc: str
    version: str
    config_hash: str
    seed: int
    output_dir: str
    git_commit: str | None = None
    library_versions: dict[str, str] = Field(default_factory=dict)
    stages: list[StageRecord] = Field(default_factory=list)
    config_snapshot_paths: dict[str, str] = Field(default_factory=dict)

    @property
    def outputs(self) -> list[str]:
        return [path for record in self.stages for path in record.outputs]

    def stage(self, name: StageName) -> StageRecord | None:
        return next((record for record in self.stages if record.stage == name), None)

    @property
    def succeeded(self) -> bool:
        return all(record.status != StageStatus.FAILED for record in self.stages)
