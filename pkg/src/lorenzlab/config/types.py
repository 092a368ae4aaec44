from __future__ import annotations

import math
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lorenzlab.errors import LorenzLabError
from lorenzlab.maps.restricted import restrict_rescale
from lorenzlab.maps.standard import StandardFamilyMap
from lorenzlab.schemas.common import KernelShape, StartPoint

GRID_RESOLUTION = 5.0


class ProjectConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    project_name: str = "lorenzlab"
    results_dir: str = "results"
    reports_dir: str = "reports"
    default_seed: int = 7
    default_experiment: str = "configs/experiments/demo_2_2_depth4.yaml"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")

    enabled: bool = True


def _resolves(n_bins: int | None, epsilons: list[float]) -> None:
    if n_bins is None:
        return
    for epsilon in epsilons:
        if 1.0 / n_bins > epsilon / GRID_RESOLUTION:
            raise ValueError(f"bin width 1/{n_bins} does not resolve epsilon={epsilon} (need w <= eps/5)")


def bins_for(epsilon: float) -> int:
    """Smallest grid with w <= ε/5."""
    return math.ceil(GRID_RESOLUTION / epsilon)


class MapSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    u: float | None = Field(default=None, gt=0.0, le=1.0)
    v: float | None = Field(default=None, gt=0.0, le=1.0)
    c: float = Field(default=0.5, gt=0.0, lt=1.0)
    alpha: float = Field(default=2.0, gt=1.0)
    margin: float = Field(default=0.02, gt=0.0, lt=0.5)

    @model_validator(mode="after")
    def explicit_map_is_usable(self) -> MapSection:
        if not self.explicit:
            return self
        try:
            restrict_rescale(StandardFamilyMap(u=self.u, v=self.v, c=self.c, alpha=self.alpha), self.margin)
        except (ValueError, LorenzLabError) as exc:
            raise ValueError(f"explicit map (u={self.u}, v={self.v}) is unusable: {exc}") from exc
        return self

    @property
    def explicit(self) -> bool:
        return self.u is not None and self.v is not None


class TuneSection(_Section):
    types: list[tuple[int, int]] = Field(default_factory=lambda: [(2, 2)] * 4)
    depth: int | None = Field(default=None, ge=1)
    budget: int = Field(default=100_000, gt=0)
    tolerance: float = Field(default=1e-10, gt=0.0)
    extra_depth: int = Field(default=0, ge=0)
    u_range: tuple[float, float] | None = None
    v_range: tuple[float, float] | None = None

    @field_validator("types")
    @classmethod
    def monotone_types(cls, value: list[tuple[int, int]]) -> list[tuple[int, int]]:
        for a, b in value:
            if a < 1 or b < 1:
                raise ValueError(f"monotone type needs a, b >= 1, got ({a}, {b})")
        return value

    @model_validator(mode="after")
    def repeat_types_to_depth(self) -> TuneSection:
        if not self.types:
            raise ValueError("tune.types must name at least one combinatorial type")
        if self.depth is not None:
            self.types = [self.types[index % len(self.types)] for index in range(self.depth)]
        return self


class LevelsSection(_Section):
    pass


class GeometrySection(_Section):
    ratio_floor: float = Field(default=1e-3, gt=0.0, lt=0.5)
    k_cap: float = Field(default=1e3, gt=1.0)


class MeasureSection(_Section):
    n_bins: int = Field(default=4096, ge=16)
    birkhoff_samples: int = Field(default=0, ge=0)
    burn_in: int = Field(default=1000, ge=0)
    start: StartPoint = StartPoint.C1_PLUS


class RecurrenceSection(_Section):
    delta: float = Field(default=1e-2, gt=0.0, lt=1.0)
    halvings: int = Field(default=4, ge=0)
    n_max: int = Field(default=100_000, gt=0)
    visit_depth: int = Field(default=4, ge=1)


class LyapunovSection(_Section):
    n_max: int = Field(default=1_000_000, gt=0)
    factor: float = Field(default=1.25, gt=1.0)
    floor: float = Field(default=30.0, gt=0.0)


class IntegrabilitySection(_Section):
    pass


class StationarySection(_Section):
    shape: KernelShape = KernelShape.UNIFORM
    epsilons: list[float] = Field(default_factory=lambda: [1e-2, 3e-3, 1e-3])
    n_bins: int | None = Field(default=None, ge=16)
    mc_samples: int = Field(default=0, ge=0)
    burn_in: int = Field(default=10_000, ge=0)
    chains: int = Field(default=64, ge=1)

    @model_validator(mode="after")
    def grid_resolves_noise(self) -> StationarySection:
        if any(epsilon <= 0.0 for epsilon in self.epsilons):
            raise ValueError("stationary epsilons must be positive")
        _resolves(self.n_bins, self.epsilons)
        return self


class StabilitySection(_Section):
    shape: KernelShape = KernelShape.UNIFORM
    epsilons: list[float] = Field(default_factory=lambda: [1e-2, 5e-3, 2.5e-3, 1.25e-3])
    n_bins: int = Field(default=4096, ge=16)

    @model_validator(mode="after")
    def grid_resolves_noise(self) -> StabilitySection:
        if len(self.epsilons) < 2:
            raise ValueError("a stability curve needs at least two epsilons")
        if any(epsilon <= 0.0 for epsilon in self.epsilons):
            raise ValueError("stability epsilons must be positive")
        _resolves(self.n_bins, self.epsilons)
        return self


class ShadowSection(_Section):
    etas: list[float] = Field(default_factory=lambda: [1e-4, 1e-5, 1e-6])
    ks: list[float] = Field(default_factory=lambda: [2.0, 1.0, 0.5, 0.25, 0.2, 0.15, 0.11])
    xi: float = Field(default=0.5, gt=0.0, le=0.5)
    delta: float | None = Field(default=None, gt=0.0)
    trials: int = Field(default=1000, gt=0)

    @model_validator(mode="after")
    def etas_below_delta(self) -> ShadowSection:
        if not self.etas or any(not 0.0 < eta < 1.0 for eta in self.etas):
            raise ValueError("etas must lie in (0, 1)")
        if self.delta is not None and any(eta >= self.delta for eta in self.etas):
            raise ValueError("every eta must be below delta")
        return self


class RlyapSection(_Section):
    shape: KernelShape = KernelShape.UNIFORM
    epsilons: list[float] = Field(default_factory=lambda: [1e-2, 5e-3, 2.5e-3])
    n: int = Field(default=20_000, gt=0)
    trials: int = Field(default=50, gt=0)
    delta: float = Field(default=1e-2, gt=0.0)
    n_bins: int | None = Field(default=None, ge=16)

    @model_validator(mode="after")
    def grid_resolves_noise(self) -> RlyapSection:
        if any(epsilon <= 0.0 for epsilon in self.epsilons):
            raise ValueError("rlyap epsilons must be positive")
        _resolves(self.n_bins, self.epsilons)
        return self


class ExperimentConfig(BaseModel):
    """One pipeline run; every section can be switched off with `enabled: false`."""

    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    seed: int = 7
    output_dir: str | None = None
    threads: int | None = Field(default=None, ge=1)
    map: MapSection = Field(default_factory=MapSection)
    tune: TuneSection = Field(default_factory=TuneSection)
    levels: LevelsSection = Field(default_factory=LevelsSection)
    geometry: GeometrySection = Field(default_factory=GeometrySection)
    measure: MeasureSection = Field(default_factory=MeasureSection)
    recurrence: RecurrenceSection = Field(default_factory=RecurrenceSection)
    lyapunov: LyapunovSection = Field(default_factory=LyapunovSection)
    integrability: IntegrabilitySection = Field(default_factory=IntegrabilitySection)
    stationary: StationarySection = Field(default_factory=StationarySection)
    stability: StabilitySection = Field(default_factory=StabilitySection)
    shadow: ShadowSection = Field(default_factory=ShadowSection)
    rlyap: RlyapSection = Field(default_factory=RlyapSection)

    @model_validator(mode="after")
    def validate_preconditions(self) -> ExperimentConfig:
        if not self.tune.enabled and not self.map.explicit and self.needs_map:
            raise ValueError("map.u and map.v are required when tune is disabled")
        if self.geometry.enabled and len(self.tune.types) < 2:
            raise ValueError("geometry needs at least two renormalization levels")
        if self.recurrence.enabled and self.recurrence.visit_depth > len(self.tune.types):
            raise ValueError("recurrence.visit_depth exceeds the number of levels")
        return self

    @property
    def needs_map(self) -> bool:
        return any(
            section.enabled
            for section in (
                self.levels,
                self.geometry,
                self.measure,
                self.recurrence,
                self.lyapunov,
                self.integrability,
                self.stationary,
                self.stability,
                self.shadow,
                self.rlyap,
            )
        )

    def run_dir(self, project: ProjectConfig) -> Path:
        if self.output_dir is not None:
            return Path(self.output_dir)
        return Path(project.results_dir) / self.name
