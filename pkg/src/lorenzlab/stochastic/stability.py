from __future__ import annotations

from collections.abc import Sequence

from pydantic import Field

from lorenzlab.logging.jsonl import JsonlWriter
from lorenzlab.maps.restricted import RestrictedMap
from lorenzlab.measures.histogram import MeasureHistogram, w1
from lorenzlab.schemas.common import FrozenModel, KernelShape
from lorenzlab.utils.parallel import parallel_map

from .kernels import NoiseKernel
from .stationary import stationary_ulam


class StabilityPoint(FrozenModel):
    epsilon: float = Field(gt=0.0)
    w1: float = Field(ge=0.0)
    n_bins: int
    iterations: int
    residual: float


class StabilityCurve(FrozenModel):
    shape: KernelShape
    points: list[StabilityPoint]

    def values(self) -> list[float]:
        return [point.w1 for point in self.points]

    @property
    def shrinks(self) -> bool:
        """Final distance at most half of the first one."""
        values = self.values()
        return len(values) >= 2 and values[-1] <= 0.5 * values[0]


def reference_on_restricted(measure: MeasureHistogram, margin: float) -> MeasureHistogram:
    """Image of a measure for f under B^-1(y) = (y - m)/(1 - 2m), the coordinates of g."""
    scale = 1.0 - 2.0 * margin
    return measure.pushforward_affine(1.0 / scale, -margin / scale)


def _stability_task(task: tuple[RestrictedMap, KernelShape, float, MeasureHistogram]) -> StabilityPoint:
    lmap, shape, epsilon, reference = task
    histogram, report = stationary_ulam(lmap, NoiseKernel(shape=shape, epsilon=epsilon), reference.n_bins)
    return StabilityPoint(
        epsilon=epsilon,
        w1=w1(histogram, reference),
        n_bins=reference.n_bins,
        iterations=report.iterations,
        residual=report.residual,
    )


def stability_curve(
    lmap: RestrictedMap,
    reference: MeasureHistogram,
    epsilons: Sequence[float],
    shape: KernelShape = KernelShape.UNIFORM,
    threads: int | None = None,
    writer: JsonlWriter | None = None,
) -> StabilityCurve:
    """W₁(μ̂_ε, reference) for every ε, all on the reference grid.

    `reference` must already live in the coordinates of `lmap`; see
    `reference_on_restricted`.
    """
    tasks = [(lmap, shape, float(epsilon), reference) for epsilon in epsilons]
    points = parallel_map(_stability_task, tasks, threads)
    if writer is not None:
        for point in points:
            writer.event("stability_point", **point.model_dump())
    return StabilityCurve(shape=shape, points=points)
