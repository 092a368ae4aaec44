from __future__ import annotations

import hashlib
import json
import math
import time
from collections.abc import Callable, Collection
from functools import cached_property
from pathlib import Path
from typing import Any

from lorenzlab import __version__
from lorenzlab.attractor import (
    GeometryReport,
    LevelStructure,
    birkhoff_measure,
    build_levels,
    geometry_report,
    physical_measure,
    window_masses,
)
from lorenzlab.config.types import ExperimentConfig, ProjectConfig, bins_for
from lorenzlab.errors import StageFailed
from lorenzlab.logging.jsonl import JsonlWriter
from lorenzlab.lyapunov import (
    ExponentTrace,
    chi_mu_estimate,
    derivative_envelope,
    geometric_grid,
    integrability_report,
    lyapunov_trace,
    recurrence_bound,
    recurrence_profile,
    trace_agreement,
    truncated_observable_integral,
    truncated_orbit_average,
    visit_audit,
)
from lorenzlab.maps import (
    NonFlatConstants,
    RestrictedMap,
    StandardFamilyMap,
    dump_map,
    fit_nonflat_constants,
    restrict_rescale,
)
from lorenzlab.measures import MeasureHistogram, w1
from lorenzlab.renorm import RenormResult, TuningResult, detect_cascade, tune_parameters
from lorenzlab.schemas.common import StageName, StageStatus, StartPoint
from lorenzlab.schemas.manifest import RunManifest, StageRecord
from lorenzlab.stochastic import (
    NoiseKernel,
    near_critical_check,
    random_lyapunov,
    reference_on_restricted,
    shadowing_witness,
    stability_curve,
    stationary_mc,
    stationary_ulam,
)
from lorenzlab.utils.files import ensure_dir, write_csv, write_json, write_text
from lorenzlab.utils.parallel import resolve_threads
from lorenzlab.utils.provenance import library_versions, repo_commit, utc_timestamp

from .reporting import build_summary_markdown

StageOutput = tuple[list[Path], dict[str, Any]]


class RunContext:
    """Shared, lazily computed objects of one run; later stages reuse what earlier ones built."""

    def __init__(self, config: ExperimentConfig, run_dir: Path, writer: JsonlWriter, threads: int) -> None:
        self.config = config
        self.run_dir = run_dir
        self.writer = writer
        self.threads = threads

    def seed(self, stage: StageName) -> int:
        return self.config.seed + 1009 * list(StageName).index(stage)

    @cached_property
    def tuning(self) -> TuningResult | None:
        if not self.config.tune.enabled:
            return None
        section, map_section = self.config.tune, self.config.map
        return tune_parameters(
            map_section.c,
            map_section.alpha,
            section.types,
            budget=section.budget,
            tolerance=section.tolerance,
            extra_depth=section.extra_depth,
            u_range=section.u_range,
            v_range=section.v_range,
            threads=self.threads,
            writer=self.writer,
        )

    @cached_property
    def base_map(self) -> StandardFamilyMap:
        if self.tuning is not None:
            return self.tuning.map
        section = self.config.map
        return StandardFamilyMap(u=section.u, v=section.v, c=section.c, alpha=section.alpha)

    @cached_property
    def cascade(self) -> list[RenormResult]:
        types = self.config.tune.types
        if self.tuning is not None:
            return self.tuning.cascade[: len(types)]
        max_len = max(a + b + 2 for a, b in types)
        return detect_cascade(self.base_map, len(types), max_len)

    @cached_property
    def levels(self) -> LevelStructure:
        return build_levels(self.base_map, self.cascade)

    @cached_property
    def geometry(self) -> GeometryReport:
        section = self.config.geometry
        return geometry_report(self.levels, ratio_floor=section.ratio_floor, k_cap=section.k_cap)

    @cached_property
    def measure(self) -> MeasureHistogram:
        return physical_measure(self.levels, n_bins=self.config.measure.n_bins)

    @cached_property
    def constants(self) -> NonFlatConstants:
        return fit_nonflat_constants(self.base_map, self.config.map.alpha)

    @cached_property
    def restricted(self) -> RestrictedMap:
        return restrict_rescale(self.base_map, self.config.map.margin)

    def start_points(self) -> list[tuple[StartPoint, float]]:
        c1_minus, c1_plus = self.base_map.critical_values
        return [(StartPoint.C1_MINUS, c1_minus), (StartPoint.C1_PLUS, c1_plus)]

    def path(self, name: str) -> Path:
        return self.run_dir / name


def _stage_tune(ctx: RunContext) -> StageOutput:
    result = ctx.tuning
    assert result is not None
    map_path = write_text(ctx.path("map.txt"), dump_map(result.map))
    rows = [
        (
            record.depth,
            record.type.a,
            record.type.b,
            record.base_window[0],
            record.base_window[1],
            record.left_residual,
            record.right_residual,
        )
        for record in result.cascade
    ]
    csv_path = write_csv(
        ctx.path("tune.csv"),
        ["depth", "a", "b", "p", "q", "left_residual", "right_residual"],
        rows,
    )
    summary = {
        "u": result.u,
        "v": result.v,
        "depth": result.depth,
        "diameter": result.diameter,
        "certifications": result.certifications,
        "combinatorics_hint": list(result.combinatorics_hint),
    }
    return [map_path, csv_path], summary


def _stage_levels(ctx: RunContext) -> StageOutput:
    levels = ctx.levels
    rows = []
    for record in levels.levels:
        direct = record.direct_return or (None, None)
        rows.append(
            (
                record.depth,
                record.a,
                record.b,
                record.p,
                record.q,
                record.c,
                record.s_minus,
                record.s_plus,
                record.width,
                record.total_length,
                direct[0],
                direct[1],
            )
        )
    header = ["n", "a", "b", "p", "q", "c", "s_minus", "s_plus", "width", "total_length", "direct_minus", "direct_plus"]
    csv_path = write_csv(ctx.path("levels.csv"), header, rows)
    summary = {
        "depth": levels.depth,
        "types": [list(pair) for pair in levels.types],
        "s_minus": [record.s_minus for record in levels.levels],
        "s_plus": [record.s_plus for record in levels.levels],
    }
    return [csv_path], summary


def _stage_geometry(ctx: RunContext) -> StageOutput:
    report = ctx.geometry
    rows = [
        (
            level.depth,
            level.child_ratio_min,
            level.child_ratio_max,
            level.gap_ratio_min,
            level.gap_ratio_max,
            level.branch_ratio_minus,
            level.branch_ratio_plus,
            level.shrink_minus,
            level.shrink_plus,
            level.children_in_window,
            level.expected_children,
            level.total_length,
            level.next_total_length,
        )
        for level in report.levels
    ]
    header = [
        "n",
        "child_ratio_min",
        "child_ratio_max",
        "gap_ratio_min",
        "gap_ratio_max",
        "branch_ratio_minus",
        "branch_ratio_plus",
        "shrink_minus",
        "shrink_plus",
        "children_in_window",
        "expected_children",
        "total_length",
        "next_total_length",
    ]
    csv_path = write_csv(ctx.path("geometry.csv"), header, rows)
    summary = report.model_dump(mode="json", exclude={"levels"})
    return [csv_path], summary


def _stage_measure(ctx: RunContext) -> StageOutput:
    section = ctx.config.measure
    measure = ctx.measure
    rows = [
        (index, float(center), float(weight))
        for index, (center, weight) in enumerate(zip(measure.centers, measure.weights))
    ]
    measure_path = write_csv(ctx.path("measure.csv"), ["bin", "center", "weight"], rows)
    windows = [(n, mass, bound, mass <= bound * (1.0 + 1e-12)) for n, mass, bound in window_masses(ctx.levels)]
    windows_path = write_csv(ctx.path("window_masses.csv"), ["n", "mass", "bound", "ok"], windows)
    summary: dict[str, Any] = {"n_bins": measure.n_bins, "windows_ok": all(row[3] for row in windows)}
    if section.birkhoff_samples > 0:
        empirical = birkhoff_measure(
            ctx.base_map,
            section.burn_in,
            section.birkhoff_samples,
            n_bins=section.n_bins,
            start=section.start,
            writer=ctx.writer,
        )
        deepest = ctx.levels.levels[-1]
        summary["birkhoff_w1"] = w1(measure, empirical)
        summary["birkhoff_bound"] = 4.0 / deepest.s + 2.0 * measure.width
    return [measure_path, windows_path], summary


def _stage_recurrence(ctx: RunContext) -> StageOutput:
    section = ctx.config.recurrence
    deltas = [section.delta / 2.0**i for i in range(section.halvings + 1)]
    ns = geometric_grid(section.n_max)
    ks = list(range(1, section.visit_depth + 1))
    recurrence_rows = []
    visit_rows = []
    envelopes: dict[str, list[float]] = {}
    violations = 0
    bounds = [recurrence_bound(ctx.levels, ctx.geometry, delta) for delta in deltas]
    for start, x in ctx.start_points():
        profile = recurrence_profile(ctx.base_map, x, deltas, ns, start.value, ctx.levels, ctx.geometry)
        recurrence_rows.extend((start.value, delta, n, value, bound) for delta, n, value, bound in profile.rows())
        envelopes[start.value] = profile.envelope()
        for audit in visit_audit(ctx.base_map, x, ctx.levels, ks, ns):
            visit_rows.append((start.value, audit.k, audit.n, audit.count, audit.bound, audit.ok))
            violations += not audit.ok
    recurrence_path = write_csv(ctx.path("recurrence.csv"), ["start", "delta", "n", "value", "bound"], recurrence_rows)
    visits_path = write_csv(ctx.path("visits.csv"), ["start", "k", "n", "count", "bound", "ok"], visit_rows)
    summary = {"deltas": deltas, "envelopes": envelopes, "bounds": bounds, "visit_violations": violations}
    return [recurrence_path, visits_path], summary


def _stage_lyapunov(ctx: RunContext) -> StageOutput:
    section = ctx.config.lyapunov
    rows = []
    endpoints: dict[str, dict[str, float]] = {}
    traces: dict[StartPoint, ExponentTrace] = {}
    for start, x in ctx.start_points():
        trace = lyapunov_trace(ctx.base_map, x, section.n_max, start.value, section.factor)
        traces[start] = trace
        envelope = derivative_envelope(trace)
        for n, value, log_derivative in zip(trace.ns, trace.values, trace.log_derivatives()):
            rows.append((start.value, n, value, log_derivative, envelope.bound(n)))
        endpoints[start.value] = {
            "n_max": trace.n_max,
            "last_value": trace.values[-1],
            "first_decade_median": trace.first_decade_median(),
            "last_decade_median": trace.last_decade_median(),
            "truncated_average": truncated_orbit_average(ctx.base_map, x, trace.n_max, section.floor),
        }
    csv_path = write_csv(ctx.path("lyapunov.csv"), ["start", "n", "value", "log_derivative", "envelope"], rows)
    difference, spread = trace_agreement(traces[StartPoint.C1_MINUS], traces[StartPoint.C1_PLUS])
    estimate = chi_mu_estimate(ctx.base_map, ctx.measure, ctx.levels, ctx.geometry, ctx.constants)
    summary = {
        "endpoints": endpoints,
        "endpoint_difference": difference,
        "endpoint_spread": spread,
        "endpoints_agree": difference <= spread,
        "chi_mu": estimate.value,
        "chi_mu_error": estimate.error,
        "chi_mu_contains_zero": estimate.contains(0.0),
        "truncated_integral": truncated_observable_integral(ctx.base_map, ctx.measure, section.floor),
    }
    return [csv_path], summary


def _stage_integrability(ctx: RunContext) -> StageOutput:
    report = integrability_report(ctx.base_map, ctx.measure, ctx.levels, ctx.constants, ctx.geometry)
    csv_path = write_csv(
        ctx.path("integrability.csv"),
        ["n", "value", "increment", "increment_bound"],
        [(row.n, row.value, row.increment, row.increment_bound) for row in report.rows],
    )
    summary = {"c2": report.c2, "nondecreasing": report.nondecreasing, "bounded": report.bounded}
    return [csv_path], summary


def _stage_stationary(ctx: RunContext) -> StageOutput:
    section = ctx.config.stationary
    rows = []
    for epsilon in section.epsilons:
        kernel = NoiseKernel(shape=section.shape, epsilon=epsilon)
        n_bins = section.n_bins or bins_for(epsilon)
        histogram, report = stationary_ulam(ctx.restricted, kernel, n_bins, writer=ctx.writer)
        mc_w1 = mc_bound = mc_density = None
        if section.mc_samples > 0:
            empirical = stationary_mc(
                ctx.restricted,
                kernel,
                section.mc_samples,
                burn_in=section.burn_in,
                n_bins=n_bins,
                seed=ctx.seed(StageName.STATIONARY),
                chains=section.chains,
                writer=ctx.writer,
            )
            mc_w1 = w1(histogram, empirical)
            mc_bound = 3.0 * histogram.width + 5.0 / math.sqrt(section.mc_samples)
            mc_density = empirical.max_density
        rows.append(
            (
                epsilon,
                n_bins,
                report.iterations,
                report.residual,
                report.row_sum_error,
                report.max_density,
                report.density_bound,
                mc_w1,
                mc_bound,
                mc_density,
            )
        )
    header = [
        "epsilon",
        "n_bins",
        "iterations",
        "residual",
        "row_sum_error",
        "max_density",
        "density_bound",
        "mc_w1",
        "mc_bound",
        "mc_max_density",
    ]
    csv_path = write_csv(ctx.path("stationary.csv"), header, rows)
    summary = {"epsilon_budget": ctx.restricted.epsilon_budget, "epsilons": section.epsilons}
    return [csv_path], summary


def _stage_stability(ctx: RunContext) -> StageOutput:
    section = ctx.config.stability
    reference = reference_on_restricted(physical_measure(ctx.levels, n_bins=section.n_bins), ctx.config.map.margin)
    curve = stability_curve(ctx.restricted, reference, section.epsilons, section.shape, ctx.threads, ctx.writer)
    csv_path = write_csv(
        ctx.path("stability.csv"),
        ["epsilon", "w1", "w", "n_bins", "iterations", "residual"],
        [(p.epsilon, p.w1, 1.0 / p.n_bins, p.n_bins, p.iterations, p.residual) for p in curve.points],
    )
    summary = {"epsilons": section.epsilons, "w1": curve.values(), "shrinks": curve.shrinks}
    return [csv_path], summary


def _stage_shadow(ctx: RunContext) -> StageOutput:
    section = ctx.config.shadow
    report = shadowing_witness(
        ctx.restricted,
        section.etas,
        ks=section.ks,
        xi=section.xi,
        delta=section.delta,
        trials=section.trials,
        seed=ctx.seed(StageName.SHADOW),
        writer=ctx.writer,
    )
    if report is None:
        raise StageFailed(StageName.SHADOW.value, f"no K in {section.ks} passed every trial")
    csv_path = write_csv(
        ctx.path("shadow.csv"),
        ["eta", "side", "epsilon", "n_max", "trials", "pass_fraction", "first_step_max", "first_step_bound"],
        [
            (
                row.eta,
                row.side.symbol,
                row.epsilon,
                row.n_max,
                row.trials,
                row.pass_fraction,
                row.first_step_max,
                row.first_step_bound,
            )
            for row in report.rows
        ],
    )
    summary = {"k": report.k, "xi": report.xi, "delta": report.delta, "passed": report.passed}
    return [csv_path], summary


def _stage_rlyap(ctx: RunContext) -> StageOutput:
    section = ctx.config.rlyap
    constants = fit_nonflat_constants(ctx.restricted, ctx.config.map.alpha)
    rows = []
    for epsilon in section.epsilons:
        kernel = NoiseKernel(shape=section.shape, epsilon=epsilon)
        report = random_lyapunov(
            ctx.restricted,
            kernel,
            section.n,
            trials=section.trials,
            seed=ctx.seed(StageName.RLYAP),
            delta=section.delta,
        )
        histogram, _ = stationary_ulam(ctx.restricted, kernel, section.n_bins or bins_for(epsilon))
        check = near_critical_check(ctx.restricted, histogram, kernel, constants.c0)
        rows.append(
            (
                epsilon,
                report.mean,
                report.spread,
                report.positive_part,
                report.moderate_recurrence,
                report.collisions,
                check.integral,
                check.bound,
                check.ok,
            )
        )
    header = [
        "epsilon",
        "mean",
        "spread",
        "positive_part",
        "moderate_recurrence",
        "collisions",
        "near_critical",
        "near_critical_bound",
        "near_critical_ok",
    ]
    csv_path = write_csv(ctx.path("rlyap.csv"), header, rows)
    summary = {"positive_part": [row[3] for row in rows], "near_critical_ok": all(row[8] for row in rows)}
    return [csv_path], summary


STAGES: list[tuple[StageName, Callable[[RunContext], StageOutput]]] = [
    (StageName.TUNE, _stage_tune),
    (StageName.LEVELS, _stage_levels),
    (StageName.GEOMETRY, _stage_geometry),
    (StageName.MEASURE, _stage_measure),
    (StageName.RECURRENCE, _stage_recurrence),
    (StageName.LYAPUNOV, _stage_lyapunov),
    (StageName.INTEGRABILITY, _stage_integrability),
    (StageName.STATIONARY, _stage_stationary),
    (StageName.STABILITY, _stage_stability),
    (StageName.SHADOW, _stage_shadow),
    (StageName.RLYAP, _stage_rlyap),
]


def config_hash(config: ExperimentConfig) -> str:
    payload = json.dumps(config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def run(
    config: ExperimentConfig,
    project: ProjectConfig | None = None,
    *,
    stages: Collection[StageName] | None = None,
    threads: int | None = None,
) -> RunManifest:
    """Execute the enabled stages in dependency order.

    `stages` narrows the run to a subset (single-stage subcommands); the
    objects those stages depend on are still built on demand. A failing
    stage is recorded in the manifest and errors.log, and every later
    stage is marked skipped.
    """
    project = project or ProjectConfig()
    run_dir = ensure_dir(config.run_dir(project))
    events_path = run_dir / "events.jsonl"
    error_path = run_dir / "errors.log"
    events_path.unlink(missing_ok=True)
    error_path.unlink(missing_ok=True)
    error_path.touch()
    writer = JsonlWriter(events_path)
    resolved_threads = resolve_threads(threads, config.threads)

    write_json(run_dir / "project_config_snapshot.json", project.model_dump(mode="json"))
    write_json(run_dir / "run_config_snapshot.json", config.model_dump(mode="json"))

    ctx = RunContext(config, run_dir, writer, resolved_threads)
    records: list[StageRecord] = []
    halted: StageName | None = None
    for name, stage in STAGES:
        if not getattr(config, name.value).enabled or (stages is not None and name not in stages):
            continue
        if halted is not None:
            records.append(
                StageRecord(stage=name, status=StageStatus.SKIPPED, diagnostic=f"upstream stage {halted.value} failed")
            )
            continue
        writer.event("stage_started", stage=name.value)
        start = time.perf_counter()
        try:
            outputs, summary = stage(ctx)
        except Exception as exc:  # noqa: BLE001
            diagnostic = f"{type(exc).__name__}: {exc}"
            with error_path.open("a", encoding="utf-8") as handle:
                handle.write(f"{name.value}: {diagnostic}\n")
            record = StageRecord(
                stage=name,
                status=StageStatus.FAILED,
                duration_s=time.perf_counter() - start,
                diagnostic=diagnostic,
            )
            halted = name
        else:
            record = StageRecord(
                stage=name,
                status=StageStatus.OK,
                duration_s=time.perf_counter() - start,
                outputs=[path.name for path in outputs],
                summary=summary,
            )
        writer.event("stage_finished", stage=name.value, status=record.status.value, duration_s=record.duration_s)
        records.append(record)

    manifest = RunManifest(
        run_id=config.name,
        timestamp_utc=utc_timestamp(),
        version=__version__,
        config_hash=config_hash(config),
        seed=config.seed,
        output_dir=str(run_dir),
        git_commit=repo_commit(),
        library_versions=library_versions(),
        stages=records,
        config_snapshot_paths={
            "project": str((run_dir / "project_config_snapshot.json").resolve()),
            "run": str((run_dir / "run_config_snapshot.json").resolve()),
            "summary": str((run_dir / "summary.md").resolve()),
        },
    )
    write_json(run_dir / "run_manifest.json", manifest.model_dump(mode="json"))
    write_text(run_dir / "summary.md", build_summary_markdown(manifest))
    return manifest


def raise_for_failure(manifest: RunManifest) -> None:
    failed = next((record for record in manifest.stages if record.status == StageStatus.FAILED), None)
    if failed is not None:
        raise StageFailed(failed.stage.value, failed.diagnostic or "unknown failure")


def load_manifest(path: str | Path) -> RunManifest:
    target = Path(path)
    if target.is_dir():
        target = target / "run_manifest.json"
    return RunManifest.model_validate_json(target.read_text(encoding="utf-8"))
