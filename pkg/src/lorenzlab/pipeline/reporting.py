from __future__ import annotations

from pathlib import Path
from typing import Any

from lorenzlab.schemas.common import StageName, StageStatus
from lorenzlab.schemas.manifest import RunManifest
from lorenzlab.utils.files import read_csv


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list):
        return "[" + ", ".join(_fmt(item) for item in value) + "]"
    return str(value)


def return_time_lines(levels_csv: Path) -> list[str]:
    """S_n table; a closed form is printed when S_n^- = S_n^+ = k^n at every level."""
    if not levels_csv.exists():
        return []
    rows = read_csv(levels_csv)
    if not rows:
        return []
    lines = []
    s_first = int(rows[0]["s_minus"])
    closed_form = all(
        int(row["s_minus"]) == int(row["s_plus"]) == s_first ** int(row["n"]) for row in rows
    )
    if closed_form:
        lines.append(f"- S_n = {s_first}^n (audited to n = {rows[-1]['n']})")
    for row in rows:
        lines.append(f"- n={row['n']}: S^-=`{row['s_minus']}` S^+=`{row['s_plus']}` type=`({row['a']},{row['b']})`")
    return lines


def build_summary_markdown(manifest: RunManifest) -> str:
    lines = [
        f"# Run Summary: {manifest.run_id}",
        "",
        f"- Version: `{manifest.version}`",
        f"- Config hash: `{manifest.config_hash}`",
        f"- Seed: `{manifest.seed}`",
        f"- Output dir: `{manifest.output_dir}`",
        *(f"- {name}: `{value}`" for name, value in sorted(manifest.library_versions.items())),
        "",
        "## Stages",
        "",
    ]
    if not manifest.stages:
        lines.append("- no stages run")
        return "\n".join(lines) + "\n"
    for record in manifest.stages:
        entry = f"- {record.stage.value}: `{record.status.value}` ({record.duration_s:.1f} s)"
        if record.status != StageStatus.OK and record.diagnostic:
            entry += f" {record.diagnostic}"
        lines.append(entry)

    tune = manifest.stage(StageName.TUNE)
    if tune is not None and tune.status == StageStatus.OK:
        lines.extend(["", "## Tuned Map", ""])
        for key in ("u", "v", "depth", "diameter", "certifications"):
            lines.append(f"- {key}: `{_fmt(tune.summary.get(key))}`")

    levels = manifest.stage(StageName.LEVELS)
    if levels is not None and levels.status == StageStatus.OK:
        lines.extend(["", "## Return Times", ""])
        lines.extend(return_time_lines(Path(manifest.output_dir) / "levels.csv"))

    geometry = manifest.stage(StageName.GEOMETRY)
    if geometry is not None and geometry.status == StageStatus.OK:
        lines.extend(["", "## Geometry", ""])
        for key in ("verdict", "mu_hat", "lambda_hat", "k_hat", "rho_hat", "c1_hat", "bounded_combinatorics"):
            lines.append(f"- {key}: `{_fmt(geometry.summary.get(key))}`")

    recurrence = manifest.stage(StageName.RECURRENCE)
    if recurrence is not None and recurrence.status == StageStatus.OK:
        lines.extend(["", "## Recurrence", ""])
        lines.append(f"- deltas: `{_fmt(recurrence.summary.get('deltas'))}`")
        lines.append(f"- level bounds: `{_fmt(recurrence.summary.get('bounds'))}`")
        for start, envelope in recurrence.summary.get("envelopes", {}).items():
            lines.append(f"- envelope {start}: `{_fmt(envelope)}`")
        lines.append(f"- visit violations: `{recurrence.summary.get('visit_violations')}`")

    lyapunov = manifest.stage(StageName.LYAPUNOV)
    if lyapunov is not None and lyapunov.status == StageStatus.OK:
        lines.extend(["", "## Lyapunov Exponent", ""])
        for start, endpoint in lyapunov.summary.get("endpoints", {}).items():
            lines.append(
                f"- {start}: n=`{endpoint['n_max']}` value=`{_fmt(endpoint['last_value'])}` "
                f"first-decade median=`{_fmt(endpoint['first_decade_median'])}` "
                f"last-decade median=`{_fmt(endpoint['last_decade_median'])}`"
            )
        lines.append(
            f"- c1- vs c1+ difference: `{_fmt(lyapunov.summary.get('endpoint_difference'))}` "
            f"(last-decade spread `{_fmt(lyapunov.summary.get('endpoint_spread'))}`)"
        )
        lines.append(
            f"- chi_mu: `{_fmt(lyapunov.summary.get('chi_mu'))}` ± `{_fmt(lyapunov.summary.get('chi_mu_error'))}`"
        )

    stability = manifest.stage(StageName.STABILITY)
    if stability is not None and stability.status == StageStatus.OK:
        lines.extend(["", "## Stochastic Stability", ""])
        for epsilon, distance in zip(stability.summary.get("epsilons", []), stability.summary.get("w1", [])):
            lines.append(f"- eps=`{_fmt(epsilon)}` W1=`{_fmt(distance)}`")
        lines.append(f"- shrinks: `{stability.summary.get('shrinks')}`")

    shadow = manifest.stage(StageName.SHADOW)
    if shadow is not None and shadow.status == StageStatus.OK:
        lines.extend(["", "## Shadowing", ""])
        lines.append(
            f"- witness K=`{_fmt(shadow.summary.get('k'))}` xi=`{_fmt(shadow.summary.get('xi'))}` "
            f"delta=`{_fmt(shadow.summary.get('delta'))}` passed=`{shadow.summary.get('passed')}`"
        )
    return "\n".join(lines) + "\n"


def report(manifest: RunManifest) -> str:
    return build_summary_markdown(manifest)
