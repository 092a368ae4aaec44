from .reporting import build_summary_markdown, report
from .runner import STAGES, RunContext, config_hash, load_manifest, raise_for_failure, run

__all__ = [
    "STAGES",
    "RunContext",
    "build_summary_markdown",
    "config_hash",
    "load_manifest",
    "raise_for_failure",
    "report",
    "run",
]
