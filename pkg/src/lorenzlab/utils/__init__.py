from .files import ensure_dir, format_cell, read_csv, to_jsonable, write_csv, write_json, write_text
from .parallel import parallel_map, pool_map, resolve_threads, worker_pool
from .provenance import library_versions, repo_commit, utc_timestamp

__all__ = [
    "ensure_dir",
    "to_jsonable",
    "format_cell",
    "library_versions",
    "parallel_map",
    "pool_map",
    "read_csv",
    "repo_commit",
    "resolve_threads",
    "utc_timestamp",
    "worker_pool",
    "write_csv",
    "write_json",
    "write_text",
]
