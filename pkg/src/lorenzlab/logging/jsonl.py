from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from lorenzlab.utils.files import ensure_dir, to_jsonable


class JsonlWriter:
    """Append-only event log, one sorted-key JSON object per line."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        ensure_dir(self.path.parent)

    def write(self, payload: Any) -> None:
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(to_jsonable(payload), sort_keys=True, allow_nan=False))
            handle.write("\n")

    def event(self, name: str, **fields: Any) -> None:
        self.write({"event": name, **fields})
