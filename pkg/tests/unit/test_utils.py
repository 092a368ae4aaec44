import json
from pathlib import Path

import numpy as np
import pytest

from lorenzlab.logging.jsonl import JsonlWriter
from lorenzlab.utils.files import format_cell, read_csv, to_jsonable, write_csv
from lorenzlab.utils.parallel import THREADS_ENV, parallel_map, resolve_threads


def square(value: int) -> int:
    return value * value


def test_csv_cells_round_trip_floats_exactly(tmp_path: Path) -> None:
    value = 0.1 + 0.2
    path = write_csv(tmp_path / "table.csv", ["n", "value", "ok", "bound"], [(1, value, True, None)])
    rows = read_csv(path)
    assert rows == [{"n": "1", "value": "0.30000000000000004", "ok": "true", "bound": ""}]
    assert float(rows[0]["value"]) == value
    assert format_cell(np.float64(0.5)) == "0.5"
    assert format_cell(np.int64(3)) == "3"


def test_csv_rejects_ragged_rows(tmp_path: Path) -> None:
    with pytest.raises(ValueError):
        write_csv(tmp_path / "bad.csv", ["a", "b"], [(1,)])


def test_thread_count_precedence(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_threads() == 3
    assert resolve_threads(config_value=2) == 2
    assert resolve_threads(5, 2) == 5
    monkeypatch.setenv(THREADS_ENV, "many")
    assert resolve_threads() == 1
    monkeypatch.delenv(THREADS_ENV)
    assert resolve_threads() == 1


def test_parallel_map_keeps_input_order() -> None:
    assert parallel_map(square, [3, 1, 2], threads=1) == [9, 1, 4]


def test_jsonl_writer_appends_sorted_events(tmp_path: Path) -> None:
    writer = JsonlWriter(tmp_path / "logs" / "events.jsonl")
    writer.event("stage_started", stage="tune")
    writer.event("stage_finished", stage="tune", status="ok")
    lines = (tmp_path / "logs" / "events.jsonl").read_text(encoding="utf-8").splitlines()
    assert [json.loads(line)["event"] for line in lines] == ["stage_started", "stage_finished"]
    assert lines[0] == '{"event": "stage_started", "stage": "tune"}'


def test_events_keep_numpy_values_and_non_finite_floats(tmp_path: Path) -> None:
    assert to_jsonable({"w": np.array([0.5, np.inf]), "k": np.int64(4)}) == {"w": [0.5, "inf"], "k": 4}
    writer = JsonlWriter(tmp_path / "events.jsonl")
    writer.event("ulam_finished", residual=float("nan"), max_density=np.float64(2.5))
    payload = json.loads((tmp_path / "events.jsonl").read_text(encoding="utf-8"))
    assert payload == {"event": "ulam_finished", "max_density": 2.5, "residual": "nan"}
