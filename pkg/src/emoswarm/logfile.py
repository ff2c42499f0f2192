"""Trajectory log export and parsing (CSV and JSON lines).

CSV files start with ``#`` comment lines, one of which carries the run
metadata as JSON, followed by the header ``t,robot_id,x,y,theta,v,omega``.
JSONL files hold a ``{"meta": ...}`` object on the first line and one record
object per following line. Reals are written with ``repr`` so parsing them
back reproduces the exact bit pattern.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .engine import TrajectoryLog

FIELDS = ("t", "robot_id", "x", "y", "theta", "v", "omega")
HEADER = ",".join(FIELDS)
FORMATS = ("csv", "jsonl")
META_PREFIX = "# meta: "


class MalformedLog(ValueError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(f"row {row}: {message}" if row is not None else message)
        self.row = row


def infer_format(path) -> str:
    return "jsonl" if Path(path).suffix.lower() in (".jsonl", ".ndjson") else "csv"


def _meta_json(meta: dict) -> str:
    return json.dumps(meta, sort_keys=True, separators=(",", ":"))


def dumps_csv(log: TrajectoryLog) -> str:
    lines = ["# emoswarm trajectory log", META_PREFIX + _meta_json(log.metadata), HEADER]
    for t, i, x, y, th, v, w in log.records():
        lines.append(f"{t!r},{i},{x!r},{y!r},{th!r},{v!r},{w!r}")
    return "\n".join(lines) + "\n"


def dumps_jsonl(log: TrajectoryLog) -> str:
    lines = [json.dumps({"meta": log.metadata}, sort_keys=True, separators=(",", ":"))]
    for rec in log.records():
        lines.append(json.dumps(dict(zip(FIELDS, rec)), separators=(",", ":")))
    return "\n".join(lines) + "\n"


def write_log(log: TrajectoryLog, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or infer_format(path)
    if fmt not in FORMATS:
        raise ValueError(f"unknown log format {fmt!r}; expected one of {FORMATS}")
    text = dumps_csv(log) if fmt == "csv" else dumps_jsonl(log)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _parse_csv(lines):
    meta, rows = {}, []
    header_seen = False
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            if line.startswith(META_PREFIX):
                try:
                    meta = json.loads(line[len(META_PREFIX):])
                except json.JSONDecodeError as exc:
                    raise MalformedLog(f"bad metadata: {exc}", lineno) from None
            continue
        if not header_seen:
            if line.strip() != HEADER:
                raise MalformedLog(f"expected header {HEADER!r}", lineno)
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != len(FIELDS):
            raise MalformedLog(f"expected {len(FIELDS)} fields, got {len(parts)}", lineno)
        try:
            rows.append((float(parts[0]), int(parts[1]), *map(float, parts[2:])))
        except ValueError as exc:
            raise MalformedLog(str(exc), lineno) from None
    if not header_seen:
        raise MalformedLog("missing header line")
    return meta, rows


def _parse_jsonl(lines):
    meta, rows = {}, []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLog(f"invalid JSON: {exc.msg}", lineno) from None
        if not isinstance(obj, dict):
            raise MalformedLog("expected a JSON object", lineno)
        if "meta" in obj and len(obj) == 1:
            meta = obj["meta"]
            continue
        try:
            rows.append(
                (
                    float(obj["t"]),
                    int(obj["robot_id"]),
                    *(float(obj[k]) for k in FIELDS[2:]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedLog(f"bad record: {exc!r}", lineno) from None
    return meta, rows


def _assemble(meta: dict, rows: list) -> TrajectoryLog:
    if not rows:
        raise MalformedLog("log has no records")
    ids = [r[1] for r in rows]
    n = int(meta.get("n", max(ids) + 1))
    if len(rows) % n:
        raise MalformedLog(f"{len(rows)} records is not a multiple of {n} robots")
    arr = np.array([[r[0], r[2], r[3], r[4], r[5], r[6]] for r in rows], dtype=float)
    steps = len(rows) // n
    expected = np.tile(np.arange(n), steps)
    bad = np.flatnonzero(np.asarray(ids) != expected)
    if len(bad):
        raise MalformedLog(f"expected robot_id {expected[bad[0]]}, got {ids[bad[0]]}", int(bad[0]) + 1)
    arr = arr.reshape(steps, n, 6)
    times = arr[:, 0, 0]
    if np.any(arr[:, :, 0] != times[:, None]):
        k = int(np.flatnonzero(np.any(arr[:, :, 0] != times[:, None], axis=1))[0])
        raise MalformedLog("records of one step carry different times", k * n + 1)
    if np.any(np.diff(times) < 0):
        raise MalformedLog("records are not sorted by time")
    return TrajectoryLog(times.copy(), arr[:, :, 1:4].copy(), arr[:, :, 4:6].copy(), meta)


def read_log(path, fmt: str | None = None) -> TrajectoryLog:
    """Parse a CSV or JSONL log written by :func:`write_log`.

    Row numbers in :class:`MalformedLog` refer to lines of the file for CSV
    and JSONL input (record indices for structural errors found afterwards).
    """
    path = Path(path)
    fmt = fmt or infer_format(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    meta, rows = _parse_csv(lines) if fmt == "csv" else _parse_jsonl(lines)
    return _assemble(meta, rows)
