"""Artifact files: atomic JSON/CSV writes and tolerant JSON reads."""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

logger = logging.getLogger(__name__)


def _safe_json_load(path: Path, fallback=None):
    """Load JSON from a file, returning fallback if corrupted."""
    try:
        return json.loads(path.read_text())
    except (json.JSONDecodeError, ValueError):
        logger.warning("Corrupted JSON file: %s, ignoring", path)
        return fallback


def dumps(data: Any) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def atomic_write_text(path: Path, text: str) -> Path:
    """Write via a temp file and rename, so readers never see a partial file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    tmp.rename(path)
    return path


def write_json(path: Path, data: Any) -> Path:
    return atomic_write_text(path, dumps(data))


def load_json(path: Path, fallback=None):
    if path.exists():
        return _safe_json_load(path, fallback=fallback)
    return fallback


def csv_text(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comments: dict[str, Any] | None = None,
) -> str:
    """CSV with leading ``# key=value`` lines carrying the resolved configuration."""
    buf = io.StringIO()
    for key, value in (comments or {}).items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comments: dict[str, Any] | None = None,
) -> Path:
    return atomic_write_text(path, csv_text(header, rows, comments))
