"""CSV and JSON output for benchmark runs."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .. import __version__

CSV_HEADER = ("experiment", "sampler", "d", "M", "statistic", "value", "trials", "wall_ms", "seed")


@dataclass(frozen=True)
class ResultRecord:
    experiment: str
    sampler: str
    d: int
    M: int
    statistic: str
    value: float
    trials: int
    wall_ms: float | None
    seed: int


def format_number(x) -> str:
    """Shortest round-trip decimal, locale independent."""
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for rec in records:
        wall = "" if rec.wall_ms is None else f"{rec.wall_ms:.3f}"
        row = (
            rec.experiment,
            rec.sampler,
            str(rec.d),
            str(rec.M),
            rec.statistic,
            format_number(rec.value),
            str(rec.trials),
            wall,
            str(rec.seed),
        )
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def write_csv(records, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(records_to_csv(records), newline="\n")
    return path


def read_csv(path: str | Path) -> list[dict]:
    import csv

    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def metadata_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".json")


def write_metadata(csv_path: str | Path, config: dict, extra: dict | None = None) -> Path:
    meta = {"library": "rqmcf", "version": __version__, "config": config}
    meta.update(extra or {})
    path = metadata_path(csv_path)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
    return path
