"""CSV emission with shortest round-trip number formatting."""

from __future__ import annotations

import csv
import io
import math
import numbers
from pathlib import Path
from typing import Iterable, Mapping, Sequence


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        v = float(value)
        return "nan" if math.isnan(v) else repr(v)
    return str(value)


def parse_value(text: str):
    """Inverse of :func:`fmt` for the scalar types it emits."""
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def dumps(fields: Sequence[str], rows: Iterable[Mapping]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([fmt(row.get(f)) for f in fields])
    return buf.getvalue()


def write(path, fields: Sequence[str], rows: Iterable[Mapping]) -> Path:
    path = Path(path)
    path.write_text(dumps(fields, rows))
    return path


def loads(text: str) -> list[dict]:
    return [{k: parse_value(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


def read(path) -> list[dict]:
    with open(path, newline="") as fh:
        return loads(fh.read())
