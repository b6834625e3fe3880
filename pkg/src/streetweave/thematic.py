"""Thematic layer ingestion from CSV.

Input contract: RFC 4180 CSV, UTF-8, header row required, decimal point
``.``, empty cell = missing.  A column counts as numeric iff every non-empty
cell of every kept row parses as a finite number.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .geo import GeoPoint

DEFAULT_LAT_COLUMN = "latitude"
DEFAULT_LON_COLUMN = "longitude"


class ThematicError(ValueError):
    """Thematic input unusable: missing file/columns or zero valid rows."""


@dataclass(frozen=True)
class ThematicPoint:
    id: int  # data-row ordinal in the source file
    position: GeoPoint
    attributes: Mapping[str, float | str | None]


@dataclass(frozen=True)
class ThematicLayer:
    points: tuple[ThematicPoint, ...]
    numeric_columns: frozenset[str]
    source_path: str
    columns: tuple[str, ...]
    skipped_rows: int = 0
    warnings: tuple[str, ...] = ()


def _parse_finite(cell: str) -> float | None:
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def load_thematic(
    path: str | Path,
    lat_column: str = DEFAULT_LAT_COLUMN,
    lon_column: str = DEFAULT_LON_COLUMN,
) -> ThematicLayer:
    p = Path(path)
    if not p.is_file():
        raise ThematicError(f"thematic file not found: {p}")
    return parse_thematic(p.read_text(encoding="utf-8"), str(p), lat_column, lon_column)


def parse_thematic(
    text: str,
    source_path: str = "<inline>",
    lat_column: str = DEFAULT_LAT_COLUMN,
    lon_column: str = DEFAULT_LON_COLUMN,
) -> ThematicLayer:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ThematicError(f"{source_path}: empty CSV, header row required") from None
    header = [h.strip() for h in header]
    for needed in (lat_column, lon_column):
        if needed not in header:
            raise ThematicError(f"{source_path}: column {needed!r} not in header {header}")
    lat_idx = header.index(lat_column)
    lon_idx = header.index(lon_column)
    attr_columns = [h for i, h in enumerate(header) if i not in (lat_idx, lon_idx)]
    if not attr_columns:
        raise ThematicError(f"{source_path}: no attribute columns besides {lat_column}/{lon_column}")

    points: list[ThematicPoint] = []
    skipped = 0
    non_numeric: set[str] = set()
    has_value: set[str] = set()
    for ordinal, row in enumerate(reader):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) < len(header):
            row = row + [""] * (len(header) - len(row))
        lat = _parse_finite(row[lat_idx].strip())
        lon = _parse_finite(row[lon_idx].strip())
        if lat is None or lon is None or not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
            skipped += 1
            continue
        attributes: dict[str, float | str | None] = {}
        for i, column in enumerate(header):
            if i in (lat_idx, lon_idx):
                continue
            cell = row[i].strip()
            if cell == "":
                attributes[column] = None
                continue
            value = _parse_finite(cell)
            if value is None:
                attributes[column] = cell
                non_numeric.add(column)
            else:
                attributes[column] = value
            has_value.add(column)
        points.append(ThematicPoint(id=ordinal, position=GeoPoint(lat, lon), attributes=attributes))

    if not points:
        raise ThematicError(f"{source_path}: zero valid rows")

    numeric = frozenset(c for c in attr_columns if c in has_value and c not in non_numeric)
    warnings = []
    if skipped:
        noun = "row" if skipped == 1 else "rows"
        warnings.append(f"{skipped} {noun} dropped: coordinate missing or out of range")
    return ThematicLayer(
        points=tuple(points),
        numeric_columns=numeric,
        source_path=source_path,
        columns=tuple(attr_columns),
        skipped_rows=skipped,
        warnings=tuple(warnings),
    )
