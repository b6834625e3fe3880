"""Document model for the StreetWeave visualization grammar.

A specification document is JSON with this overall shape::

    {
      "map":  [ { streetColor?, streetWidth?, background? }, ... ],
      "unit": [ { type, method, density?, color?, width?, ... }, ... ],
      "data": [ { physical?, thematic? }, ... ],
      "relation": { spatial, value, aggregation }?,
      "query": { address?, radius? }?
    }

Channel values are either a bare literal (a constant) or an object
``{"field": <column>, "range"?: [lo, hi], "base"?: <color>}`` binding the
channel to a thematic column.  The model keeps unfilled optionals as ``None``
so that :func:`streetweave.specparse.apply_defaults` can fill them without
clobbering anything the author wrote.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Mapping

UNIT_TYPES = ("segment", "node", "point")
METHODS = ("line", "rect", "matrix")
ORIENTATIONS = ("parallel", "perpendicular")
ALIGNMENTS = ("left", "center", "right")
BACKGROUNDS = ("light", "dark")
SPATIAL_RELATIONS = ("buffer", "nn", "contains")
AGGREGATIONS = ("sum", "mean", "min", "max")

ZOOM_MIN = 0
ZOOM_MAX = 22


@dataclass(frozen=True)
class Diagnostic:
    """A validation finding. ``error`` blocks rendering, ``warning`` does not."""

    severity: str  # "error" | "warning"
    path: str
    message: str

    def to_json(self) -> dict[str, str]:
        return {"severity": self.severity, "path": self.path, "message": self.message}


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)


@dataclass(frozen=True)
class Constant:
    value: Any


@dataclass(frozen=True)
class FieldRef:
    """Channel bound to a thematic column, optionally with an output range.

    ``base`` names the base hue for color ramps; ignored on other channels.
    """

    field: str
    range: tuple[float, float] | None = None
    base: str | None = None


# A channel is a Constant, a FieldRef, or (matrix color only) a tuple of FieldRefs.
ChannelBinding = Any


@dataclass(frozen=True)
class ZoomRange:
    min_zoom: int
    max_zoom: int

    def contains(self, zoom: int) -> bool:
        return self.min_zoom <= zoom <= self.max_zoom


@dataclass(frozen=True)
class MapConfig:
    street_color: str | None = None
    street_width: float | None = None
    background: str | None = None


@dataclass(frozen=True)
class ThematicSource:
    path: str
    lat_column: str | None = None
    lon_column: str | None = None


@dataclass(frozen=True)
class DataSpec:
    physical: str | None = None
    thematic: ThematicSource | None = None


@dataclass(frozen=True)
class RelationSpec:
    spatial: str  # "buffer" | "nn" | "contains"
    value: float  # meters (buffer), point count (nn), corridor half-width (contains)
    aggregation: str  # "sum" | "mean" | "min" | "max"


@dataclass(frozen=True)
class QuerySpec:
    address: str | None = None
    radius: float | None = None


@dataclass(frozen=True)
class UnitSpec:
    type: str
    method: str | None = None
    density: ChannelBinding | None = None
    opacity: ChannelBinding | None = None
    color: ChannelBinding | None = None
    dash: ChannelBinding | None = None
    squiggle: ChannelBinding | None = None
    width: ChannelBinding | None = None
    height: ChannelBinding | None = None
    chart: Mapping[str, Any] | None = None
    rows: int | None = None
    columns: int | None = None
    orientation: str | None = None
    alignment: str | None = None
    zoom: ZoomRange | None = None
    # Extension: per-unit relation override (the top-level relation applies
    # to every unit otherwise).
    relation: RelationSpec | None = None

    def field_refs(self) -> list[tuple[str, FieldRef]]:
        """All (channel, FieldRef) pairs bound on this unit."""
        refs: list[tuple[str, FieldRef]] = []
        for channel in ("density", "opacity", "color", "width", "height"):
            value = getattr(self, channel)
            if isinstance(value, FieldRef):
                refs.append((channel, value))
            elif isinstance(value, tuple):
                refs.extend((channel, v) for v in value if isinstance(v, FieldRef))
        return refs


@dataclass(frozen=True)
class VisualizationSpec:
    maps: tuple[MapConfig, ...]
    units: tuple[UnitSpec, ...]
    data: tuple[DataSpec, ...]
    relation: RelationSpec | None = None
    query: QuerySpec | None = None

    def with_(self, **kwargs: Any) -> "VisualizationSpec":
        return replace(self, **kwargs)


def _binding_to_json(value: ChannelBinding) -> Any:
    if isinstance(value, Constant):
        return value.value
    if isinstance(value, FieldRef):
        out: dict[str, Any] = {"field": value.field}
        if value.range is not None:
            out["range"] = list(value.range)
        if value.base is not None:
            out["base"] = value.base
        return out
    if isinstance(value, tuple):
        return [_binding_to_json(v) for v in value]
    return value


def relation_to_json(relation: RelationSpec) -> dict[str, Any]:
    return {
        "spatial": relation.spatial,
        "value": relation.value,
        "aggregation": relation.aggregation,
    }


def spec_to_json(spec: VisualizationSpec) -> dict[str, Any]:
    """Serialize back to document form, emitting only fields that are set."""
    doc: dict[str, Any] = {"map": [], "unit": [], "data": []}
    for m in spec.maps:
        entry: dict[str, Any] = {}
        if m.street_color is not None:
            entry["streetColor"] = m.street_color
        if m.street_width is not None:
            entry["streetWidth"] = m.street_width
        if m.background is not None:
            entry["background"] = m.background
        doc["map"].append(entry)
    for u in spec.units:
        entry = {"type": u.type}
        if u.method is not None:
            entry["method"] = u.method
        for channel in ("density", "opacity", "color", "dash", "squiggle", "width", "height"):
            value = getattr(u, channel)
            if value is not None:
                entry[channel] = _binding_to_json(value)
        if u.chart is not None:
            entry["chart"] = u.chart
        if u.rows is not None:
            entry["rows"] = u.rows
        if u.columns is not None:
            entry["columns"] = u.columns
        if u.orientation is not None:
            entry["orientation"] = u.orientation
        if u.alignment is not None:
            entry["alignment"] = u.alignment
        if u.zoom is not None:
            entry["zoom"] = [u.zoom.min_zoom, u.zoom.max_zoom]
        if u.relation is not None:
            entry["relation"] = relation_to_json(u.relation)
        doc["unit"].append(entry)
    for d in spec.data:
        entry = {}
        if d.physical is not None:
            entry["physical"] = d.physical
        if d.thematic is not None:
            them: dict[str, Any] = {"path": d.thematic.path}
            if d.thematic.lat_column is not None:
                them["latColumn"] = d.thematic.lat_column
            if d.thematic.lon_column is not None:
                them["lonColumn"] = d.thematic.lon_column
            entry["thematic"] = them
        doc["data"].append(entry)
    if spec.relation is not None:
        doc["relation"] = relation_to_json(spec.relation)
    if spec.query is not None:
        q: dict[str, Any] = {}
        if spec.query.address is not None:
            q["address"] = spec.query.address
        if spec.query.radius is not None:
            q["radius"] = spec.query.radius
        doc["query"] = q
    return doc
