"""Parsing, validation, and default-filling for specification documents.

``parse_spec`` returns ``(spec, diagnostics)``: the spec is ``None`` whenever
any diagnostic is an error.  Hand-rolled checks produce precise messages
(path + allowed values); the published JSON schema runs as a structural
backstop so the shipped ``schema/streetweave.schema.json`` stays load-bearing.
Unknown fields warn rather than error, to tolerate grammar extensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Any, Mapping

import jsonschema

from .colors import ColorError, parse_color
from .model import (
    AGGREGATIONS,
    ALIGNMENTS,
    BACKGROUNDS,
    METHODS,
    ORIENTATIONS,
    SPATIAL_RELATIONS,
    UNIT_TYPES,
    ZOOM_MAX,
    ZOOM_MIN,
    Constant,
    DataSpec,
    Diagnostic,
    FieldRef,
    MapConfig,
    QuerySpec,
    RelationSpec,
    ThematicSource,
    UnitSpec,
    VisualizationSpec,
    ZoomRange,
    has_errors,
    spec_to_json,
)
from .schemas import SPEC_SCHEMA
from .thematic import DEFAULT_LAT_COLUMN, DEFAULT_LON_COLUMN

DEFAULT_STREET_COLOR = "#888888"
DEFAULT_STREET_WIDTH = 1.5
DEFAULT_BACKGROUND = "light"
DEFAULT_RELATION = RelationSpec(spatial="buffer", value=10.0, aggregation="mean")

_TOP_KEYS = {"map", "unit", "data", "relation", "query"}
_MAP_KEYS = {"streetColor", "streetWidth", "background"}
_UNIT_KEYS = {
    "type", "method", "density", "opacity", "color", "dash", "squiggle",
    "width", "height", "chart", "rows", "columns", "orientation", "alignment",
    "zoom", "relation",
}
_DATA_KEYS = {"physical", "thematic"}
_THEMATIC_KEYS = {"path", "latColumn", "lonColumn"}
_RELATION_KEYS = {"spatial", "value", "aggregation"}
_QUERY_KEYS = {"address", "radius"}
_FIELD_KEYS = {"field", "range", "base"}

_SCHEMA_VALIDATOR = jsonschema.Draft202012Validator(SPEC_SCHEMA)


def _err(diags: list[Diagnostic], path: str, message: str) -> None:
    diags.append(Diagnostic("error", path, message))


def _warn(diags: list[Diagnostic], path: str, message: str) -> None:
    diags.append(Diagnostic("warning", path, message))


def _enum_ok(value: Any, allowed: tuple[str, ...], path: str, diags: list[Diagnostic]) -> bool:
    if value in allowed:
        return True
    _err(diags, path, f"invalid value {value!r}; allowed: {', '.join(allowed)}")
    return False


def _warn_unknown(obj: Mapping[str, Any], known: set[str], path: str, diags: list[Diagnostic]) -> None:
    for key in obj:
        if key not in known:
            _warn(diags, f"{path}.{key}" if path else key, f"unknown field {key!r} ignored")


def _color_ok(value: Any, path: str, diags: list[Diagnostic]) -> bool:
    if not isinstance(value, str):
        _err(diags, path, f"color must be a string, got {value!r}")
        return False
    try:
        parse_color(value)
    except ColorError as e:
        _err(diags, path, str(e))
        return False
    return True


def _number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _positive_number(value: Any, path: str, name: str, diags: list[Diagnostic]) -> float | None:
    if not _number(value) or value <= 0:
        _err(diags, path, f"{name} must be a number > 0, got {value!r}")
        return None
    return float(value)


def _parse_field_ref(
    obj: Mapping[str, Any], path: str, channel: str, diags: list[Diagnostic]
) -> FieldRef | None:
    _warn_unknown(obj, _FIELD_KEYS, path, diags)
    field = obj.get("field")
    if not isinstance(field, str) or not field:
        _err(diags, f"{path}.field", "field binding requires a non-empty column name")
        return None
    rng = None
    if "range" in obj:
        raw = obj["range"]
        if (
            not isinstance(raw, list)
            or len(raw) != 2
            or not all(_number(v) for v in raw)
            or not raw[0] < raw[1]
        ):
            _err(diags, f"{path}.range", f"range must be [lo, hi] with lo < hi, got {raw!r}")
            return None
        rng = (float(raw[0]), float(raw[1]))
    base = None
    if "base" in obj:
        if not _color_ok(obj["base"], f"{path}.base", diags):
            return None
        base = obj["base"]
        if channel != "color":
            _warn(diags, f"{path}.base", f"base is only used by color bindings, not {channel!r}")
    return FieldRef(field=field, range=rng, base=base)


def _parse_numeric_channel(
    value: Any, path: str, channel: str, diags: list[Diagnostic], integer: bool = False
) -> Any:
    if isinstance(value, Mapping):
        return _parse_field_ref(value, path, channel, diags)
    if isinstance(value, bool) or not _number(value):
        _err(diags, path, f"{channel} must be a number or a field binding, got {value!r}")
        return None
    if integer and float(value) != int(value):
        _err(diags, path, f"{channel} must be an integer, got {value!r}")
        return None
    if channel == "density" and value < 1:
        _err(diags, path, f"density must be >= 1, got {value!r}")
        return None
    if channel == "opacity" and not 0.0 <= value <= 1.0:
        _err(diags, path, f"opacity must be within [0, 1], got {value!r}")
        return None
    if channel in ("width", "height") and value < 0:
        _err(diags, path, f"{channel} must be >= 0, got {value!r}")
        return None
    return Constant(int(value) if integer else float(value))


def _parse_color_channel(value: Any, path: str, diags: list[Diagnostic]) -> Any:
    if isinstance(value, str):
        return Constant(value) if _color_ok(value, path, diags) else None
    if isinstance(value, Mapping):
        return _parse_field_ref(value, path, "color", diags)
    if isinstance(value, list):
        refs = []
        for i, entry in enumerate(value):
            if not isinstance(entry, Mapping):
                _err(diags, f"{path}[{i}]", "matrix color entries must be field bindings")
                return None
            ref = _parse_field_ref(entry, f"{path}[{i}]", "color", diags)
            if ref is None:
                return None
            refs.append(ref)
        if not refs:
            _err(diags, path, "color list must contain at least one field binding")
            return None
        return tuple(refs)
    _err(diags, path, f"color must be a color string, a field binding, or a list, got {value!r}")
    return None


def _parse_dash(value: Any, path: str, diags: list[Diagnostic]) -> Any:
    if isinstance(value, bool):
        return Constant(value)
    if isinstance(value, list) and len(value) == 2 and all(_number(v) and v > 0 for v in value):
        return Constant((float(value[0]), float(value[1])))
    _err(diags, path, f"dash must be true/false or [onPx, offPx] with positive numbers, got {value!r}")
    return None


def _parse_squiggle(value: Any, path: str, diags: list[Diagnostic]) -> Any:
    if isinstance(value, bool):
        return Constant(value)
    if isinstance(value, Mapping):
        _warn_unknown(value, {"amplitude", "wavelength"}, path, diags)
        for key in ("amplitude", "wavelength"):
            if key in value and (not _number(value[key]) or value[key] <= 0):
                _err(diags, f"{path}.{key}", f"{key} must be a number > 0, got {value[key]!r}")
                return None
        return Constant(dict(value))
    _err(diags, path, f"squiggle must be true/false or {{amplitude, wavelength}}, got {value!r}")
    return None


def _parse_zoom(value: Any, path: str, diags: list[Diagnostic]) -> ZoomRange | None:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        _err(diags, path, f"zoom must be [minZoom, maxZoom] integers, got {value!r}")
        return None
    lo, hi = value
    if not (ZOOM_MIN <= lo <= ZOOM_MAX and ZOOM_MIN <= hi <= ZOOM_MAX):
        _err(diags, path, f"zoom levels must be within [{ZOOM_MIN}, {ZOOM_MAX}], got {value!r}")
        return None
    if lo > hi:
        _err(diags, path, f"minZoom ≤ maxZoom violated (got [{lo}, {hi}])")
        return None
    return ZoomRange(lo, hi)


def _parse_relation(obj: Any, path: str, diags: list[Diagnostic]) -> RelationSpec | None:
    if not isinstance(obj, Mapping):
        _err(diags, path, f"relation must be an object, got {obj!r}")
        return None
    _warn_unknown(obj, _RELATION_KEYS, path, diags)
    missing = [k for k in ("spatial", "value", "aggregation") if k not in obj]
    if missing:
        _err(diags, path, f"relation requires spatial, value, aggregation (missing: {', '.join(missing)})")
        return None
    ok = _enum_ok(obj["spatial"], SPATIAL_RELATIONS, f"{path}.spatial", diags)
    ok = _enum_ok(obj["aggregation"], AGGREGATIONS, f"{path}.aggregation", diags) and ok
    value = _positive_number(obj["value"], f"{path}.value", "relation value", diags)
    if value is None or not ok:
        return None
    if obj["spatial"] == "nn" and float(value) != int(value):
        _err(diags, f"{path}.value", f"nn point count must be an integer, got {obj['value']!r}")
        return None
    return RelationSpec(spatial=obj["spatial"], value=float(value), aggregation=obj["aggregation"])


def _parse_map(obj: Any, path: str, diags: list[Diagnostic]) -> MapConfig | None:
    if not isinstance(obj, Mapping):
        _err(diags, path, f"map entry must be an object, got {obj!r}")
        return None
    _warn_unknown(obj, _MAP_KEYS, path, diags)
    street_color = obj.get("streetColor")
    if street_color is not None and not _color_ok(street_color, f"{path}.streetColor", diags):
        return None
    street_width = obj.get("streetWidth")
    if street_width is not None:
        street_width = _positive_number(street_width, f"{path}.streetWidth", "streetWidth", diags)
        if street_width is None:
            return None
    background = obj.get("background")
    if background is not None and not _enum_ok(background, BACKGROUNDS, f"{path}.background", diags):
        return None
    return MapConfig(street_color=street_color, street_width=street_width, background=background)


def _parse_unit(obj: Any, path: str, diags: list[Diagnostic]) -> UnitSpec | None:
    if not isinstance(obj, Mapping):
        _err(diags, path, f"unit entry must be an object, got {obj!r}")
        return None
    _warn_unknown(obj, _UNIT_KEYS, path, diags)
    before = len(diags)

    utype = obj.get("type")
    if utype is None:
        _err(diags, f"{path}.type", f"unit requires a type; allowed: {', '.join(UNIT_TYPES)}")
        return None
    if not _enum_ok(utype, UNIT_TYPES, f"{path}.type", diags):
        return None

    method = obj.get("method")
    if method is not None and not _enum_ok(method, METHODS, f"{path}.method", diags):
        return None
    orientation = obj.get("orientation")
    if orientation is not None and not _enum_ok(orientation, ORIENTATIONS, f"{path}.orientation", diags):
        return None
    alignment = obj.get("alignment")
    if alignment is not None and not _enum_ok(alignment, ALIGNMENTS, f"{path}.alignment", diags):
        return None

    density = None
    if "density" in obj:
        if utype != "segment":
            _err(diags, f"{path}.density", f"density is only legal for segment units, not {utype!r}")
        else:
            density = _parse_numeric_channel(obj["density"], f"{path}.density", "density", diags, integer=True)

    opacity = _parse_numeric_channel(obj["opacity"], f"{path}.opacity", "opacity", diags) if "opacity" in obj else None
    width = _parse_numeric_channel(obj["width"], f"{path}.width", "width", diags) if "width" in obj else None
    height = _parse_numeric_channel(obj["height"], f"{path}.height", "height", diags) if "height" in obj else None
    color = _parse_color_channel(obj["color"], f"{path}.color", diags) if "color" in obj else None
    dash = _parse_dash(obj["dash"], f"{path}.dash", diags) if "dash" in obj else None
    squiggle = _parse_squiggle(obj["squiggle"], f"{path}.squiggle", diags) if "squiggle" in obj else None

    if isinstance(color, tuple) and method != "matrix":
        _err(diags, f"{path}.color", "a list of color bindings is only legal with method 'matrix'")

    chart = obj.get("chart")
    if chart is not None and not isinstance(chart, Mapping):
        _err(diags, f"{path}.chart", f"chart must be an embedded chart object, got {chart!r}")

    rows = obj.get("rows")
    columns = obj.get("columns")
    for name, value in (("rows", rows), ("columns", columns)):
        if value is not None and (isinstance(value, bool) or not isinstance(value, int) or value < 1):
            _err(diags, f"{path}.{name}", f"{name} must be an integer >= 1, got {value!r}")
            return None
    if method != "matrix" and (rows is not None or columns is not None):
        _warn(diags, path, f"rows/columns are only used by method 'matrix', not {method!r}")

    zoom = _parse_zoom(obj["zoom"], f"{path}.zoom", diags) if "zoom" in obj else None
    relation = _parse_relation(obj["relation"], f"{path}.relation", diags) if "relation" in obj else None

    if has_errors(diags[before:]):
        return None
    return UnitSpec(
        type=utype,
        method=method,
        density=density,
        opacity=opacity,
        color=color,
        dash=dash,
        squiggle=squiggle,
        width=width,
        height=height,
        chart=dict(chart) if chart is not None else None,
        rows=rows,
        columns=columns,
        orientation=orientation,
        alignment=alignment,
        zoom=zoom,
        relation=relation,
    )


def _parse_data(obj: Any, path: str, diags: list[Diagnostic]) -> DataSpec | None:
    if not isinstance(obj, Mapping):
        _err(diags, path, f"data entry must be an object, got {obj!r}")
        return None
    _warn_unknown(obj, _DATA_KEYS, path, diags)
    physical = obj.get("physical")
    if physical is not None and (not isinstance(physical, str) or not physical):
        _err(diags, f"{path}.physical", f"physical must be a file path string, got {physical!r}")
        return None
    thematic = None
    if "thematic" in obj:
        raw = obj["thematic"]
        if not isinstance(raw, Mapping):
            _err(diags, f"{path}.thematic", f"thematic must be an object, got {raw!r}")
            return None
        _warn_unknown(raw, _THEMATIC_KEYS, f"{path}.thematic", diags)
        tpath = raw.get("path")
        if not isinstance(tpath, str) or not tpath:
            _err(diags, f"{path}.thematic.path", "thematic requires a CSV file path")
            return None
        for key in ("latColumn", "lonColumn"):
            if key in raw and (not isinstance(raw[key], str) or not raw[key]):
                _err(diags, f"{path}.thematic.{key}", f"{key} must be a column name, got {raw[key]!r}")
                return None
        thematic = ThematicSource(
            path=tpath,
            lat_column=raw.get("latColumn"),
            lon_column=raw.get("lonColumn"),
        )
    if physical is None and thematic is None:
        _err(diags, path, "data entry requires at least one of physical/thematic")
        return None
    return DataSpec(physical=physical, thematic=thematic)


def _parse_query(obj: Any, path: str, diags: list[Diagnostic]) -> QuerySpec | None:
    if not isinstance(obj, Mapping):
        _err(diags, path, f"query must be an object, got {obj!r}")
        return None
    _warn_unknown(obj, _QUERY_KEYS, path, diags)
    address = obj.get("address")
    if address is not None and (not isinstance(address, str) or not address.strip()):
        _err(diags, f"{path}.address", f"address must be a non-empty string, got {address!r}")
        return None
    radius = None
    if "radius" in obj:
        radius = _positive_number(obj["radius"], f"{path}.radius", "query radius", diags)
        if radius is None:
            return None
    if radius is not None and address is None:
        _err(diags, f"{path}.radius", "query radius requires an address")
        return None
    return QuerySpec(address=address, radius=radius)


def _schema_backstop(doc: Any, diags: list[Diagnostic]) -> None:
    """Report schema violations at paths the hand checks did not flag."""
    seen = {d.path for d in diags}
    for error in _SCHEMA_VALIDATOR.iter_errors(doc):
        parts = []
        for token in error.absolute_path:
            if isinstance(token, int):
                parts.append(f"[{token}]")
            else:
                parts.append(f".{token}" if parts else token)
        path = "".join(parts) or "$"
        if path in seen or any(p.startswith(path + ".") or p.startswith(path + "[") for p in seen):
            continue
        seen.add(path)
        _err(diags, path, f"schema violation: {error.message}")


def parse_spec_object(doc: Any) -> tuple[VisualizationSpec | None, list[Diagnostic]]:
    """Validate an already-parsed JSON document."""
    diags: list[Diagnostic] = []
    if not isinstance(doc, Mapping):
        _err(diags, "$", f"specification must be a JSON object, got {type(doc).__name__}")
        return None, diags
    _warn_unknown(doc, _TOP_KEYS, "", diags)

    lists: dict[str, list[Any]] = {}
    for key in ("map", "unit", "data"):
        raw = doc.get(key)
        if raw is None:
            _err(diags, "$", f"missing required section {key!r} (at least one entry)")
        elif not isinstance(raw, list) or len(raw) == 0:
            _err(diags, key, f"{key} must be a non-empty array")
        else:
            lists[key] = raw
    if has_errors(diags):
        _schema_backstop(doc, diags)
        return None, diags

    maps = [_parse_map(m, f"map[{i}]", diags) for i, m in enumerate(lists["map"])]
    if len(maps) > 1:
        for i in range(1, len(maps)):
            _warn(diags, f"map[{i}]", "only the first map entry is honored; this entry is ignored")
    units = [_parse_unit(u, f"unit[{i}]", diags) for i, u in enumerate(lists["unit"])]
    data = [_parse_data(d, f"data[{i}]", diags) for i, d in enumerate(lists["data"])]

    physical_seen = False
    for i, d in enumerate(data):
        if d is not None and d.physical is not None:
            if physical_seen:
                _warn(diags, f"data[{i}].physical", "only the first physical network is honored; this entry is ignored")
            physical_seen = True

    relation = _parse_relation(doc["relation"], "relation", diags) if "relation" in doc else None
    query = _parse_query(doc["query"], "query", diags) if "query" in doc else None

    _schema_backstop(doc, diags)
    if has_errors(diags):
        return None, diags
    return (
        VisualizationSpec(
            maps=tuple(maps),  # type: ignore[arg-type]
            units=tuple(units),  # type: ignore[arg-type]
            data=tuple(data),  # type: ignore[arg-type]
            relation=relation,
            query=query,
        ),
        diags,
    )


def parse_spec(text: str) -> tuple[VisualizationSpec | None, list[Diagnostic]]:
    """Parse and validate a specification document string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        return None, [Diagnostic("error", "$", f"malformed JSON at byte {e.pos}: {e.msg}")]
    return parse_spec_object(doc)


def _default_channel(binding: Any, default: Constant | None) -> Any:
    return binding if binding is not None else default


def apply_defaults(spec: VisualizationSpec) -> VisualizationSpec:
    """Fill every unset optional with its documented default. Idempotent and
    never overwrites an explicitly provided value."""
    maps = tuple(
        MapConfig(
            street_color=m.street_color if m.street_color is not None else DEFAULT_STREET_COLOR,
            street_width=m.street_width if m.street_width is not None else DEFAULT_STREET_WIDTH,
            background=m.background if m.background is not None else DEFAULT_BACKGROUND,
        )
        for m in spec.maps
    )
    units = []
    for u in spec.units:
        method = u.method if u.method is not None else "line"
        units.append(
            replace(
                u,
                method=method,
                orientation=u.orientation if u.orientation is not None else "parallel",
                alignment=u.alignment if u.alignment is not None else "center",
                zoom=u.zoom if u.zoom is not None else ZoomRange(ZOOM_MIN, ZOOM_MAX),
                density=_default_channel(u.density, Constant(1) if u.type == "segment" else None),
                opacity=_default_channel(u.opacity, Constant(1.0)),
                rows=u.rows if u.rows is not None else (1 if method == "matrix" else None),
                columns=u.columns if u.columns is not None else (1 if method == "matrix" else None),
            )
        )
    data = tuple(
        DataSpec(
            physical=d.physical,
            thematic=ThematicSource(
                path=d.thematic.path,
                lat_column=d.thematic.lat_column or DEFAULT_LAT_COLUMN,
                lon_column=d.thematic.lon_column or DEFAULT_LON_COLUMN,
            )
            if d.thematic is not None
            else None,
        )
        for d in spec.data
    )
    return VisualizationSpec(
        maps=maps,
        units=tuple(units),
        data=data,
        relation=spec.relation if spec.relation is not None else DEFAULT_RELATION,
        query=spec.query,
    )


@dataclass(frozen=True)
class UnitBinding:
    unit_index: int
    unit: UnitSpec
    data_index: int
    data: DataSpec
    relation: RelationSpec

    def to_json(self) -> dict:
        return {
            "unit": self.unit_index,
            "data": self.data_index,
            "relation": {
                "spatial": self.relation.spatial,
                "value": self.relation.value,
                "aggregation": self.relation.aggregation,
            },
        }


def bind_units(spec: VisualizationSpec) -> tuple[list[UnitBinding], list[Diagnostic]]:
    """Pair unit i with data entry min(i, len(data)-1) and the effective
    relation (per-unit override, else the global one)."""
    diags: list[Diagnostic] = []
    bindings: list[UnitBinding] = []
    relation = spec.relation if spec.relation is not None else DEFAULT_RELATION
    for i, unit in enumerate(spec.units):
        j = min(i, len(spec.data) - 1)
        data = spec.data[j]
        refs = unit.field_refs()
        if refs and data.thematic is None:
            names = ", ".join(sorted({r.field for _, r in refs}))
            _err(diags, f"unit[{i}]", f"unit binds fields ({names}) but data[{j}] has no thematic layer")
        if unit.type == "point" and data.thematic is None:
            _err(diags, f"unit[{i}]", f"point units require a thematic layer but data[{j}] has none")
        bindings.append(
            UnitBinding(
                unit_index=i,
                unit=unit,
                data_index=j,
                data=data,
                relation=unit.relation if unit.relation is not None else relation,
            )
        )
    return bindings, diags


def serialize_spec(spec: VisualizationSpec) -> str:
    """Canonical document serialization (sorted keys)."""
    return json.dumps(spec_to_json(spec), sort_keys=True, separators=(",", ":"))
