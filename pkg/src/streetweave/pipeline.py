"""End-to-end orchestration: specification document -> render plan / SVG.

Raises :class:`SpecError` for problems in the specification document (HTTP
400, CLI exit 2) and :class:`DataError` for problems in the referenced data
files (HTTP 422, CLI exit 1 when files are missing).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from . import geo
from .colors import Ramp
from .encoding import (
    DEFAULT_COLOR,
    QueryRegion,
    Scale,
    apply_query,
    build_scale_from_values,
    channel_range,
    resolve_style,
)
from .geocode import GeocodeError, Geocoder
from .geo import GeoError, NetworkLoadError, StreetNetwork, SubSegment
from .model import (
    Constant,
    Diagnostic,
    FieldRef,
    UnitSpec,
    VisualizationSpec,
    has_errors,
)
from .render import (
    DEFAULT_NOMINAL_ZOOM,
    RenderPrimitive,
    emit_plan,
    layout_chart_anchor,
    layout_matrix,
    layout_node,
    layout_parallel,
    layout_perpendicular,
    layout_point,
    meters_per_pixel,
)
from .spatial import JoinedElement, SpatialIndex, join
from .specparse import UnitBinding, apply_defaults, bind_units, parse_spec, serialize_spec
from .svg import emit_svg
from .thematic import ThematicError, ThematicLayer, load_thematic, parse_thematic


class SpecError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(f"{d.path}: {d.message}" for d in diagnostics))
        self.diagnostics = diagnostics


class DataError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(f"{d.path}: {d.message}" for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass
class RenderResult:
    text: str  # plan JSON or SVG document
    warnings: list[Diagnostic]


def _load_physical(
    spec: VisualizationSpec,
    base_dir: Path | None,
    inline_physical: str | Mapping | None,
) -> StreetNetwork:
    if inline_physical is not None:
        try:
            doc = json.loads(inline_physical) if isinstance(inline_physical, str) else inline_physical
            return geo.build_network(doc)
        except (json.JSONDecodeError, NetworkLoadError) as e:
            raise DataError([Diagnostic("error", "data", f"inline physical network unusable: {e}")]) from e
    for i, entry in enumerate(spec.data):
        if entry.physical is not None:
            path = Path(entry.physical)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            try:
                return geo.load_network(path)
            except NetworkLoadError as e:
                raise DataError([Diagnostic("error", f"data[{i}].physical", str(e))]) from e
    raise DataError([Diagnostic("error", "data", "no data entry supplies a physical network")])


def _load_layers(
    spec: VisualizationSpec,
    base_dir: Path | None,
    inline_thematic: str | None,
) -> dict[int, ThematicLayer]:
    layers: dict[int, ThematicLayer] = {}
    cache: dict[tuple[str, str, str], ThematicLayer] = {}
    for i, entry in enumerate(spec.data):
        source = entry.thematic
        if source is None:
            continue
        lat = source.lat_column or "latitude"
        lon = source.lon_column or "longitude"
        try:
            if inline_thematic is not None:
                key = ("<inline>", lat, lon)
                if key not in cache:
                    cache[key] = parse_thematic(inline_thematic, "<inline>", lat, lon)
            else:
                path = Path(source.path)
                if not path.is_absolute() and base_dir is not None:
                    path = base_dir / path
                key = (str(path), lat, lon)
                if key not in cache:
                    cache[key] = load_thematic(path, lat, lon)
            layers[i] = cache[key]
        except ThematicError as e:
            raise DataError([Diagnostic("error", f"data[{i}].thematic", str(e))]) from e
    return layers


def _resolve_query_region(
    spec: VisualizationSpec,
    geocoder: Geocoder | None,
    warnings: list[Diagnostic],
) -> QueryRegion | None:
    query = spec.query
    if query is None or query.address is None:
        return None
    if query.radius is None:
        warnings.append(Diagnostic("warning", "query", "query ignored: no radius given"))
        return None
    coder = geocoder if geocoder is not None else Geocoder()
    try:
        result = coder.geocode(query.address)
    except GeocodeError as e:
        warnings.append(Diagnostic("warning", "query.address", f"query ignored: {e}"))
        return None
    return QueryRegion(center=result.center, radius_m=float(query.radius))


def _check_fields(
    binding: UnitBinding,
    layer: ThematicLayer | None,
    diags: list[Diagnostic],
) -> None:
    refs = binding.unit.field_refs()
    if not refs:
        return
    assert layer is not None  # bind_units already errored otherwise
    for channel, ref in refs:
        if ref.field not in layer.columns:
            diags.append(
                Diagnostic(
                    "error",
                    f"unit[{binding.unit_index}].{channel}",
                    f"field {ref.field!r} is not a column of {layer.source_path} "
                    f"(available: {', '.join(layer.columns)})",
                )
            )
        elif ref.field not in layer.numeric_columns:
            diags.append(
                Diagnostic(
                    "error",
                    f"unit[{binding.unit_index}].{channel}",
                    f"field {ref.field!r} is not numeric; only numeric columns can drive encodings",
                )
            )


def _segment_elements(
    binding: UnitBinding,
    network: StreetNetwork,
    layer: ThematicLayer | None,
    index: SpatialIndex | None,
) -> list[SubSegment]:
    """Subdivide each segment by its resolved density."""
    unit = binding.unit
    segments = sorted(network.segments.values(), key=lambda s: s.id)
    density = unit.density if unit.density is not None else Constant(1)

    per_segment: dict[str, int] = {}
    if isinstance(density, FieldRef):
        joined = join(segments, layer, binding.relation, network.centroid, index=index)
        by_id = {j.element_id: j for j in joined}
        values = [j.aggregates[density.field] for j in joined if density.field in j.aggregates]
        domain = (min(values), max(values)) if values else None
        for seg in segments:
            aggregates = by_id[seg.id].aggregates if seg.id in by_id else {}
            per_segment[seg.id] = geo.resolve_density(unit, seg, dict(aggregates), domain)
    else:
        n = int(density.value)
        for seg in segments:
            per_segment[seg.id] = n

    elements: list[SubSegment] = []
    for seg in segments:
        elements.extend(geo.subdivide(seg, per_segment[seg.id]))
    return elements


def _unit_scales(
    unit: UnitSpec,
    unit_index: int,
    aggregates_by_element: Mapping[str, Mapping[str, float]],
) -> tuple[dict[str, Scale], dict[str, Ramp]]:
    scales: dict[str, Scale] = {}
    ramps: dict[str, Ramp] = {}
    for channel, ref in unit.field_refs():
        if channel == "density":
            continue  # handled by resolve_density at the segment level
        values = [a[ref.field] for a in aggregates_by_element.values() if ref.field in a]
        if not values:
            raise DataError(
                [
                    Diagnostic(
                        "error",
                        f"unit[{unit_index}].{channel}",
                        f"field {ref.field!r} has no data under the current relation",
                    )
                ]
            )
        scales[ref.field] = build_scale_from_values(ref.field, values, channel_range(channel, ref))
        if channel == "color":
            ramps[ref.field] = Ramp(ref.base or DEFAULT_COLOR)
    return scales, ramps


def _matrix_cell_colors(
    unit: UnitSpec,
    aggregates: Mapping[str, float],
    scales: Mapping[str, Scale],
    ramps: Mapping[str, Ramp],
    default_color: str,
) -> list[str]:
    if not isinstance(unit.color, tuple):
        return []
    colors = []
    for ref in unit.color:
        value = aggregates.get(ref.field)
        if value is None:
            colors.append(default_color)
        else:
            colors.append(ramps[ref.field](scales[ref.field](value)))
    return colors


def _stable_points(layer: ThematicLayer) -> list[tuple[str, Any, dict[str, float]]]:
    """(render id, point, numeric attributes), ordered independently of row
    order so row shuffling cannot change plan bytes."""
    def numeric(p) -> dict[str, float]:
        return {
            k: float(v)
            for k, v in p.attributes.items()
            if k in layer.numeric_columns and isinstance(v, (int, float))
        }

    def sort_key(p):
        attrs = {k: v for k, v in sorted(p.attributes.items()) if v is not None}
        return (p.position.lat, p.position.lon, json.dumps(attrs, sort_keys=True))

    ordered = sorted(layer.points, key=sort_key)
    return [(f"pt-{i}", p, numeric(p)) for i, p in enumerate(ordered)]


def build_plan(
    spec: VisualizationSpec,
    *,
    base_dir: Path | str | None = None,
    inline_physical: str | Mapping | None = None,
    inline_thematic: str | None = None,
    nominal_zoom: int | None = None,
    geocoder: Geocoder | None = None,
) -> RenderResult:
    """Build the deterministic render plan for a resolved specification."""
    spec = apply_defaults(spec)
    base = Path(base_dir) if base_dir is not None else None
    warnings: list[Diagnostic] = []

    bindings, bind_diags = bind_units(spec)
    warnings.extend(d for d in bind_diags if d.severity == "warning")
    if has_errors(bind_diags):
        raise SpecError([d for d in bind_diags if d.severity == "error"])

    network = _load_physical(spec, base, inline_physical)
    layers = _load_layers(spec, base, inline_thematic)
    for message in network.warnings:
        warnings.append(Diagnostic("warning", "data", message))
    for i, layer in sorted(layers.items()):
        for message in layer.warnings:
            warnings.append(Diagnostic("warning", f"data[{i}].thematic", message))

    field_diags: list[Diagnostic] = []
    for binding in bindings:
        _check_fields(binding, layers.get(binding.data_index), field_diags)
    if field_diags:
        raise SpecError(field_diags)

    zoom = nominal_zoom if nominal_zoom is not None else DEFAULT_NOMINAL_ZOOM
    m_per_px = meters_per_pixel(network.centroid.lat, zoom)
    origin = network.centroid
    region = _resolve_query_region(spec, geocoder, warnings)
    map_config = spec.maps[0]
    base_street_width = float(map_config.street_width)

    indexes: dict[int, SpatialIndex] = {}

    def index_for(data_index: int) -> SpatialIndex | None:
        if data_index not in layers:
            return None
        if data_index not in indexes:
            indexes[data_index] = SpatialIndex(layers[data_index], origin)
        return indexes[data_index]

    primitives: list[RenderPrimitive] = []
    for binding in bindings:
        unit = binding.unit
        layer = layers.get(binding.data_index)
        index = index_for(binding.data_index)
        layer_idx = binding.unit_index

        if unit.type == "point":
            assert layer is not None
            stable = _stable_points(layer)
            if not stable:
                warnings.append(Diagnostic("warning", f"unit[{layer_idx}]", "empty layer: no points to draw"))
            attrs_by_id = {pid: attrs for pid, _, attrs in stable}
            scales, ramps = _unit_scales(unit, binding.unit_index, attrs_by_id) if unit.field_refs() else ({}, {})
            styles = [resolve_style(unit, attrs, scales, ramps) for _, _, attrs in stable]
            styles = apply_query([(p.position, s) for (_, p, _), s in zip(stable, styles)], region, origin)
            for (pid, p, _), style in zip(stable, styles):
                primitives.extend(layout_point(pid, p.position, style, layer_idx))
            continue

        if unit.type == "node":
            nodes = sorted(network.nodes.values(), key=lambda n: n.id)
            joined = (
                {j.element_id: j for j in join(nodes, layer, binding.relation, origin, index=index)}
                if layer is not None
                else {}
            )
            aggs = {n.id: dict(joined[n.id].aggregates) if n.id in joined else {} for n in nodes}
            scales, ramps = _unit_scales(unit, binding.unit_index, aggs) if unit.field_refs() else ({}, {})
            styles = [resolve_style(unit, aggs[n.id], scales, ramps) for n in nodes]
            styles = apply_query([(n.position, s) for n, s in zip(nodes, styles)], region, origin)
            for node, style in zip(nodes, styles):
                if unit.chart is not None:
                    values = dict(aggs[node.id])
                    values["count"] = joined[node.id].count if node.id in joined else 0
                    primitives.extend(
                        layout_node(node, style, unit.chart, values, unit.alignment, layer_idx)
                    )
                elif unit.method == "matrix":
                    cell_colors = _matrix_cell_colors(unit, aggs[node.id], scales, ramps, style.color_rgba)
                    try:
                        primitives.extend(
                            layout_matrix(node, unit.rows, unit.columns, cell_colors, style, origin, m_per_px, layer_idx)
                        )
                    except ValueError as e:
                        raise SpecError([Diagnostic("error", f"unit[{layer_idx}]", str(e))]) from e
                else:
                    primitives.extend(layout_node(node, style, None, None, unit.alignment, layer_idx))
            continue

        # segment unit
        try:
            elements = _segment_elements(binding, network, layer, index)
        except GeoError as e:
            raise SpecError([Diagnostic("error", f"unit[{layer_idx}].density", str(e))]) from e
        joined_map: dict[str, JoinedElement] = {}
        if layer is not None:
            joined_map = {j.element_id: j for j in join(elements, layer, binding.relation, origin, index=index)}
        aggs = {e.id: dict(joined_map[e.id].aggregates) if e.id in joined_map else {} for e in elements}
        scales, ramps = _unit_scales(unit, binding.unit_index, aggs) if unit.field_refs() else ({}, {})
        styles = [resolve_style(unit, aggs[e.id], scales, ramps) for e in elements]
        styles = apply_query([(e.midpoint, s) for e, s in zip(elements, styles)], region, origin)

        for element, style in zip(elements, styles):
            if unit.chart is not None:
                values = dict(aggs[element.id])
                values["count"] = joined_map[element.id].count if element.id in joined_map else 0
                primitives.extend(
                    layout_chart_anchor(element, style, unit.chart, values, unit.alignment, unit.orientation, layer_idx)
                )
            elif unit.orientation == "perpendicular":
                primitives.extend(layout_perpendicular(element, style, unit.alignment, origin, m_per_px, layer_idx))
            elif unit.method == "matrix":
                cell_colors = _matrix_cell_colors(unit, aggs[element.id], scales, ramps, style.color_rgba)
                try:
                    primitives.extend(
                        layout_matrix(element, unit.rows, unit.columns, cell_colors, style, origin, m_per_px, layer_idx)
                    )
                except ValueError as e:
                    raise SpecError([Diagnostic("error", f"unit[{layer_idx}]", str(e))]) from e
            else:
                primitives.extend(
                    layout_parallel(element, style, unit.alignment, base_street_width, origin, m_per_px, unit.method, layer_idx)
                )

    meta = {
        "specHash": hashlib.sha256(serialize_spec(spec).encode("utf-8")).hexdigest(),
        "unitBindings": [b.to_json() for b in bindings],
        "layers": [
            {
                "layer": b.unit_index,
                "type": b.unit.type,
                "method": b.unit.method,
                "orientation": b.unit.orientation,
                "alignment": b.unit.alignment,
                "zoom": [b.unit.zoom.min_zoom, b.unit.zoom.max_zoom],
            }
            for b in bindings
        ],
        "warnings": [f"{d.path}: {d.message}" for d in warnings],
        "nominalZoom": zoom,
    }
    map_json = {
        "streetColor": map_config.street_color,
        "streetWidth": map_config.street_width,
        "background": map_config.background,
    }
    text = emit_plan(primitives, network.segments, map_json, meta)
    return RenderResult(text=text, warnings=warnings)


def render_spec_text(
    text: str,
    *,
    base_dir: Path | str | None = None,
    output: str = "plan",
    zoom: int | None = None,
    viewport: Mapping[str, Any] | None = None,
    inline_physical: str | Mapping | None = None,
    inline_thematic: str | None = None,
    nominal_zoom: int | None = None,
    geocoder: Geocoder | None = None,
) -> RenderResult:
    """Parse, validate, and render a specification document string."""
    spec, diags = parse_spec(text)
    if spec is None:
        raise SpecError([d for d in diags if d.severity == "error"])
    result = build_plan(
        spec,
        base_dir=base_dir,
        inline_physical=inline_physical,
        inline_thematic=inline_thematic,
        nominal_zoom=nominal_zoom,
        geocoder=geocoder,
    )
    result.warnings = [d for d in diags if d.severity == "warning"] + result.warnings
    if output == "svg":
        plan = json.loads(result.text)
        result.text = emit_svg(plan, viewport, zoom)
    elif output != "plan":
        raise ValueError(f"unknown output format {output!r}")
    return result
