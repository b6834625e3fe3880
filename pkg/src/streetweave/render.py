"""Layout of styled primitives along network geometry and deterministic
render-plan emission.

Pixel-sized quantities (widths, bristle heights, matrix cells) are converted
to meters at a nominal zoom so the plan itself is zoom-independent.  Emission
sorts primitives by (layer, sourceId, ordinal) and serializes with sorted
keys and fixed 7-decimal coordinates, so identical inputs give identical
bytes on every platform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Any, Iterable, Mapping, Sequence

from .encoding import ResolvedStyle
from .geo import (
    EARTH_RADIUS_M,
    GeoPoint,
    NetworkNode,
    StreetSegment,
    SubSegment,
    project,
    unproject,
)

DEFAULT_NOMINAL_ZOOM = 16
MATRIX_CELL_PX = 8.0
CHART_ANCHOR_PX = 24.0
PARALLEL_OFFSET_GAP_PX = 1.0
COORD_DECIMALS = 7
PX_DECIMALS = 4


def meters_per_pixel(lat_deg: float, zoom: int) -> float:
    """Web-Mercator-style ground resolution at the given latitude and zoom."""
    return 2.0 * math.pi * EARTH_RADIUS_M * math.cos(math.radians(lat_deg)) / (256.0 * 2.0**zoom)


def _compass_unit(bearing: float) -> tuple[float, float]:
    """Unit vector (x east, y north) pointing at a compass bearing."""
    rad = math.radians(bearing)
    return math.sin(rad), math.cos(rad)


@dataclass(frozen=True)
class RenderPrimitive:
    kind: str  # polyline | rect | path | circle | chartAnchor
    layer: int
    source_id: str
    ordinal: int
    style: ResolvedStyle
    coordinates: tuple[GeoPoint, ...] | None = None
    anchor: GeoPoint | None = None
    radius_px: float | None = None
    along_px: float | None = None
    across_px: float | None = None
    rotation_deg: float | None = None
    orientation_deg: float | None = None
    alignment: str | None = None
    chart: Mapping[str, Any] | None = None
    values: Mapping[str, float] | None = None

    def sort_key(self) -> tuple[int, str, int]:
        return (self.layer, self.source_id, self.ordinal)


def offset_polyline(points: Sequence[GeoPoint], offset_m: float, origin: GeoPoint) -> list[GeoPoint]:
    """Offset perpendicular to local direction; positive = left-hand side
    when traveling first -> last vertex."""
    if offset_m == 0.0:
        return list(points)
    xy = [project(p, origin) for p in points]
    dirs: list[tuple[float, float]] = []
    for i in range(len(xy) - 1):
        dx, dy = xy[i + 1][0] - xy[i][0], xy[i + 1][1] - xy[i][1]
        norm = math.hypot(dx, dy)
        dirs.append((dx / norm, dy / norm) if norm else (0.0, 0.0))
    out = []
    for i, (x, y) in enumerate(xy):
        if i == 0:
            dx, dy = dirs[0]
        elif i == len(xy) - 1:
            dx, dy = dirs[-1]
        else:
            sx, sy = dirs[i - 1][0] + dirs[i][0], dirs[i - 1][1] + dirs[i][1]
            norm = math.hypot(sx, sy)
            dx, dy = (sx / norm, sy / norm) if norm else dirs[i]
        # left normal of travel direction (dx, dy) is (-dy, dx)
        out.append(unproject(x - dy * offset_m, y + dx * offset_m, origin))
    return out


def _alignment_offset_m(alignment: str, style: ResolvedStyle, base_street_width_px: float, m_per_px: float) -> float:
    if alignment == "center":
        return 0.0
    d = (base_street_width_px / 2.0 + style.width_px / 2.0 + PARALLEL_OFFSET_GAP_PX) * m_per_px
    return d if alignment == "left" else -d


def squiggle_path(
    points: Sequence[GeoPoint],
    amplitude_px: float,
    wavelength_px: float,
    origin: GeoPoint,
    m_per_px: float,
) -> list[GeoPoint]:
    """Sinusoidal displacement perpendicular to the local tangent, sampled
    every wavelength/8 of arc length.  Endpoints stay fixed."""
    if amplitude_px <= 0 or wavelength_px <= 0:
        return list(points)
    xy = [project(p, origin) for p in points]
    seg_len = [math.hypot(xy[i + 1][0] - xy[i][0], xy[i + 1][1] - xy[i][1]) for i in range(len(xy) - 1)]
    total = sum(seg_len)
    if total == 0:
        return list(points)
    amp_m = amplitude_px * m_per_px
    wl_m = wavelength_px * m_per_px
    step = wl_m / 8.0

    out = [points[0]]
    s = step
    edge = 0
    walked = 0.0
    while s < total - 1e-9:
        while edge < len(seg_len) and walked + seg_len[edge] < s:
            walked += seg_len[edge]
            edge += 1
        if edge >= len(seg_len):
            break
        t = (s - walked) / seg_len[edge] if seg_len[edge] else 0.0
        ax, ay = xy[edge]
        bx, by = xy[edge + 1]
        px, py = ax + t * (bx - ax), ay + t * (by - ay)
        tx, ty = (bx - ax) / seg_len[edge], (by - ay) / seg_len[edge]
        disp = amp_m * math.sin(2.0 * math.pi * s / wl_m)
        out.append(unproject(px - ty * disp, py + tx * disp, origin))
        s += step
    out.append(points[-1])
    return out


def layout_parallel(
    element: StreetSegment | SubSegment,
    style: ResolvedStyle,
    alignment: str,
    base_street_width_px: float,
    origin: GeoPoint,
    m_per_px: float,
    method: str,
    layer: int,
) -> list[RenderPrimitive]:
    """A line or rect strip along the element, offset to the requested side."""
    offset = _alignment_offset_m(alignment, style, base_street_width_px, m_per_px)
    if method == "rect":
        anchor = element.midpoint
        if offset:
            x, y = project(anchor, origin)
            ux, uy = _compass_unit(element.bearing_deg)
            anchor = unproject(x - uy * offset, y + ux * offset, origin)
        return [
            RenderPrimitive(
                kind="rect",
                layer=layer,
                source_id=element.id,
                ordinal=0,
                style=style,
                anchor=anchor,
                along_px=element.length_m / m_per_px,
                across_px=style.width_px,
                rotation_deg=element.bearing_deg,
            )
        ]
    coords = offset_polyline(element.polyline, offset, origin) if offset else list(element.polyline)
    if style.squiggle is not None:
        coords = squiggle_path(coords, style.squiggle[0], style.squiggle[1], origin, m_per_px)
        kind = "path"
    else:
        kind = "polyline"
    return [
        RenderPrimitive(
            kind=kind,
            layer=layer,
            source_id=element.id,
            ordinal=0,
            style=style,
            coordinates=tuple(coords),
        )
    ]


def layout_perpendicular(
    sub: SubSegment,
    style: ResolvedStyle,
    alignment: str,
    origin: GeoPoint,
    m_per_px: float,
    layer: int,
) -> list[RenderPrimitive]:
    """One bristle at the sub-segment midpoint: local bearing +90 deg for
    left alignment, -90 for right, both half-length for center."""
    length_m = style.height_px * m_per_px
    mx, my = project(sub.midpoint, origin)
    ux, uy = _compass_unit(sub.bearing_deg + 90.0)
    if alignment == "left":
        a, b = (mx, my), (mx + ux * length_m, my + uy * length_m)
    elif alignment == "right":
        a, b = (mx, my), (mx - ux * length_m, my - uy * length_m)
    else:
        half = length_m / 2.0
        a = (mx - ux * half, my - uy * half)
        b = (mx + ux * half, my + uy * half)
    return [
        RenderPrimitive(
            kind="polyline",
            layer=layer,
            source_id=sub.id,
            ordinal=0,
            style=style,
            coordinates=(unproject(*a, origin), unproject(*b, origin)),
        )
    ]


def layout_matrix(
    element: StreetSegment | SubSegment | NetworkNode,
    rows: int,
    columns: int,
    cell_colors: Sequence[str],
    style: ResolvedStyle,
    origin: GeoPoint,
    m_per_px: float,
    layer: int,
    cell_px: float = MATRIX_CELL_PX,
) -> list[RenderPrimitive]:
    """A rows x columns grid of rects centered on the element midpoint,
    oriented to the local bearing; cells fill row-major."""
    if len(cell_colors) > rows * columns:
        raise ValueError(f"matrix overflow: {len(cell_colors)} fields > {rows * columns} cells")
    if isinstance(element, NetworkNode):
        center, bearing = element.position, 0.0
    else:
        center, bearing = element.midpoint, element.bearing_deg
    cx, cy = project(center, origin)
    ax, ay = _compass_unit(bearing)  # along the street
    px_, py_ = _compass_unit(bearing + 90.0)  # across
    cell_m = cell_px * m_per_px
    out = []
    for r in range(rows):
        for c in range(columns):
            along = (c - (columns - 1) / 2.0) * cell_m
            across = (r - (rows - 1) / 2.0) * cell_m
            pos = unproject(cx + ax * along + px_ * across, cy + ay * along + py_ * across, origin)
            i = r * columns + c
            cell_style = replace(style, color_rgba=cell_colors[i]) if i < len(cell_colors) else style
            out.append(
                RenderPrimitive(
                    kind="rect",
                    layer=layer,
                    source_id=element.id,
                    ordinal=i,
                    style=cell_style,
                    anchor=pos,
                    along_px=cell_px,
                    across_px=cell_px,
                    rotation_deg=bearing,
                )
            )
    return out


def layout_node(
    node: NetworkNode,
    style: ResolvedStyle,
    chart: Mapping[str, Any] | None,
    values: Mapping[str, float] | None,
    alignment: str,
    layer: int,
) -> list[RenderPrimitive]:
    if chart is not None:
        return [
            RenderPrimitive(
                kind="chartAnchor",
                layer=layer,
                source_id=node.id,
                ordinal=0,
                style=style,
                anchor=node.position,
                orientation_deg=0.0,
                alignment=alignment,
                chart=chart,
                values=dict(values or {}),
            )
        ]
    return [
        RenderPrimitive(
            kind="circle",
            layer=layer,
            source_id=node.id,
            ordinal=0,
            style=style,
            anchor=node.position,
            radius_px=style.width_px,
        )
    ]


def layout_chart_anchor(
    element: StreetSegment | SubSegment,
    style: ResolvedStyle,
    chart: Mapping[str, Any],
    values: Mapping[str, float],
    alignment: str,
    orientation: str,
    layer: int,
) -> list[RenderPrimitive]:
    bearing = element.bearing_deg
    if orientation == "perpendicular":
        bearing = (bearing + 90.0) % 360.0
    return [
        RenderPrimitive(
            kind="chartAnchor",
            layer=layer,
            source_id=element.id,
            ordinal=0,
            style=style,
            anchor=element.midpoint,
            orientation_deg=bearing,
            alignment=alignment,
            chart=chart,
            values=dict(values),
        )
    ]


def layout_point(
    point_id: str,
    position: GeoPoint,
    style: ResolvedStyle,
    layer: int,
) -> list[RenderPrimitive]:
    return [
        RenderPrimitive(
            kind="circle",
            layer=layer,
            source_id=point_id,
            ordinal=0,
            style=style,
            anchor=position,
            radius_px=style.width_px,
        )
    ]


def _round_coord(p: GeoPoint) -> list[float]:
    return [round(p.lon, COORD_DECIMALS), round(p.lat, COORD_DECIMALS)]


def _round_px(v: float) -> float | int:
    r = round(float(v), PX_DECIMALS)
    return int(r) if r == int(r) else r


def _style_json(style: ResolvedStyle) -> dict:
    out = style.to_json()
    out["widthPx"] = _round_px(out["widthPx"])
    out["heightPx"] = _round_px(out["heightPx"])
    out["opacity"] = _round_px(out["opacity"])
    if out["dash"] is not None:
        out["dash"] = [_round_px(v) for v in out["dash"]]
    if out["squiggle"] is not None:
        out["squiggle"] = {k: _round_px(v) for k, v in out["squiggle"].items()}
    return out


def _primitive_json(prim: RenderPrimitive, z_order: int) -> dict:
    out: dict[str, Any] = {
        "kind": prim.kind,
        "layer": prim.layer,
        "sourceId": prim.source_id,
        "zOrder": z_order,
        "style": _style_json(prim.style),
    }
    if prim.coordinates is not None:
        out["coordinates"] = [_round_coord(p) for p in prim.coordinates]
    if prim.anchor is not None:
        out["anchor"] = _round_coord(prim.anchor)
    if prim.radius_px is not None:
        out["radiusPx"] = _round_px(prim.radius_px)
    if prim.along_px is not None:
        out["alongPx"] = _round_px(prim.along_px)
    if prim.across_px is not None:
        out["acrossPx"] = _round_px(prim.across_px)
    if prim.rotation_deg is not None:
        out["rotationDeg"] = _round_px(prim.rotation_deg % 360.0)
    if prim.orientation_deg is not None:
        out["orientationDeg"] = _round_px(prim.orientation_deg % 360.0)
    if prim.alignment is not None:
        out["alignment"] = prim.alignment
    if prim.chart is not None:
        out["chart"] = prim.chart
    if prim.values is not None:
        out["values"] = {k: prim.values[k] for k in sorted(prim.values)}
    return out


def emit_plan(
    primitives: Iterable[RenderPrimitive],
    streets: Mapping[str, StreetSegment],
    map_config: Mapping[str, Any],
    meta: Mapping[str, Any],
) -> str:
    """Canonical render-plan JSON: sorted keys, 7-decimal coordinates,
    z-order by (layer, sourceId, ordinal).  Byte-identical across runs."""
    ordered = sorted(primitives, key=RenderPrimitive.sort_key)
    prim_json = [_primitive_json(p, z) for z, p in enumerate(ordered)]
    streets_json = [
        {"id": seg.id, "coordinates": [_round_coord(p) for p in seg.polyline]}
        for seg in sorted(streets.values(), key=lambda s: s.id)
    ]

    lons: list[float] = []
    lats: list[float] = []
    for street in streets_json:
        for lon, lat in street["coordinates"]:
            lons.append(lon)
            lats.append(lat)
    for prim in prim_json:
        for lon, lat in prim.get("coordinates", []):
            lons.append(lon)
            lats.append(lat)
        if "anchor" in prim:
            lons.append(prim["anchor"][0])
            lats.append(prim["anchor"][1])
    if not lons:
        raise ValueError("cannot emit a plan with no geometry at all")
    bbox = [min(lons), min(lats), max(lons), max(lats)]

    plan = {
        "version": 1,
        "bbox": bbox,
        "map": dict(map_config),
        "streets": streets_json,
        "primitives": prim_json,
        "meta": dict(meta),
    }
    return json.dumps(plan, sort_keys=True, separators=(",", ":"), allow_nan=False)


def parse_plan(text: str) -> dict:
    return json.loads(text)
