"""Standalone SVG emission from a render plan.

Output is SVG 1.1, UTF-8, no external references.  One top-level group per
visible unit layer, preceded by the base street group; chart anchors become
placeholder rects whose data attributes carry the embedded chart document.
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping
from xml.sax.saxutils import quoteattr

from .geo import EARTH_RADIUS_M
from .render import CHART_ANCHOR_PX, DEFAULT_NOMINAL_ZOOM

DEFAULT_VIEWPORT = {"widthPx": 960, "heightPx": 720}
_MARGIN_PX = 10.0
_BACKGROUND = {"light": "#ffffff", "dark": "#1a1a1a"}


class SvgError(ValueError):
    pass


def _split_rgba(color: str) -> tuple[str, float]:
    """'#rrggbbaa' -> ('#rrggbb', alpha in [0, 1])."""
    if len(color) == 9 and color.startswith("#"):
        return color[:7], int(color[7:9], 16) / 255.0
    return color, 1.0


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _fmt_px(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return s if s else "0"


class _Transform:
    """Fit the plan bbox into the viewport, preserving aspect ratio."""

    def __init__(self, bbox: list[float], width: float, height: float):
        min_lon, min_lat, max_lon, max_lat = bbox
        self.lat0 = (min_lat + max_lat) / 2.0
        self.lon0 = (min_lon + max_lon) / 2.0
        self.k = math.cos(math.radians(self.lat0))
        span_x = self._x(max_lon) - self._x(min_lon)
        span_y = self._y(max_lat) - self._y(min_lat)
        usable_w = max(width - 2 * _MARGIN_PX, 1.0)
        usable_h = max(height - 2 * _MARGIN_PX, 1.0)
        if span_x <= 0 and span_y <= 0:
            self.scale = 1.0
        else:
            candidates = []
            if span_x > 0:
                candidates.append(usable_w / span_x)
            if span_y > 0:
                candidates.append(usable_h / span_y)
            self.scale = min(candidates)
        self.cx = width / 2.0
        self.cy = height / 2.0

    def _x(self, lon: float) -> float:
        return EARTH_RADIUS_M * math.radians(lon - self.lon0) * self.k

    def _y(self, lat: float) -> float:
        return EARTH_RADIUS_M * math.radians(lat - self.lat0)

    def screen(self, lon: float, lat: float) -> tuple[float, float]:
        return (self.cx + self._x(lon) * self.scale, self.cy - self._y(lat) * self.scale)


def _stroke_attrs(style: Mapping[str, Any]) -> str:
    rgb, alpha = _split_rgba(style["color"])
    parts = [
        f'stroke="{rgb}"',
        f'stroke-width="{_fmt_px(style["widthPx"])}"',
        f'stroke-opacity="{_fmt_px(alpha * style["opacity"])}"',
        'fill="none"',
    ]
    if style.get("dash"):
        on, off = style["dash"]
        parts.append(f'stroke-dasharray="{_fmt_px(on)} {_fmt_px(off)}"')
    return " ".join(parts)


def _fill_attrs(style: Mapping[str, Any]) -> str:
    rgb, alpha = _split_rgba(style["color"])
    return f'fill="{rgb}" fill-opacity="{_fmt_px(alpha * style["opacity"])}"'


def _points_attr(coords: list[list[float]], tf: _Transform) -> str:
    return " ".join("{},{}".format(_fmt(x), _fmt(y)) for x, y in (tf.screen(lon, lat) for lon, lat in coords))


def _path_d(coords: list[list[float]], tf: _Transform) -> str:
    parts = []
    for i, (lon, lat) in enumerate(coords):
        x, y = tf.screen(lon, lat)
        parts.append(f"{'M' if i == 0 else 'L'}{_fmt(x)} {_fmt(y)}")
    return " ".join(parts)


def _primitive_svg(prim: Mapping[str, Any], tf: _Transform) -> str:
    kind = prim["kind"]
    style = prim["style"]
    if kind == "polyline":
        return f'<polyline points="{_points_attr(prim["coordinates"], tf)}" {_stroke_attrs(style)}/>'
    if kind == "path":
        return f'<path d="{_path_d(prim["coordinates"], tf)}" {_stroke_attrs(style)}/>'
    if kind == "circle":
        x, y = tf.screen(*prim["anchor"])
        return f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt_px(prim["radiusPx"])}" {_fill_attrs(style)}/>'
    if kind == "rect":
        x, y = tf.screen(*prim["anchor"])
        w, h = prim["alongPx"], prim["acrossPx"]
        rot = (prim["rotationDeg"] - 90.0) % 360.0
        return (
            f'<rect x="{_fmt(x - w / 2)}" y="{_fmt(y - h / 2)}" '
            f'width="{_fmt_px(w)}" height="{_fmt_px(h)}" '
            f'transform="rotate({_fmt(rot)} {_fmt(x)} {_fmt(y)})" {_fill_attrs(style)}/>'
        )
    if kind == "chartAnchor":
        x, y = tf.screen(*prim["anchor"])
        s = CHART_ANCHOR_PX
        chart = quoteattr(json.dumps(prim["chart"], sort_keys=True, separators=(",", ":")))
        values = quoteattr(json.dumps(prim["values"], sort_keys=True, separators=(",", ":")))
        return (
            f'<rect class="chart-anchor" x="{_fmt(x - s / 2)}" y="{_fmt(y - s / 2)}" '
            f'width="{_fmt_px(s)}" height="{_fmt_px(s)}" '
            f'data-orientation="{_fmt(prim["orientationDeg"])}" data-alignment="{prim["alignment"]}" '
            f"data-chart={chart} data-values={values} "
            f'fill="#ffffff" fill-opacity="0.85" stroke="#555555" stroke-width="1"/>'
        )
    raise SvgError(f"unknown primitive kind {kind!r}")


def emit_svg(
    plan: Mapping[str, Any],
    viewport: Mapping[str, Any] | None = None,
    zoom: int | None = None,
) -> str:
    """Render a plan to a standalone SVG document.

    Layers whose zoom range excludes ``zoom`` (default: the plan's nominal
    zoom) are omitted; base streets always draw first.
    """
    vp = dict(DEFAULT_VIEWPORT)
    if viewport:
        vp.update({k: v for k, v in viewport.items() if v is not None})
    width, height = float(vp["widthPx"]), float(vp["heightPx"])
    if width <= 0 or height <= 0:
        raise SvgError(f"viewport must be positive, got {width} x {height}")
    bbox = vp.get("bbox") or plan["bbox"]
    tf = _Transform(list(bbox), width, height)

    meta = plan["meta"]
    if zoom is None:
        zoom = int(meta.get("nominalZoom", DEFAULT_NOMINAL_ZOOM))
    visible = {
        layer["layer"]
        for layer in meta["layers"]
        if layer["zoom"][0] <= zoom <= layer["zoom"][1]
    }

    map_config = plan["map"]
    background = _BACKGROUND.get(map_config.get("background", "light"), "#ffffff")

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt_px(width)}" height="{_fmt_px(height)}" '
        f'viewBox="0 0 {_fmt_px(width)} {_fmt_px(height)}">',
        f'<rect id="background" width="{_fmt_px(width)}" height="{_fmt_px(height)}" fill="{background}"/>',
        f'<g id="streets" fill="none" stroke="{map_config["streetColor"]}" '
        f'stroke-width="{_fmt_px(map_config["streetWidth"])}" stroke-linecap="round">',
    ]
    for street in plan["streets"]:
        lines.append(f'<polyline points="{_points_attr(street["coordinates"], tf)}"/>')
    lines.append("</g>")

    by_layer: dict[int, list[Mapping[str, Any]]] = {}
    for prim in plan["primitives"]:
        by_layer.setdefault(prim["layer"], []).append(prim)
    for layer_index in sorted(by_layer):
        if layer_index not in visible:
            continue
        layer_meta = next((l for l in meta["layers"] if l["layer"] == layer_index), None)
        zoom_attr = ""
        if layer_meta:
            zoom_attr = f' data-zoom-min="{layer_meta["zoom"][0]}" data-zoom-max="{layer_meta["zoom"][1]}"'
        lines.append(f'<g id="layer-{layer_index}"{zoom_attr}>')
        for prim in by_layer[layer_index]:  # already in zOrder
            lines.append(_primitive_svg(prim, tf))
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
