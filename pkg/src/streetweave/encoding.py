"""Visual channel resolution: scales, styles, zoom visibility, query styling."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .colors import Ramp, parse_color, to_hex_rgba
from .geo import GeoPoint, project
from .model import Constant, FieldRef, UnitSpec, ZoomRange
from .spatial import JoinedElement

# Channel defaults used when a channel is unbound or an aggregate is missing.
DEFAULT_COLOR = "#3182bd"
DEFAULT_WIDTH_PX = 1.5
DEFAULT_HEIGHT_PX = 8.0
DEFAULT_OPACITY = 1.0
DEFAULT_DASH_PATTERN = (6.0, 4.0)
DEFAULT_SQUIGGLE = (3.0, 12.0)  # (amplitude px, wavelength px)
DEFAULT_WIDTH_RANGE = (1.0, 12.0)
DEFAULT_HEIGHT_RANGE = (4.0, 40.0)
DEFAULT_OPACITY_RANGE = (0.2, 1.0)
DEFAULT_QUERY_WIDTH_MULTIPLIER = 2.0

_CHANNEL_RANGES = {
    "width": DEFAULT_WIDTH_RANGE,
    "height": DEFAULT_HEIGHT_RANGE,
    "opacity": DEFAULT_OPACITY_RANGE,
    "color": (0.0, 1.0),
}


class ScaleError(ValueError):
    pass


@dataclass(frozen=True)
class Scale:
    """Linear domain -> range map; clamps, and sends degenerate domains to
    the range midpoint."""

    domain: tuple[float, float]
    range: tuple[float, float]

    def __call__(self, value: float) -> float:
        lo, hi = self.range
        dmin, dmax = self.domain
        if dmin == dmax:
            return (lo + hi) / 2.0
        t = (value - dmin) / (dmax - dmin)
        t = min(max(t, 0.0), 1.0)
        return lo + t * (hi - lo)


def build_scale(
    field: str,
    elements: Sequence[JoinedElement],
    range_: tuple[float, float],
) -> Scale:
    values = [e.aggregates[field] for e in elements if field in e.aggregates]
    if not values:
        raise ScaleError(f"field {field!r} has no data")
    return Scale(domain=(min(values), max(values)), range=tuple(range_))


def build_scale_from_values(field: str, values: Sequence[float], range_: tuple[float, float]) -> Scale:
    finite = [float(v) for v in values if isinstance(v, (int, float)) and math.isfinite(float(v))]
    if not finite:
        raise ScaleError(f"field {field!r} has no data")
    return Scale(domain=(min(finite), max(finite)), range=tuple(range_))


@dataclass(frozen=True)
class ResolvedStyle:
    color_rgba: str  # "#rrggbbaa"
    width_px: float
    height_px: float
    opacity: float
    dash: tuple[float, float] | None
    squiggle: tuple[float, float] | None  # (amplitude px, wavelength px)

    def to_json(self) -> dict:
        return {
            "color": self.color_rgba,
            "widthPx": self.width_px,
            "heightPx": self.height_px,
            "opacity": self.opacity,
            "dash": list(self.dash) if self.dash else None,
            "squiggle": {"amplitudePx": self.squiggle[0], "wavelengthPx": self.squiggle[1]}
            if self.squiggle
            else None,
        }


@dataclass(frozen=True)
class QueryRegion:
    center: GeoPoint
    radius_m: float
    width_multiplier: float = DEFAULT_QUERY_WIDTH_MULTIPLIER

    def __post_init__(self) -> None:
        if self.radius_m <= 0:
            raise ValueError(f"query radius must be > 0, got {self.radius_m}")
        if self.width_multiplier <= 0:
            raise ValueError(f"width multiplier must be > 0, got {self.width_multiplier}")


def channel_range(channel: str, binding: FieldRef) -> tuple[float, float]:
    if binding.range is not None:
        return binding.range
    return _CHANNEL_RANGES.get(channel, (0.0, 1.0))


def _dash_value(binding) -> tuple[float, float] | None:
    if binding is None:
        return None
    value = binding.value if isinstance(binding, Constant) else binding
    if value is True:
        return DEFAULT_DASH_PATTERN
    if value in (False, None):
        return None
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return (float(value[0]), float(value[1]))
    raise ValueError(f"unsupported dash value {value!r}")


def _squiggle_value(binding) -> tuple[float, float] | None:
    if binding is None:
        return None
    value = binding.value if isinstance(binding, Constant) else binding
    if value is True:
        return DEFAULT_SQUIGGLE
    if value in (False, None):
        return None
    if isinstance(value, Mapping):
        return (
            float(value.get("amplitude", DEFAULT_SQUIGGLE[0])),
            float(value.get("wavelength", DEFAULT_SQUIGGLE[1])),
        )
    raise ValueError(f"unsupported squiggle value {value!r}")


def _numeric_channel(binding, aggregates: Mapping[str, float], scales: Mapping[str, Scale], default: float) -> float:
    if binding is None:
        return default
    if isinstance(binding, Constant):
        return float(binding.value)
    if isinstance(binding, FieldRef):
        value = aggregates.get(binding.field)
        if value is None:
            return default
        return float(scales[binding.field](value))
    raise ValueError(f"unsupported channel binding {binding!r}")


def resolve_style(
    unit: UnitSpec,
    aggregates: Mapping[str, float],
    scales: Mapping[str, Scale],
    ramps: Mapping[str, Ramp] | None = None,
) -> ResolvedStyle:
    """Concrete style for one element.

    Constants pass through; field bindings go through their scale (built over
    the unit's elements); color fields run the scale's [0, 1] output through
    the unit's ramp; missing aggregates fall back to channel defaults.
    """
    ramps = ramps or {}
    color_binding = unit.color
    if isinstance(color_binding, tuple):
        # Matrix cell colors are resolved per cell by the layout stage.
        color_binding = None
    if color_binding is None:
        color = to_hex_rgba(parse_color(DEFAULT_COLOR))
    elif isinstance(color_binding, Constant):
        color = to_hex_rgba(parse_color(color_binding.value))
    elif isinstance(color_binding, FieldRef):
        value = aggregates.get(color_binding.field)
        if value is None:
            color = to_hex_rgba(parse_color(DEFAULT_COLOR))
        else:
            t = scales[color_binding.field](value)
            color = ramps[color_binding.field](t)
    else:
        raise ValueError(f"unsupported color binding {color_binding!r}")

    return ResolvedStyle(
        color_rgba=color,
        width_px=_numeric_channel(unit.width, aggregates, scales, DEFAULT_WIDTH_PX),
        height_px=_numeric_channel(unit.height, aggregates, scales, DEFAULT_HEIGHT_PX),
        opacity=_numeric_channel(unit.opacity, aggregates, scales, DEFAULT_OPACITY),
        dash=_dash_value(unit.dash),
        squiggle=_squiggle_value(unit.squiggle),
    )


def zoom_filter(units: Sequence[UnitSpec], current_zoom: int) -> list[UnitSpec]:
    """Units visible at the given zoom level (bounds inclusive)."""
    out = []
    for unit in units:
        zr = unit.zoom if unit.zoom is not None else ZoomRange(0, 22)
        if zr.contains(current_zoom):
            out.append(unit)
    return out


def apply_query(
    styled: Sequence[tuple[GeoPoint, ResolvedStyle]],
    region: QueryRegion | None,
    origin: GeoPoint,
) -> list[ResolvedStyle]:
    """Multiply width for elements whose midpoint falls inside the region.

    Styles outside the region are returned unchanged (the same objects); with
    no region the output styles are exactly the input styles.
    """
    if region is None:
        return [style for _, style in styled]
    cx, cy = project(region.center, origin)
    out = []
    for anchor, style in styled:
        x, y = project(anchor, origin)
        if math.hypot(x - cx, y - cy) <= region.radius_m:
            out.append(replace(style, width_px=style.width_px * region.width_multiplier))
        else:
            out.append(style)
    return out


def field_domain(elements: Iterable[JoinedElement], field: str) -> tuple[float, float] | None:
    values = [e.aggregates[field] for e in elements if field in e.aggregates]
    if not values:
        return None
    return (min(values), max(values))
