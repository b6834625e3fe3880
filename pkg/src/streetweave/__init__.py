"""StreetWeave: a declarative grammar for street-overlaid visualizations.

Parse and validate specification documents, join thematic point data onto
street networks via spatial relations, resolve visual encodings, and emit
deterministic render plans and SVG.
"""

from .encoding import QueryRegion, ResolvedStyle, Scale, build_scale, resolve_style, zoom_filter
from .geo import (
    GeoError,
    GeoPoint,
    NetworkLoadError,
    StreetNetwork,
    StreetSegment,
    SubSegment,
    bearing_deg,
    build_network,
    haversine_m,
    load_network,
    project,
    resolve_density,
    subdivide,
    unproject,
)
from .geocode import GeocodeError, GeocodeResult, Geocoder
from .model import (
    Constant,
    DataSpec,
    Diagnostic,
    FieldRef,
    MapConfig,
    QuerySpec,
    RelationSpec,
    UnitSpec,
    VisualizationSpec,
    ZoomRange,
)
from .pipeline import DataError, RenderResult, SpecError, build_plan, render_spec_text
from .render import RenderPrimitive, emit_plan, meters_per_pixel, squiggle_path
from .spatial import (
    JoinedElement,
    SpatialIndex,
    aggregate,
    join,
    relate_buffer,
    relate_contains,
    relate_nn,
)
from .specparse import apply_defaults, bind_units, parse_spec, parse_spec_object, serialize_spec
from .svg import SvgError, emit_svg
from .thematic import ThematicError, ThematicLayer, ThematicPoint, load_thematic, parse_thematic

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Constant",
    "DataError",
    "DataSpec",
    "Diagnostic",
    "FieldRef",
    "GeoError",
    "GeoPoint",
    "GeocodeError",
    "GeocodeResult",
    "Geocoder",
    "JoinedElement",
    "MapConfig",
    "NetworkLoadError",
    "QueryRegion",
    "QuerySpec",
    "RelationSpec",
    "RenderPrimitive",
    "RenderResult",
    "ResolvedStyle",
    "Scale",
    "SpatialIndex",
    "SpecError",
    "StreetNetwork",
    "StreetSegment",
    "SubSegment",
    "SvgError",
    "ThematicError",
    "ThematicLayer",
    "ThematicPoint",
    "UnitSpec",
    "VisualizationSpec",
    "ZoomRange",
    "aggregate",
    "apply_defaults",
    "bearing_deg",
    "bind_units",
    "build_network",
    "build_plan",
    "build_scale",
    "emit_plan",
    "emit_svg",
    "haversine_m",
    "join",
    "load_network",
    "load_thematic",
    "meters_per_pixel",
    "parse_spec",
    "parse_spec_object",
    "parse_thematic",
    "project",
    "relate_buffer",
    "relate_contains",
    "relate_nn",
    "render_spec_text",
    "resolve_density",
    "resolve_style",
    "serialize_spec",
    "squiggle_path",
    "subdivide",
    "unproject",
    "zoom_filter",
]
