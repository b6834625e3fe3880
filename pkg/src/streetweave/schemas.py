"""Machine-readable schemas for specification documents and render plans.

The dicts here are the source of truth; the repo ships them serialized under
``schema/`` (see ``tests/test_schemas.py`` which keeps the two in sync).
"""

from __future__ import annotations

from typing import Any

_COLOR = {"type": "string", "minLength": 1}

_FIELD_BINDING = {
    "type": "object",
    "required": ["field"],
    "properties": {
        "field": {"type": "string", "minLength": 1},
        "range": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
        "base": _COLOR,
    },
}

def _channel(constant_schema: dict[str, Any]) -> dict[str, Any]:
    return {"oneOf": [constant_schema, _FIELD_BINDING]}


SPEC_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "https://urbantk.org/streetweave/streetweave.schema.json",
    "title": "StreetWeave specification",
    "type": "object",
    "required": ["map", "unit", "data"],
    "properties": {
        "map": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "streetColor": _COLOR,
                    "streetWidth": {"type": "number", "exclusiveMinimum": 0},
                    "background": {"enum": ["light", "dark"]},
                },
            },
        },
        "unit": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["type"],
                "properties": {
                    "type": {"enum": ["segment", "node", "point"]},
                    "method": {"enum": ["line", "rect", "matrix"]},
                    "density": _channel({"type": "integer", "minimum": 1}),
                    "opacity": _channel({"type": "number", "minimum": 0, "maximum": 1}),
                    "color": {
                        "oneOf": [
                            _COLOR,
                            _FIELD_BINDING,
                            {"type": "array", "items": _FIELD_BINDING, "minItems": 1},
                        ]
                    },
                    "width": _channel({"type": "number", "minimum": 0}),
                    "height": _channel({"type": "number", "minimum": 0}),
                    "dash": {
                        "oneOf": [
                            {"type": "boolean"},
                            {
                                "type": "array",
                                "items": {"type": "number", "exclusiveMinimum": 0},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                        ]
                    },
                    "squiggle": {
                        "oneOf": [
                            {"type": "boolean"},
                            {
                                "type": "object",
                                "properties": {
                                    "amplitude": {"type": "number", "exclusiveMinimum": 0},
                                    "wavelength": {"type": "number", "exclusiveMinimum": 0},
                                },
                            },
                        ]
                    },
                    "chart": {"type": "object"},
                    "rows": {"type": "integer", "minimum": 1},
                    "columns": {"type": "integer", "minimum": 1},
                    "orientation": {"enum": ["parallel", "perpendicular"]},
                    "alignment": {"enum": ["left", "center", "right"]},
                    "zoom": {
                        "type": "array",
                        "items": {"type": "integer", "minimum": 0, "maximum": 22},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                    "relation": {"$ref": "#/$defs/relation"},
                },
            },
        },
        "data": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "anyOf": [{"required": ["physical"]}, {"required": ["thematic"]}],
                "properties": {
                    "physical": {"type": "string", "minLength": 1},
                    "thematic": {
                        "type": "object",
                        "required": ["path"],
                        "properties": {
                            "path": {"type": "string", "minLength": 1},
                            "latColumn": {"type": "string", "minLength": 1},
                            "lonColumn": {"type": "string", "minLength": 1},
                        },
                    },
                },
            },
        },
        "relation": {"$ref": "#/$defs/relation"},
        "query": {
            "type": "object",
            "properties": {
                "address": {"type": "string", "minLength": 1},
                "radius": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
    "$defs": {
        "relation": {
            "type": "object",
            "required": ["spatial", "value", "aggregation"],
            "properties": {
                "spatial": {"enum": ["buffer", "nn", "contains"]},
                "value": {"type": "number", "exclusiveMinimum": 0},
                "aggregation": {"enum": ["sum", "mean", "min", "max"]},
            },
        }
    },
}

_STYLE_SCHEMA = {
    "type": "object",
    "required": ["color", "widthPx", "heightPx", "opacity", "dash", "squiggle"],
    "properties": {
        "color": {"type": "string", "pattern": "^#[0-9a-f]{8}$"},
        "widthPx": {"type": "number", "minimum": 0},
        "heightPx": {"type": "number", "minimum": 0},
        "opacity": {"type": "number", "minimum": 0, "maximum": 1},
        "dash": {
            "oneOf": [
                {"type": "null"},
                {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            ]
        },
        "squiggle": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["amplitudePx", "wavelengthPx"],
                    "properties": {
                        "amplitudePx": {"type": "number"},
                        "wavelengthPx": {"type": "number"},
                    },
                },
            ]
        },
    },
}

_LONLAT = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

RENDERPLAN_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "https://urbantk.org/streetweave/renderplan.schema.json",
    "title": "StreetWeave render plan",
    "description": "Deterministic list of styled geographic primitives. "
    "Coordinates are [lon, lat] rounded to 7 decimals; colors are #rrggbbaa.",
    "type": "object",
    "required": ["version", "bbox", "map", "streets", "primitives", "meta"],
    "properties": {
        "version": {"const": 1},
        "bbox": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 4,
            "maxItems": 4,
        },
        "map": {
            "type": "object",
            "required": ["streetColor", "streetWidth", "background"],
            "properties": {
                "streetColor": {"type": "string"},
                "streetWidth": {"type": "number"},
                "background": {"enum": ["light", "dark"]},
            },
        },
        "streets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "coordinates"],
                "properties": {
                    "id": {"type": "string"},
                    "coordinates": {"type": "array", "items": _LONLAT, "minItems": 2},
                },
            },
        },
        "primitives": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "layer", "sourceId", "zOrder", "style"],
                "properties": {
                    "kind": {"enum": ["polyline", "rect", "path", "circle", "chartAnchor"]},
                    "layer": {"type": "integer", "minimum": 0},
                    "sourceId": {"type": "string"},
                    "zOrder": {"type": "integer", "minimum": 0},
                    "style": _STYLE_SCHEMA,
                    "coordinates": {"type": "array", "items": _LONLAT, "minItems": 1},
                    "anchor": _LONLAT,
                    "radiusPx": {"type": "number", "minimum": 0},
                    "alongPx": {"type": "number", "minimum": 0},
                    "acrossPx": {"type": "number", "minimum": 0},
                    "rotationDeg": {"type": "number"},
                    "orientationDeg": {"type": "number"},
                    "alignment": {"enum": ["left", "center", "right"]},
                    "chart": {"type": "object"},
                    "values": {"type": "object"},
                },
                "allOf": [
                    {
                        "if": {"properties": {"kind": {"enum": ["polyline", "path"]}}},
                        "then": {"required": ["coordinates"]},
                    },
                    {
                        "if": {"properties": {"kind": {"const": "rect"}}},
                        "then": {"required": ["anchor", "alongPx", "acrossPx", "rotationDeg"]},
                    },
                    {
                        "if": {"properties": {"kind": {"const": "circle"}}},
                        "then": {"required": ["anchor", "radiusPx"]},
                    },
                    {
                        "if": {"properties": {"kind": {"const": "chartAnchor"}}},
                        "then": {"required": ["anchor", "orientationDeg", "alignment", "chart", "values"]},
                    },
                ],
            },
        },
        "meta": {
            "type": "object",
            "required": ["specHash", "unitBindings", "layers", "warnings", "nominalZoom"],
            "properties": {
                "specHash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
                "unitBindings": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["unit", "data", "relation"],
                        "properties": {
                            "unit": {"type": "integer", "minimum": 0},
                            "data": {"type": "integer", "minimum": 0},
                            "relation": {"type": "object"},
                        },
                    },
                },
                "layers": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["layer", "type", "method", "orientation", "alignment", "zoom"],
                        "properties": {
                            "layer": {"type": "integer", "minimum": 0},
                            "type": {"enum": ["segment", "node", "point"]},
                            "method": {"enum": ["line", "rect", "matrix"]},
                            "orientation": {"enum": ["parallel", "perpendicular"]},
                            "alignment": {"enum": ["left", "center", "right"]},
                            "zoom": {
                                "type": "array",
                                "items": {"type": "integer"},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                        },
                    },
                },
                "warnings": {"type": "array", "items": {"type": "string"}},
                "nominalZoom": {"type": "integer", "minimum": 0, "maximum": 22},
            },
        },
    },
}
