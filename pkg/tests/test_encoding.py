import dataclasses

import pytest
from hypothesis import given, strategies as st

from streetweave.colors import Ramp, lightness, parse_color, to_hex_rgba
from streetweave.encoding import (
    DEFAULT_WIDTH_PX,
    QueryRegion,
    Scale,
    ScaleError,
    apply_query,
    build_scale,
    resolve_style,
    zoom_filter,
)
from streetweave.geo import GeoPoint
from streetweave.model import Constant, FieldRef, UnitSpec, ZoomRange
from streetweave.spatial import JoinedElement

from conftest import offset_point


def joined(eid, **aggs):
    return JoinedElement(element_id=eid, matched_point_ids=(), aggregates=aggs, count=len(aggs))


# ---------------------------------------------------------------------------
# scales
# ---------------------------------------------------------------------------

def test_scale_linear_midpoint():
    scale = build_scale("v", [joined("a", v=1), joined("b", v=3), joined("c", v=5)], (1, 12))
    assert scale(3) == pytest.approx(6.5)
    assert scale(1) == 1.0
    assert scale(5) == 12.0


def test_scale_degenerate_domain_maps_to_midpoint():
    scale = build_scale("v", [joined(c, v=4) for c in "abc"], (1, 12))
    for value in (4, 0, 100):
        assert scale(value) == pytest.approx(6.5)


def test_scale_clamps_out_of_domain():
    scale = Scale(domain=(0, 10), range=(0, 1))
    assert scale(-5) == 0.0
    assert scale(25) == 1.0


def test_scale_all_missing_errors():
    with pytest.raises(ScaleError, match="no data"):
        build_scale("v", [JoinedElement("a", (), {}, 0)], (0, 1))


@given(st.floats(0, 1))
def test_scale_linearity(a):
    dmin, dmax, lo, hi = 2.0, 10.0, 1.0, 13.0
    scale = Scale(domain=(dmin, dmax), range=(lo, hi))
    x = a * dmin + (1 - a) * dmax
    assert scale(x) == pytest.approx(a * lo + (1 - a) * hi, abs=1e-9)


def test_scale_rank_preservation():
    scale = Scale(domain=(0, 9), range=(1, 12))
    values = [3, 1, 7, 7, 0, 9]
    widths = [scale(v) for v in values]
    assert sorted(range(len(values)), key=lambda i: values[i]) == sorted(
        range(len(values)), key=lambda i: (widths[i], values[i])
    )


# ---------------------------------------------------------------------------
# style resolution
# ---------------------------------------------------------------------------

def test_constant_passthrough():
    unit = UnitSpec(type="segment", color=Constant("#7b3294"), width=Constant(3.0), opacity=Constant(0.8))
    style = resolve_style(unit, {}, {})
    assert style.color_rgba == "#7b3294ff"
    assert style.width_px == 3.0
    assert style.opacity == 0.8


def test_width_field_goes_through_scale():
    unit = UnitSpec(type="segment", width=FieldRef("sev"))
    scale = Scale(domain=(0, 10), range=(1, 12))
    style = resolve_style(unit, {"sev": 10.0}, {"sev": scale})
    assert style.width_px == 12.0


def test_missing_aggregate_uses_default():
    unit = UnitSpec(type="segment", width=FieldRef("sev"))
    scale = Scale(domain=(0, 10), range=(1, 12))
    style = resolve_style(unit, {}, {"sev": scale})
    assert style.width_px == DEFAULT_WIDTH_PX


def test_color_ramp_orders_by_lightness():
    unit = UnitSpec(type="segment", color=FieldRef("sev", base="#2a9d4e"))
    scale = Scale(domain=(0, 10), range=(0, 1))
    ramp = {"sev": Ramp("#2a9d4e")}
    low = resolve_style(unit, {"sev": 0.0}, {"sev": scale}, ramp).color_rgba
    mid = resolve_style(unit, {"sev": 5.0}, {"sev": scale}, ramp).color_rgba
    high = resolve_style(unit, {"sev": 10.0}, {"sev": scale}, ramp).color_rgba
    assert lightness(low[:7]) > lightness(mid[:7]) > lightness(high[:7])


def test_dash_and_squiggle_defaults():
    unit = UnitSpec(type="segment", dash=Constant(True), squiggle=Constant(True))
    style = resolve_style(unit, {}, {})
    assert style.dash == (6.0, 4.0)
    assert style.squiggle == (3.0, 12.0)
    unit2 = UnitSpec(type="segment", dash=Constant((2.0, 8.0)), squiggle=Constant({"amplitude": 5, "wavelength": 20}))
    style2 = resolve_style(unit2, {}, {})
    assert style2.dash == (2.0, 8.0)
    assert style2.squiggle == (5.0, 20.0)


def test_color_parsing_variants():
    assert to_hex_rgba(parse_color("#abc")) == "#aabbccff"
    assert to_hex_rgba(parse_color("steelblue")) == "#4682b4ff"
    assert to_hex_rgba(parse_color("#11223344")) == "#11223344"


# ---------------------------------------------------------------------------
# zoom visibility
# ---------------------------------------------------------------------------

def unit_with_zoom(lo, hi):
    return UnitSpec(type="segment", zoom=ZoomRange(lo, hi))


def test_zoom_inclusive_bounds():
    u = unit_with_zoom(12, 16)
    assert zoom_filter([u], 12) == [u]
    assert zoom_filter([u], 16) == [u]
    assert zoom_filter([u], 17) == []
    assert zoom_filter([u], 11) == []


def test_zoom_default_visible_everywhere():
    u = unit_with_zoom(0, 22)
    for z in range(0, 23):
        assert zoom_filter([u], z) == [u]


def test_zoom_toggle_restores_set():
    units = [unit_with_zoom(0, 10), unit_with_zoom(5, 22), unit_with_zoom(12, 14)]
    before = zoom_filter(units, 8)
    zoom_filter(units, 13)
    assert zoom_filter(units, 8) == before


# ---------------------------------------------------------------------------
# query region
# ---------------------------------------------------------------------------

def _styles(origin, distances_m):
    style = resolve_style(UnitSpec(type="segment", width=Constant(2.0)), {}, {})
    return [(offset_point(origin, d, 0), style) for d in distances_m]


def test_query_doubles_width_inside(origin):
    styled = _styles(origin, [50.0])
    region = QueryRegion(center=origin, radius_m=100.0, width_multiplier=2.0)
    out = apply_query(styled, region, origin)
    assert out[0].width_px == 4.0


def test_query_leaves_outside_unchanged(origin):
    styled = _styles(origin, [150.0])
    region = QueryRegion(center=origin, radius_m=100.0)
    out = apply_query(styled, region, origin)
    assert out[0] is styled[0][1]


def test_query_absent_is_identity(origin):
    styled = _styles(origin, [10.0, 500.0])
    out = apply_query(styled, None, origin)
    assert out == [s for _, s in styled]


def test_query_touches_only_width(origin):
    styled = _styles(origin, [10.0])
    region = QueryRegion(center=origin, radius_m=100.0)
    out = apply_query(styled, region, origin)
    before = dataclasses.asdict(styled[0][1])
    after = dataclasses.asdict(out[0])
    changed = {k for k in before if before[k] != after[k]}
    assert changed == {"width_px"}


def test_query_region_validation():
    with pytest.raises(ValueError):
        QueryRegion(center=GeoPoint(0, 0), radius_m=0)
    with pytest.raises(ValueError):
        QueryRegion(center=GeoPoint(0, 0), radius_m=10, width_multiplier=0)
