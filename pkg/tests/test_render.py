"""Layout geometry and plan-emission determinism."""

import json
import math
import random

import pytest

from streetweave.encoding import ResolvedStyle
from streetweave.geo import GeoPoint, NetworkNode, make_segment, project, subdivide
from streetweave.render import (
    RenderPrimitive,
    emit_plan,
    layout_matrix,
    layout_node,
    layout_parallel,
    layout_perpendicular,
    layout_point,
    meters_per_pixel,
    offset_polyline,
    squiggle_path,
)

from conftest import offset_point, straight_segment


STYLE = ResolvedStyle(
    color_rgba="#3182bdff", width_px=2.0, height_px=10.0, opacity=1.0, dash=None, squiggle=None
)


def mpp(origin):
    return meters_per_pixel(origin.lat, 16)


# ---------------------------------------------------------------------------
# parallel layout
# ---------------------------------------------------------------------------

def test_parallel_center_geometry_is_exact(origin):
    seg = straight_segment("s", origin, True, 100.0, n_vertices=4)
    prims = layout_parallel(seg, STYLE, "center", 1.5, origin, mpp(origin), "line", 0)
    assert len(prims) == 1
    assert prims[0].kind == "polyline"
    assert prims[0].coordinates == seg.polyline


def test_parallel_left_right_mirror(origin):
    """Reflect-and-compare oracle: the left offset reflected across the
    centerline must equal the right offset, in planar space."""
    rng = random.Random(11)
    for _ in range(10):
        pts = [origin]
        for _ in range(rng.randint(1, 4)):
            pts.append(offset_point(pts[-1], rng.uniform(20, 120), rng.uniform(-60, 60)))
        seg = make_segment("m", pts)
        left = layout_parallel(seg, STYLE, "left", 1.5, origin, mpp(origin), "line", 0)[0]
        right = layout_parallel(seg, STYLE, "right", 1.5, origin, mpp(origin), "line", 0)[0]
        for lp, rp, cp in zip(left.coordinates, right.coordinates, seg.polyline):
            lx, ly = project(lp, origin)
            rx, ry = project(rp, origin)
            cx, cy = project(cp, origin)
            # midpoint of (left, right) is the centerline vertex
            assert math.hypot((lx + rx) / 2 - cx, (ly + ry) / 2 - cy) < 1e-6
            # and both sit at the same distance from it
            assert abs(math.hypot(lx - cx, ly - cy) - math.hypot(rx - cx, ry - cy)) < 1e-9


def test_parallel_left_is_left_hand_side(origin):
    # traveling east, the left-hand side is north
    seg = straight_segment("s", origin, True, 100.0)
    left = layout_parallel(seg, STYLE, "left", 1.5, origin, mpp(origin), "line", 0)[0]
    assert all(p.lat > origin.lat for p in left.coordinates)


def test_parallel_offset_distance(origin):
    seg = straight_segment("s", origin, True, 100.0)
    base_w = 3.0
    m_per_px = mpp(origin)
    left = layout_parallel(seg, STYLE, "left", base_w, origin, m_per_px, "line", 0)[0]
    expected = (base_w / 2 + STYLE.width_px / 2 + 1.0) * m_per_px
    x, y = project(left.coordinates[0], origin)
    sx, sy = project(seg.polyline[0], origin)
    assert math.hypot(x - sx, y - sy) == pytest.approx(expected, rel=1e-9)


def test_parallel_rect_strip(origin):
    seg = straight_segment("s", origin, True, 100.0)
    m_per_px = mpp(origin)
    prims = layout_parallel(seg, STYLE, "center", 1.5, origin, m_per_px, "rect", 2)
    assert prims[0].kind == "rect"
    assert prims[0].along_px == pytest.approx(seg.length_m / m_per_px, rel=1e-9)
    assert prims[0].across_px == STYLE.width_px
    assert prims[0].rotation_deg == pytest.approx(90.0, abs=1e-9)


# ---------------------------------------------------------------------------
# perpendicular bristles
# ---------------------------------------------------------------------------

def test_bristles_at_arc_length_fractions(origin):
    seg = straight_segment("s", origin, True, 100.0)
    subs = subdivide(seg, 4)
    m_per_px = mpp(origin)
    prims = [layout_perpendicular(s, STYLE, "left", origin, m_per_px, 0)[0] for s in subs]
    assert len(prims) == 4
    for i, prim in enumerate(prims):
        base_x, _ = project(prim.coordinates[0], origin)
        frac = (2 * i + 1) / 8  # 1/8, 3/8, 5/8, 7/8
        assert base_x == pytest.approx(100.0 * frac, abs=1e-6)


def test_bristles_perpendicular_to_straight_segment(origin):
    seg = straight_segment("s", origin, True, 100.0)
    sub = subdivide(seg, 1)[0]
    prim = layout_perpendicular(sub, STYLE, "left", origin, mpp(origin), 0)[0]
    (ax, ay), (bx, by) = (project(p, origin) for p in prim.coordinates)
    sx0, sy0 = project(seg.polyline[0], origin)
    sx1, sy1 = project(seg.polyline[-1], origin)
    bristle = (bx - ax, by - ay)
    street = (sx1 - sx0, sy1 - sy0)
    dot = bristle[0] * street[0] + bristle[1] * street[1]
    assert abs(dot) / (math.hypot(*bristle) * math.hypot(*street)) < 1e-9


def test_bristle_length_and_sides(origin):
    seg = straight_segment("s", origin, True, 100.0)
    sub = subdivide(seg, 1)[0]
    m_per_px = mpp(origin)
    left = layout_perpendicular(sub, STYLE, "left", origin, m_per_px, 0)[0]
    right = layout_perpendicular(sub, STYLE, "right", origin, m_per_px, 0)[0]
    center = layout_perpendicular(sub, STYLE, "center", origin, m_per_px, 0)[0]

    def planar(prim):
        return [project(p, origin) for p in prim.coordinates]

    (lx0, ly0), (lx1, ly1) = planar(left)
    assert math.hypot(lx1 - lx0, ly1 - ly0) == pytest.approx(STYLE.height_px * m_per_px, rel=1e-9)
    (_, ry0), (_, ry1) = planar(right)
    # heading east: left alignment is bearing+90 (south side, y decreasing)
    assert ly1 < ly0
    assert ry1 > ry0
    (cx0, cy0), (cx1, cy1) = planar(center)
    mid_x, mid_y = project(sub.midpoint, origin)
    assert math.hypot((cx0 + cx1) / 2 - mid_x, (cy0 + cy1) / 2 - mid_y) < 1e-9


def test_dual_left_right_bristles_disjoint_sides(origin):
    seg = straight_segment("s", origin, True, 100.0)
    subs = subdivide(seg, 4)
    m_per_px = mpp(origin)
    mid_lat = origin.lat
    left_tips = [layout_perpendicular(s, STYLE, "left", origin, m_per_px, 0)[0].coordinates[1] for s in subs]
    right_tips = [layout_perpendicular(s, STYLE, "right", origin, m_per_px, 1)[0].coordinates[1] for s in subs]
    assert all(p.lat < mid_lat for p in left_tips)
    assert all(p.lat > mid_lat for p in right_tips)


# ---------------------------------------------------------------------------
# matrix
# ---------------------------------------------------------------------------

def test_matrix_1x1_is_single_rect_at_midpoint(origin):
    seg = straight_segment("s", origin, True, 100.0)
    prims = layout_matrix(seg, 1, 1, ["#112233ff"], STYLE, origin, mpp(origin), 0)
    assert len(prims) == 1
    assert prims[0].kind == "rect"
    mx, my = project(seg.midpoint, origin)
    ax, ay = project(prims[0].anchor, origin)
    assert math.hypot(ax - mx, ay - my) < 1e-9
    assert prims[0].style.color_rgba == "#112233ff"


def test_matrix_row_major_fill_with_surplus_default(origin):
    seg = straight_segment("s", origin, True, 100.0)
    colors = ["#100000ff", "#200000ff", "#300000ff"]
    prims = layout_matrix(seg, 2, 2, colors, STYLE, origin, mpp(origin), 0)
    assert [p.style.color_rgba for p in prims] == colors + [STYLE.color_rgba]
    assert [p.ordinal for p in prims] == [0, 1, 2, 3]


def test_matrix_grid_center_is_element_midpoint(origin):
    """Centroid-of-cells oracle over random segments."""
    rng = random.Random(3)
    for _ in range(10):
        pts = [offset_point(origin, rng.uniform(-200, 200), rng.uniform(-200, 200))]
        pts.append(offset_point(pts[-1], rng.uniform(30, 150), rng.uniform(-80, 80)))
        seg = make_segment("m", pts)
        rows, cols = rng.choice([(1, 3), (2, 2), (3, 2)])
        prims = layout_matrix(seg, rows, cols, [], STYLE, origin, mpp(origin), 0)
        xs, ys = zip(*(project(p.anchor, origin) for p in prims))
        cx, cy = sum(xs) / len(xs), sum(ys) / len(ys)
        mx, my = project(seg.midpoint, origin)
        assert math.hypot(cx - mx, cy - my) < 1e-6


def test_matrix_overflow_errors(origin):
    seg = straight_segment("s", origin, True, 100.0)
    with pytest.raises(ValueError, match="matrix overflow"):
        layout_matrix(seg, 1, 2, ["#1ff", "#2ff", "#3ff"], STYLE, origin, mpp(origin), 0)


# ---------------------------------------------------------------------------
# nodes and points
# ---------------------------------------------------------------------------

def test_node_without_chart_is_circle(origin):
    node = NetworkNode(id="n", position=origin, degree=3)
    prims = layout_node(node, STYLE, None, None, "center", 0)
    assert prims[0].kind == "circle"
    assert prims[0].radius_px == STYLE.width_px
    assert prims[0].anchor == origin


def test_node_with_chart_is_anchor_with_values(origin):
    node = NetworkNode(id="n", position=origin, degree=3)
    chart = {"mark": "bar"}
    prims = layout_node(node, STYLE, chart, {"severity": 3.5, "count": 4}, "center", 0)
    assert prims[0].kind == "chartAnchor"
    assert prims[0].chart == chart
    assert prims[0].values == {"severity": 3.5, "count": 4}


def test_identical_nodes_identical_primitives(origin):
    n1 = NetworkNode(id="a", position=origin, degree=2)
    n2 = NetworkNode(id="b", position=offset_point(origin, 100, 0), degree=2)
    p1 = layout_node(n1, STYLE, None, None, "center", 0)[0]
    p2 = layout_node(n2, STYLE, None, None, "center", 0)[0]
    assert p1.style == p2.style and p1.kind == p2.kind and p1.radius_px == p2.radius_px
    assert (p1.anchor, p1.source_id) != (p2.anchor, p2.source_id)


def test_point_circles_at_exact_coordinates(origin):
    positions = [origin, offset_point(origin, 10, 10), offset_point(origin, -5, 30)]
    prims = [layout_point(f"pt-{i}", p, STYLE, 0)[0] for i, p in enumerate(positions)]
    assert [p.anchor for p in prims] == positions
    assert all(p.kind == "circle" for p in prims)


# ---------------------------------------------------------------------------
# squiggle
# ---------------------------------------------------------------------------

def test_squiggle_zero_amplitude_identity(origin):
    seg = straight_segment("s", origin, True, 100.0)
    out = squiggle_path(seg.polyline, 0.0, 12.0, origin, mpp(origin))
    assert out == list(seg.polyline)


def test_squiggle_endpoints_fixed(origin):
    seg = straight_segment("s", origin, True, 100.0)
    out = squiggle_path(seg.polyline, 3.0, 12.0, origin, mpp(origin))
    assert out[0] == seg.polyline[0]
    assert out[-1] == seg.polyline[-1]


def test_squiggle_period_count(origin):
    # 120 px long segment, wavelength 12 px -> 10 full periods, sampled at
    # wavelength/8 -> 80 interior intervals.
    m_per_px = mpp(origin)
    seg = straight_segment("s", origin, True, 120.0 * m_per_px)
    out = squiggle_path(seg.polyline, 3.0, 12.0, origin, m_per_px)
    # each period contributes exactly one run of positive perpendicular
    # offsets (samples land on the zeros), so runs == periods
    offs = [project(p, origin)[1] for p in out]
    eps = 1e-9
    runs = sum(1 for a, b in zip(offs, offs[1:]) if a <= eps < b)
    assert runs == 10


def test_squiggle_max_deviation_equals_amplitude(origin):
    """Dense-sampling oracle: the extreme perpendicular offset must match the
    requested amplitude within 2%."""
    m_per_px = mpp(origin)
    seg = straight_segment("s", origin, True, 96.0 * m_per_px)
    amplitude_px = 5.0
    out = squiggle_path(seg.polyline, amplitude_px, 12.0, origin, m_per_px)
    max_dev = max(abs(project(p, origin)[1]) for p in out)
    assert max_dev == pytest.approx(amplitude_px * m_per_px, rel=0.02)


# ---------------------------------------------------------------------------
# plan emission
# ---------------------------------------------------------------------------

def _simple_network(origin):
    seg = straight_segment("seg-0", origin, True, 100.0)
    return {"seg-0": seg}, seg


def _meta():
    return {
        "specHash": "0" * 64,
        "unitBindings": [],
        "layers": [{"layer": 0, "type": "segment", "method": "line",
                   "orientation": "parallel", "alignment": "center", "zoom": [0, 22]}],
        "warnings": [],
        "nominalZoom": 16,
    }


MAP = {"streetColor": "#888888", "streetWidth": 1.5, "background": "light"}


def test_emit_plan_deterministic_and_order_independent(origin):
    streets, seg = _simple_network(origin)
    prims = []
    for i in range(5):
        sub = subdivide(seg, 5)[i]
        prims.extend(layout_perpendicular(sub, STYLE, "left", origin, mpp(origin), 0))
    a = emit_plan(prims, streets, MAP, _meta())
    b = emit_plan(list(reversed(prims)), streets, MAP, _meta())
    assert a == b
    assert emit_plan(prims, streets, MAP, _meta()) == a


def test_emit_plan_zorder_is_sorted_lexicographic(origin):
    streets, seg = _simple_network(origin)
    p1 = RenderPrimitive(kind="circle", layer=1, source_id="a", ordinal=0, style=STYLE, anchor=origin, radius_px=1)
    p2 = RenderPrimitive(kind="circle", layer=0, source_id="b", ordinal=1, style=STYLE, anchor=origin, radius_px=1)
    p3 = RenderPrimitive(kind="circle", layer=0, source_id="b", ordinal=0, style=STYLE, anchor=origin, radius_px=1)
    plan = json.loads(emit_plan([p1, p2, p3], streets, MAP, _meta()))
    got = [(p["layer"], p["sourceId"], p["zOrder"]) for p in plan["primitives"]]
    assert got == [(0, "b", 0), (0, "b", 1), (1, "a", 2)]


def test_emit_plan_bbox_contains_all_vertices(origin):
    streets, seg = _simple_network(origin)
    prims = layout_parallel(seg, STYLE, "left", 1.5, origin, mpp(origin), "line", 0)
    plan = json.loads(emit_plan(prims, streets, MAP, _meta()))
    min_lon, min_lat, max_lon, max_lat = plan["bbox"]
    for prim in plan["primitives"]:
        for lon, lat in prim.get("coordinates", []):
            assert min_lon <= lon <= max_lon
            assert min_lat <= lat <= max_lat
    for street in plan["streets"]:
        for lon, lat in street["coordinates"]:
            assert min_lon <= lon <= max_lon
            assert min_lat <= lat <= max_lat


def test_emit_plan_empty_primitives_ok(origin):
    streets, _ = _simple_network(origin)
    plan = json.loads(emit_plan([], streets, MAP, _meta()))
    assert plan["primitives"] == []
    assert len(plan["bbox"]) == 4


def test_emit_plan_round_trip(origin):
    streets, seg = _simple_network(origin)
    prims = layout_parallel(seg, STYLE, "center", 1.5, origin, mpp(origin), "line", 0)
    text = emit_plan(prims, streets, MAP, _meta())
    plan = json.loads(text)
    assert plan["primitives"][0]["kind"] == "polyline"
    assert plan["version"] == 1
    # re-serializing the parsed plan gives the same bytes
    assert json.dumps(plan, sort_keys=True, separators=(",", ":")) == text


def test_coordinates_rounded_to_seven_decimals(origin):
    streets, seg = _simple_network(origin)
    plan = json.loads(emit_plan([], streets, MAP, _meta()))
    for street in plan["streets"]:
        for lon, lat in street["coordinates"]:
            assert round(lon, 7) == lon
            assert round(lat, 7) == lat
