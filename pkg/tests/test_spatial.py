"""Spatial relation tests: every relation is checked against a brute-force
oracle written from scratch (per-point math, no shared code with the
implementation)."""

import math
import random

import pytest
from hypothesis import given, strategies as st

from streetweave.geo import GeoPoint, haversine_m, make_segment, project
from streetweave.model import RelationSpec
from streetweave.spatial import (
    SpatialIndex,
    aggregate,
    join,
    relate_buffer,
    relate_contains,
    relate_nn,
)
from streetweave.thematic import ThematicLayer, ThematicPoint

from conftest import offset_point, straight_segment


def make_layer(points_xy, origin, values=None, column="v"):
    """Layer from planar (x, y) meter offsets about origin."""
    pts = []
    for i, (x, y) in enumerate(points_xy):
        p = offset_point(origin, x, y)
        value = values[i] if values is not None else float(i)
        pts.append(ThematicPoint(id=i, position=p, attributes={column: value}))
    return ThematicLayer(
        points=tuple(pts),
        numeric_columns=frozenset({column}),
        source_path="<test>",
        columns=(column,),
    )


# ---------------------------------------------------------------------------
# Brute-force oracles (independent implementations)
# ---------------------------------------------------------------------------

def oracle_buffer_planar(anchor, layer, radius, origin):
    ax, ay = project(anchor, origin)
    out = []
    for p in layer.points:
        px, py = project(p.position, origin)
        if math.hypot(px - ax, py - ay) <= radius:
            out.append(p.id)
    return sorted(out)


def oracle_buffer_haversine(anchor, layer, radius):
    return sorted(p.id for p in layer.points if haversine_m(anchor, p.position) <= radius)


def _oracle_point_to_segment(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    if ll == 0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / ll
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def oracle_nn(element_polyline, layer, k, origin):
    poly = [project(p, origin) for p in element_polyline]
    scored = []
    for p in layer.points:
        px, py = project(p.position, origin)
        d = min(
            _oracle_point_to_segment(px, py, poly[i][0], poly[i][1], poly[i + 1][0], poly[i + 1][1])
            for i in range(len(poly) - 1)
        )
        scored.append((d, p.id))
    scored.sort()
    return [pid for _, pid in scored[:k]]


def oracle_contains(element_polyline, layer, half_width, origin):
    """Per-edge rectangle membership, tested in each edge's local frame."""
    poly = [project(p, origin) for p in element_polyline]
    out = []
    for p in layer.points:
        px, py = project(p.position, origin)
        inside = False
        for (ax, ay), (bx, by) in zip(poly, poly[1:]):
            ex, ey = bx - ax, by - ay
            length = math.hypot(ex, ey)
            if length == 0:
                continue
            ux, uy = ex / length, ey / length
            along = (px - ax) * ux + (py - ay) * uy
            across = abs(-(px - ax) * uy + (py - ay) * ux)
            if 0.0 <= along <= length and across <= half_width:
                inside = True
                break
        if inside:
            out.append(p.id)
    return sorted(out)


# ---------------------------------------------------------------------------
# buffer
# ---------------------------------------------------------------------------

def test_buffer_includes_point_inside(origin):
    seg = straight_segment("s", origin, True, 100.0)
    layer = make_layer([(50, 5)], origin)  # 5 m north of the midpoint
    index = SpatialIndex(layer, origin)
    assert relate_buffer(seg, index, 10.0) == [0]


def test_buffer_excludes_point_outside(origin):
    seg = straight_segment("s", origin, True, 100.0)
    layer = make_layer([(50, 15)], origin)
    index = SpatialIndex(layer, origin)
    assert relate_buffer(seg, index, 10.0) == []


def test_buffer_boundary_inclusive(origin):
    seg = straight_segment("s", origin, True, 100.0)
    index_origin = origin
    layer = make_layer([(60.0, 0.0)], origin)  # exactly 10 m east of midpoint
    index = SpatialIndex(layer, index_origin)
    mx, my = project(seg.midpoint, origin)
    px, py = index.xy[0]
    d = math.hypot(px - mx, py - my)
    assert relate_buffer(seg, index, d) == [0]


def test_buffer_matches_haversine_oracle(origin):
    rng = random.Random(2024)
    pts = [(rng.uniform(-100, 100), rng.uniform(-100, 100)) for _ in range(200)]
    layer = make_layer(pts, origin)
    seg = straight_segment("s", origin, True, 60.0)
    index = SpatialIndex(layer, origin)
    got = relate_buffer(seg, index, 25.0)
    assert got == oracle_buffer_haversine(seg.midpoint, layer, 25.0)


def test_buffer_node_anchor(origin, plus_network):
    center = next(n for n in plus_network.nodes.values() if n.degree == 4)
    layer = make_layer([(3, 4), (30, 40)], origin)
    index = SpatialIndex(layer, origin)
    assert relate_buffer(center, index, 6.0) == [0]


def test_buffer_monotone_in_radius(origin):
    rng = random.Random(5)
    pts = [(rng.uniform(-80, 80), rng.uniform(-80, 80)) for _ in range(300)]
    layer = make_layer(pts, origin)
    seg = straight_segment("s", origin, True, 40.0)
    index = SpatialIndex(layer, origin)
    for r1, r2 in [(5, 10), (10, 25), (25, 60)]:
        assert set(relate_buffer(seg, index, r1)) <= set(relate_buffer(seg, index, r2))


# ---------------------------------------------------------------------------
# nn
# ---------------------------------------------------------------------------

def test_nn_returns_all_when_k_exceeds_points(origin):
    layer = make_layer([(i * 10, 0) for i in range(10)], origin)
    seg = straight_segment("s", origin, True, 20.0)
    index = SpatialIndex(layer, origin)
    # k = 50 is the reference configuration; with only 10 points all return.
    got = relate_nn(seg, index, 50)
    assert len(got) == 10
    assert sorted(got) == list(range(10))


def test_nn_matches_sorted_distance_oracle(origin):
    rng = random.Random(77)
    pts = [(rng.uniform(-200, 200), rng.uniform(-200, 200)) for _ in range(500)]
    layer = make_layer(pts, origin)
    bendy = make_segment(
        "b",
        [origin, offset_point(origin, 50, 20), offset_point(origin, 90, -30)],
    )
    index = SpatialIndex(layer, origin)
    got = relate_nn(bendy, index, 7)
    assert got == oracle_nn(list(bendy.polyline), layer, 7, origin)


def test_nn_prefix_property(origin):
    rng = random.Random(31)
    pts = [(rng.uniform(-100, 100), rng.uniform(-100, 100)) for _ in range(120)]
    layer = make_layer(pts, origin)
    seg = straight_segment("s", origin, False, 70.0)
    index = SpatialIndex(layer, origin)
    for k1, k2 in [(1, 3), (3, 10), (10, 50)]:
        assert relate_nn(seg, index, k2)[:k1] == relate_nn(seg, index, k1)


def test_nn_tie_break_by_id(origin):
    # two points exactly mirrored about the node -> equal distance, lower id first
    layer = make_layer([(0, 10), (0, -10), (0, 50)], origin)
    node_layer_origin = origin
    from streetweave.geo import NetworkNode

    node = NetworkNode(id="n", position=origin, degree=1)
    index = SpatialIndex(layer, node_layer_origin)
    assert relate_nn(node, index, 2) == [0, 1]


def test_nn_uses_polyline_distance_not_midpoint(origin):
    # point near the segment end is closer to the polyline than one near
    # the midpoint-but-faraway perpendicular
    seg = straight_segment("s", origin, True, 100.0)
    layer = make_layer([(100, 2), (50, 30)], origin)
    index = SpatialIndex(layer, origin)
    assert relate_nn(seg, index, 1) == [0]


# ---------------------------------------------------------------------------
# contains
# ---------------------------------------------------------------------------

def test_contains_point_inside_corridor(origin):
    seg = straight_segment("s", origin, True, 100.0)
    layer = make_layer([(50, 3)], origin)  # 3 m north of midpoint
    index = SpatialIndex(layer, origin)
    assert relate_contains(seg, index, 5.0) == [0]


def test_contains_excludes_beyond_extent(origin):
    seg = straight_segment("s", origin, True, 100.0)
    layer = make_layer([(103, 0)], origin)  # 3 m past the east endpoint, on axis
    index = SpatialIndex(layer, origin)
    assert relate_contains(seg, index, 5.0) == []


def test_contains_matches_rectangle_oracle(origin):
    rng = random.Random(13)
    pts = [(rng.uniform(-60, 160), rng.uniform(-60, 60)) for _ in range(300)]
    layer = make_layer(pts, origin)
    poly = make_segment(
        "p",
        [origin, offset_point(origin, 40, 25), offset_point(origin, 100, -10), offset_point(origin, 140, 30)],
    )
    index = SpatialIndex(layer, origin)
    for hw in (5.0, 12.0, 30.0):
        assert relate_contains(poly, index, hw) == oracle_contains(list(poly.polyline), layer, hw, origin)


def test_contains_node_is_disk(origin, plus_network):
    center = next(n for n in plus_network.nodes.values() if n.degree == 4)
    layer = make_layer([(4, 0), (0, 9), (12, 0)], origin)
    index = SpatialIndex(layer, origin)
    assert relate_contains(center, index, 10.0) == [0, 1]


# ---------------------------------------------------------------------------
# aggregate
# ---------------------------------------------------------------------------

def test_aggregate_mean():
    assert aggregate([2, 4, 6], "mean") == 4.0


def test_aggregate_empty_is_missing_not_zero():
    for kind in ("sum", "mean", "min", "max"):
        assert aggregate([], kind) is None


def test_aggregate_singleton_fixed_point():
    for kind in ("sum", "mean", "min", "max"):
        assert aggregate([7.5], kind) == 7.5


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
def test_aggregate_identities(values):
    mn = aggregate(values, "min")
    mx = aggregate(values, "max")
    mean = aggregate(values, "mean")
    total = aggregate(values, "sum")
    assert mn <= mean <= mx
    assert total == pytest.approx(mean * len(values), rel=1e-12, abs=1e-9)


def test_aggregate_permutation_invariant_bytes():
    values = [0.1, 0.7, 1e5, -3.3, 0.1]
    shuffled = [1e5, 0.1, -3.3, 0.7, 0.1]
    for kind in ("sum", "mean", "min", "max"):
        assert aggregate(values, kind) == aggregate(shuffled, kind)


def test_aggregate_unknown_kind():
    with pytest.raises(ValueError, match="unknown aggregation"):
        aggregate([1], "median")


# ---------------------------------------------------------------------------
# join
# ---------------------------------------------------------------------------

def test_join_buffer_mean_matches_manual(origin):
    seg = straight_segment("s", origin, True, 100.0)
    layer = make_layer([(50, 2), (50, -4), (50, 40)], origin, values=[2.0, 4.0, 100.0])
    joined = join([seg], layer, RelationSpec("buffer", 10.0, "mean"), origin)
    assert len(joined) == 1
    assert joined[0].matched_point_ids == (0, 1)
    assert joined[0].count == 2
    assert joined[0].aggregates == {"v": 3.0}


def test_join_contains_sum(origin):
    seg = straight_segment("s", origin, True, 100.0)
    layer = make_layer([(20, 1), (80, -2), (50, 30)], origin, values=[5.0, 7.0, 100.0])
    joined = join([seg], layer, RelationSpec("contains", 5.0, "sum"), origin)
    assert joined[0].aggregates == {"v": 12.0}


def test_join_missing_aggregate_absent(origin):
    seg = straight_segment("s", origin, True, 100.0)
    layer = make_layer([(50, 500)], origin)
    joined = join([seg], layer, RelationSpec("buffer", 10.0, "mean"), origin)
    assert joined[0].count == 0
    assert joined[0].aggregates == {}


def test_join_output_ordered_by_element_id(origin):
    segs = [
        straight_segment("zz", offset_point(origin, 0, 200), True, 50.0),
        straight_segment("aa", origin, True, 50.0),
    ]
    layer = make_layer([(25, 0)], origin)
    joined = join(segs, layer, RelationSpec("buffer", 10.0, "mean"), origin)
    assert [j.element_id for j in joined] == ["aa", "zz"]


def test_join_end_to_end_oracle_grid(origin):
    """Synthetic grid + random points: every aggregate equals recomputation."""
    rng = random.Random(4242)
    segs = []
    for r in range(4):
        for c in range(4):
            start = offset_point(origin, c * 120, r * 120)
            segs.append(straight_segment(f"g-{r}-{c}", start, True, 100.0))
    pts = [(rng.uniform(-50, 500), rng.uniform(-50, 500)) for _ in range(400)]
    values = [rng.uniform(0, 10) for _ in pts]
    layer = make_layer(pts, origin, values=values)

    for relation in (
        RelationSpec("buffer", 35.0, "mean"),
        RelationSpec("contains", 20.0, "sum"),
        RelationSpec("nn", 5, "max"),
    ):
        joined = join(segs, layer, relation, origin)
        for seg, j in zip(sorted(segs, key=lambda s: s.id), joined):
            if relation.spatial == "buffer":
                expected_ids = oracle_buffer_planar(seg.midpoint, layer, relation.value, origin)
            elif relation.spatial == "contains":
                expected_ids = oracle_contains(list(seg.polyline), layer, relation.value, origin)
            else:
                expected_ids = oracle_nn(list(seg.polyline), layer, int(relation.value), origin)
            assert list(j.matched_point_ids) == expected_ids
            vals = sorted(values[i] for i in expected_ids)
            if not vals:
                assert j.aggregates == {}
            elif relation.aggregation == "mean":
                assert j.aggregates["v"] == pytest.approx(sum(vals) / len(vals), rel=1e-12)
            elif relation.aggregation == "sum":
                assert j.aggregates["v"] == pytest.approx(sum(vals), rel=1e-12)
            else:
                assert j.aggregates["v"] == max(vals)


def test_join_pure_function_byte_identical(origin):
    rng = random.Random(9)
    pts = [(rng.uniform(-100, 100), rng.uniform(-100, 100)) for _ in range(100)]
    layer = make_layer(pts, origin)
    segs = [straight_segment(f"s{i}", offset_point(origin, 0, i * 30), True, 80.0) for i in range(5)]
    relation = RelationSpec("buffer", 25.0, "mean")
    import json

    a = json.dumps([j.to_json() for j in join(segs, layer, relation, origin)])
    b = json.dumps([j.to_json() for j in join(list(reversed(segs)), layer, relation, origin)])
    assert a == b
