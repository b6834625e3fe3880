"""Spatial relations binding thematic points to network elements, plus
per-element aggregation.

All metric tests happen in the planar projection about the network centroid.
The k-d tree only prunes candidates; membership is always decided by the same
explicit distance formulas a brute-force scan would use, so index and scan
agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from .geo import GeoPoint, NetworkNode, StreetSegment, SubSegment, project
from .model import RelationSpec
from .thematic import ThematicLayer

Element = Union[StreetSegment, SubSegment, NetworkNode]

# Slack added to pruning queries so the exact filter never loses a boundary
# point to the tree's own rounding.
_PRUNE_EPS = 1e-9


@dataclass(frozen=True)
class JoinedElement:
    element_id: str
    matched_point_ids: tuple[int, ...]
    aggregates: Mapping[str, float]
    count: int

    def to_json(self) -> dict:
        return {
            "elementId": self.element_id,
            "matchedPointIds": list(self.matched_point_ids),
            "aggregates": {k: self.aggregates[k] for k in sorted(self.aggregates)},
            "count": self.count,
        }


class SpatialIndex:
    """Planar index over a thematic layer's projected points."""

    def __init__(self, layer: ThematicLayer, origin: GeoPoint):
        self.layer = layer
        self.origin = origin
        self.ids = np.array([p.id for p in layer.points], dtype=np.int64)
        xy = np.empty((len(layer.points), 2), dtype=np.float64)
        for i, p in enumerate(layer.points):
            xy[i] = project(p.position, origin)
        self.xy = xy
        self._tree = cKDTree(xy) if len(xy) else None

    def candidates_within(self, center: tuple[float, float], radius: float) -> np.ndarray:
        """Indices (into the layer's point list) of candidates near center."""
        if self._tree is None:
            return np.empty(0, dtype=np.int64)
        found = self._tree.query_ball_point(center, radius + _PRUNE_EPS * max(1.0, radius))
        return np.asarray(sorted(found), dtype=np.int64)

    def candidates_within_many(self, centers: np.ndarray, radius: float) -> list[np.ndarray]:
        if self._tree is None:
            return [np.empty(0, dtype=np.int64) for _ in range(len(centers))]
        found = self._tree.query_ball_point(centers, radius + _PRUNE_EPS * max(1.0, radius), workers=-1)
        return [np.asarray(sorted(f), dtype=np.int64) for f in found]


def _element_anchor_xy(element: Element, origin: GeoPoint) -> tuple[float, float]:
    if isinstance(element, NetworkNode):
        return project(element.position, origin)
    return project(element.midpoint, origin)


def _polyline_xy(element: Element, origin: GeoPoint) -> np.ndarray | None:
    if isinstance(element, NetworkNode):
        return None
    return np.array([project(p, origin) for p in element.polyline], dtype=np.float64)


def _point_distances(xy: np.ndarray, center: tuple[float, float]) -> np.ndarray:
    return np.hypot(xy[:, 0] - center[0], xy[:, 1] - center[1])


def distances_to_polyline(xy: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Min distance from each point to the polyline, clamped to endpoints."""
    best = np.full(len(xy), np.inf)
    for i in range(len(poly) - 1):
        a, b = poly[i], poly[i + 1]
        d = b - a
        ll = float(d @ d)
        if ll == 0.0:
            dist = np.hypot(xy[:, 0] - a[0], xy[:, 1] - a[1])
        else:
            t = np.clip(((xy - a) @ d) / ll, 0.0, 1.0)
            foot = a + t[:, None] * d
            dist = np.hypot(xy[:, 0] - foot[:, 0], xy[:, 1] - foot[:, 1])
        best = np.minimum(best, dist)
    return best


def corridor_mask(xy: np.ndarray, poly: np.ndarray, half_width: float) -> np.ndarray:
    """Membership in the union of per-edge rectangles (boundaries inclusive).

    A point belongs iff for some edge its perpendicular foot falls within the
    edge's extent and its perpendicular distance is <= half_width.
    """
    mask = np.zeros(len(xy), dtype=bool)
    for i in range(len(poly) - 1):
        a, b = poly[i], poly[i + 1]
        d = b - a
        ll = float(d @ d)
        if ll == 0.0:
            continue
        t = ((xy - a) @ d) / ll
        foot = a + t[:, None] * d
        perp = np.hypot(xy[:, 0] - foot[:, 0], xy[:, 1] - foot[:, 1])
        mask |= (t >= 0.0) & (t <= 1.0) & (perp <= half_width)
    return mask


def relate_buffer(element: Element, index: SpatialIndex, radius_m: float) -> list[int]:
    """Point ids within radius_m of the element's midpoint (inclusive)."""
    if radius_m <= 0:
        raise ValueError(f"buffer radius must be > 0, got {radius_m}")
    center = _element_anchor_xy(element, index.origin)
    cand = index.candidates_within(center, radius_m)
    if len(cand) == 0:
        return []
    dist = _point_distances(index.xy[cand], center)
    keep = cand[dist <= radius_m]
    return sorted(int(index.ids[i]) for i in keep)


def relate_nn(element: Element, index: SpatialIndex, k: int) -> list[int]:
    """The k closest point ids, ordered by (distance, id)."""
    if k < 1:
        raise ValueError(f"nn count must be >= 1, got {k}")
    n = len(index.xy)
    if n == 0:
        return []
    poly = _polyline_xy(element, index.origin)
    if poly is None:
        dist = _point_distances(index.xy, _element_anchor_xy(element, index.origin))
    else:
        dist = distances_to_polyline(index.xy, poly)
    order = np.lexsort((index.ids, dist))
    return [int(index.ids[i]) for i in order[: min(k, n)]]


def relate_contains(element: Element, index: SpatialIndex, half_width_m: float) -> list[int]:
    """Point ids inside the element's corridor (segments) or disk (nodes)."""
    if half_width_m <= 0:
        raise ValueError(f"contains half-width must be > 0, got {half_width_m}")
    poly = _polyline_xy(element, index.origin)
    if poly is None:
        center = _element_anchor_xy(element, index.origin)
        cand = index.candidates_within(center, half_width_m)
        if len(cand) == 0:
            return []
        dist = _point_distances(index.xy[cand], center)
        keep = cand[dist <= half_width_m]
        return sorted(int(index.ids[i]) for i in keep)
    # Prune with a disk covering the whole corridor, then test exactly.
    span = math.hypot(
        float(poly[:, 0].max() - poly[:, 0].min()),
        float(poly[:, 1].max() - poly[:, 1].min()),
    )
    center = ((float(poly[:, 0].max()) + float(poly[:, 0].min())) / 2.0,
              (float(poly[:, 1].max()) + float(poly[:, 1].min())) / 2.0)
    cand = index.candidates_within(center, span / 2.0 + half_width_m)
    if len(cand) == 0:
        return []
    mask = corridor_mask(index.xy[cand], poly, half_width_m)
    return sorted(int(index.ids[i]) for i in cand[mask])


def aggregate(values: Sequence[float], kind: str) -> float | None:
    """Reduce matched values; empty input is missing (None), never zero.

    Values are summed in ascending order so the result is invariant under
    input permutation (row shuffling must not change plan bytes).
    """
    if kind not in ("sum", "mean", "min", "max"):
        raise ValueError(f"unknown aggregation {kind!r}")
    if len(values) == 0:
        return None
    ordered = sorted(float(v) for v in values)
    if kind == "min":
        return ordered[0]
    if kind == "max":
        return ordered[-1]
    total = 0.0
    for v in ordered:
        total += v
    if kind == "sum":
        return total
    # clamp: float rounding could push sum/count an ulp past the extremes,
    # breaking the min <= mean <= max identity
    return min(max(total / len(ordered), ordered[0]), ordered[-1])


def _column_values(layer: ThematicLayer, column: str) -> np.ndarray:
    out = np.full(len(layer.points), np.nan)
    for i, p in enumerate(layer.points):
        v = p.attributes.get(column)
        if isinstance(v, (int, float)):
            out[i] = float(v)
    return out


def join(
    elements: Iterable[Element],
    layer: ThematicLayer,
    relation: RelationSpec,
    origin: GeoPoint,
    index: SpatialIndex | None = None,
) -> list[JoinedElement]:
    """Apply the relation per element and aggregate every numeric column.

    Output is ordered by element id; a pure function of its inputs.
    """
    if index is None:
        index = SpatialIndex(layer, origin)
    id_to_row = {int(pid): i for i, pid in enumerate(index.ids)}
    columns = {c: _column_values(layer, c) for c in sorted(layer.numeric_columns)}

    ordered = sorted(elements, key=lambda e: e.id)
    results: list[JoinedElement] = []

    if relation.spatial == "buffer" and len(ordered) > 1:
        centers = np.array([_element_anchor_xy(e, index.origin) for e in ordered])
        batches = index.candidates_within_many(centers, float(relation.value))
        matched_lists = []
        for row, cand in enumerate(batches):
            if len(cand) == 0:
                matched_lists.append([])
                continue
            dist = _point_distances(index.xy[cand], tuple(centers[row]))
            keep = cand[dist <= float(relation.value)]
            matched_lists.append(sorted(int(index.ids[i]) for i in keep))
    else:
        matched_lists = []
        for element in ordered:
            if relation.spatial == "buffer":
                matched_lists.append(relate_buffer(element, index, float(relation.value)))
            elif relation.spatial == "nn":
                matched_lists.append(relate_nn(element, index, int(relation.value)))
            elif relation.spatial == "contains":
                matched_lists.append(relate_contains(element, index, float(relation.value)))
            else:
                raise ValueError(f"unknown spatial relation {relation.spatial!r}")

    for element, matched in zip(ordered, matched_lists):
        rows = [id_to_row[pid] for pid in matched]
        aggregates: dict[str, float] = {}
        for column, values in columns.items():
            present = [values[r] for r in rows if not math.isnan(values[r])]
            reduced = aggregate(present, relation.aggregation)
            if reduced is not None:
                aggregates[column] = reduced
        results.append(
            JoinedElement(
                element_id=element.id,
                matched_point_ids=tuple(matched),
                aggregates=aggregates,
                count=len(matched),
            )
        )
    return results
