#!/usr/bin/env python3
"""Generate the bundled synthetic sample datasets (deterministic, seeded).

Writes a grid street network plus sidewalk / crime / 311-style CSVs into
src/streetweave/sampledata/ so every scenario runs offline.  Run from the
repo root; outputs are committed.
"""

from __future__ import annotations

import csv
import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "streetweave" / "sampledata"

LAT0 = 41.878
LON0 = -87.635
ROWS = 6  # node rows
COLS = 6  # node cols
SPACING_M = 100.0

M_PER_DEG_LAT = 111195.08023353291
M_PER_DEG_LON = M_PER_DEG_LAT * math.cos(math.radians(LAT0))


def node_pos(r: int, c: int) -> tuple[float, float]:
    lat = LAT0 + r * SPACING_M / M_PER_DEG_LAT
    lon = LON0 + c * SPACING_M / M_PER_DEG_LON
    return lat, lon


def offset(lat: float, lon: float, dx_m: float, dy_m: float) -> tuple[float, float]:
    return lat + dy_m / M_PER_DEG_LAT, lon + dx_m / M_PER_DEG_LON


def grid_network() -> dict:
    features = []
    for r in range(ROWS):
        for c in range(COLS - 1):
            a, b = node_pos(r, c), node_pos(r, c + 1)
            features.append(
                {
                    "type": "Feature",
                    "properties": {"id": f"h-{r}-{c}"},
                    "geometry": {"type": "LineString", "coordinates": [[a[1], a[0]], [b[1], b[0]]]},
                }
            )
    for r in range(ROWS - 1):
        for c in range(COLS):
            a, b = node_pos(r, c), node_pos(r + 1, c)
            features.append(
                {
                    "type": "Feature",
                    "properties": {"id": f"v-{r}-{c}"},
                    "geometry": {"type": "LineString", "coordinates": [[a[1], a[0]], [b[1], b[0]]]},
                }
            )
    return {"type": "FeatureCollection", "features": features}


def segment_midpoints(net: dict) -> list[tuple[str, float, float, float]]:
    """(id, mid lat, mid lon, bearing east=90/north=0) per segment."""
    out = []
    for f in net["features"]:
        (lon_a, lat_a), (lon_b, lat_b) = f["geometry"]["coordinates"]
        bearing = 90.0 if abs(lat_a - lat_b) < 1e-12 else 0.0
        out.append((f["properties"]["id"], (lat_a + lat_b) / 2, (lon_a + lon_b) / 2, bearing))
    return out


def sidewalk_csv(net: dict, rng: random.Random) -> list[list]:
    rows: list[list] = []
    for seg_id, lat, lon, bearing in segment_midpoints(net):
        # Severity trends west -> east and south -> north plus noise, so the
        # rendered maps show visible gradients.
        tx = (lon - LON0) * M_PER_DEG_LON / ((COLS - 1) * SPACING_M)
        ty = (lat - LAT0) * M_PER_DEG_LAT / ((ROWS - 1) * SPACING_M)
        for _ in range(rng.randint(2, 4)):
            # Cluster within 7 m of the midpoint so the 10 m buffer catches them.
            dx, dy = rng.uniform(-7, 7), rng.uniform(-7, 7)
            plat, plon = offset(lat, lon, dx, dy)
            curb = min(5.0, max(1.0, 1 + 4 * tx + rng.gauss(0, 0.6)))
            surface = min(5.0, max(1.0, 1 + 4 * ty + rng.gauss(0, 0.6)))
            missing = min(5.0, max(1.0, 1 + 2 * tx + 2 * ty + rng.gauss(0, 0.8)))
            rows.append([round(plat, 7), round(plon, 7), round(curb, 1), round(surface, 1), round(missing, 1)])
    # Background scatter, some of it outside every buffer.
    for _ in range(120):
        dx = rng.uniform(-60, (COLS - 1) * SPACING_M + 60)
        dy = rng.uniform(-60, (ROWS - 1) * SPACING_M + 60)
        plat, plon = offset(LAT0, LON0, dx, dy)
        rows.append(
            [
                round(plat, 7),
                round(plon, 7),
                round(rng.uniform(1, 5), 1),
                round(rng.uniform(1, 5), 1),
                round(rng.uniform(1, 5), 1),
            ]
        )
    return rows


def crime_csv(rng: random.Random) -> list[list]:
    categories = ["theft", "assault", "burglary", "vandalism"]
    rows: list[list] = []
    for r in range(ROWS):
        for c in range(COLS):
            lat, lon = node_pos(r, c)
            hotspot = 1.0 + 6.0 * math.exp(-((r - 2) ** 2 + (c - 3) ** 2) / 4.0)
            for _ in range(rng.randint(1, 4)):
                dx, dy = rng.uniform(-12, 12), rng.uniform(-12, 12)
                plat, plon = offset(lat, lon, dx, dy)
                severity = min(10.0, max(1.0, hotspot + rng.gauss(0, 1.2)))
                rows.append([round(plat, 7), round(plon, 7), round(severity, 1), rng.choice(categories)])
    return rows


def requests_csv(net: dict, rng: random.Random) -> list[list]:
    rows: list[list] = []
    for seg_id, lat, lon, bearing in segment_midpoints(net):
        demand = 2 + 16 * rng.random() ** 2
        for _ in range(rng.randint(2, 5)):
            # Inside the segment corridor: along +-45 m, across +-5 m.
            along, across = rng.uniform(-45, 45), rng.uniform(-5, 5)
            if bearing == 90.0:
                dx, dy = along, across
            else:
                dx, dy = across, along
            plat, plon = offset(lat, lon, dx, dy)
            rows.append([round(plat, 7), round(plon, 7), max(1, int(demand + rng.gauss(0, 2)))])
    return rows


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


SCENARIO1 = {
    "map": [{"streetColor": "#bbbbbb", "streetWidth": 1.5, "background": "light"}],
    "unit": [
        {
            "type": "segment",
            "method": "line",
            "alignment": "center",
            "color": "#2a9d4e",
            "width": {"field": "curb_ramp_severity", "range": [1, 10]},
        },
        {
            "type": "segment",
            "method": "line",
            "alignment": "right",
            "color": "#8c6239",
            "width": {"field": "missing_sidewalk_severity", "range": [1, 10]},
        },
        {
            "type": "segment",
            "method": "line",
            "alignment": "left",
            "color": "#7b3294",
            "width": {"field": "surface_problem_severity", "range": [1, 10]},
        },
    ],
    "data": [{"physical": "grid_network.geojson", "thematic": {"path": "sidewalk.csv"}}],
    "relation": {"spatial": "buffer", "value": 10, "aggregation": "mean"},
}

SCENARIO2 = {
    "map": [{"streetColor": "#bbbbbb", "streetWidth": 1.5, "background": "light"}],
    "unit": [
        {
            "type": "segment",
            "method": "line",
            "density": 4,
            "alignment": "center",
            "orientation": "parallel",
            "color": {"field": "curb_ramp_severity", "base": "#2a9d4e"},
            "width": {"field": "curb_ramp_severity", "range": [1, 8]},
        }
    ],
    "data": [{"physical": "grid_network.geojson", "thematic": {"path": "sidewalk.csv"}}],
    "relation": {"spatial": "buffer", "value": 30, "aggregation": "mean"},
}

SCENARIO2_BRISTLE = {
    "map": [{"streetColor": "#bbbbbb", "streetWidth": 1.5, "background": "light"}],
    "unit": [
        {
            "type": "segment",
            "method": "line",
            "density": 4,
            "alignment": "left",
            "orientation": "perpendicular",
            "color": {"field": "curb_ramp_severity", "base": "#2a9d4e"},
            "width": 2,
            "height": {"field": "curb_ramp_severity", "range": [4, 24]},
        },
        {
            "type": "segment",
            "method": "line",
            "density": 4,
            "alignment": "right",
            "orientation": "perpendicular",
            "color": {"field": "surface_problem_severity", "base": "#7b3294"},
            "width": 2,
            "height": {"field": "surface_problem_severity", "range": [4, 24]},
        },
    ],
    "data": [{"physical": "grid_network.geojson", "thematic": {"path": "sidewalk.csv"}}],
    "relation": {"spatial": "buffer", "value": 30, "aggregation": "mean"},
}

_CHART = {
    "mark": "bar",
    "width": 60,
    "height": 40,
    "encoding": {
        "x": {"field": "field", "type": "nominal"},
        "y": {"field": "value", "type": "quantitative"},
    },
}

SCENARIO3_PERP = {
    "map": [{"streetColor": "#bbbbbb", "streetWidth": 1.5, "background": "dark"}],
    "unit": [
        {
            "type": "node",
            "method": "line",
            "chart": _CHART,
            "relation": {"spatial": "contains", "value": 15, "aggregation": "mean"},
        },
        {
            "type": "segment",
            "method": "line",
            "density": 3,
            "orientation": "perpendicular",
            "alignment": "left",
            "color": "#e08214",
            "width": 2,
            "height": {"field": "requests", "range": [4, 28]},
        },
    ],
    "data": [
        {"physical": "grid_network.geojson", "thematic": {"path": "crime.csv"}},
        {"thematic": {"path": "requests_311.csv"}},
    ],
    "relation": {"spatial": "contains", "value": 15, "aggregation": "sum"},
}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240601)

    net = grid_network()
    (OUT / "grid_network.geojson").write_text(json.dumps(net, indent=1), encoding="utf-8")

    write_csv(
        OUT / "sidewalk.csv",
        ["latitude", "longitude", "curb_ramp_severity", "surface_problem_severity", "missing_sidewalk_severity"],
        sidewalk_csv(net, rng),
    )
    write_csv(OUT / "crime.csv", ["latitude", "longitude", "severity", "category"], crime_csv(rng))
    write_csv(OUT / "requests_311.csv", ["latitude", "longitude", "requests"], requests_csv(net, rng))

    scenario3_parallel = json.loads(json.dumps(SCENARIO3_PERP))
    scenario3_parallel["unit"][1]["orientation"] = "parallel"

    for name, doc in [
        ("scenario1", SCENARIO1),
        ("scenario2", SCENARIO2),
        ("scenario2_bristle", SCENARIO2_BRISTLE),
        ("scenario3_perpendicular", SCENARIO3_PERP),
        ("scenario3_parallel", scenario3_parallel),
    ]:
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

    print(f"wrote sample data to {OUT}")


if __name__ == "__main__":
    main()
