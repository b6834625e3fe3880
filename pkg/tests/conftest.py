import json
import math
from pathlib import Path

import pytest

from streetweave.geo import GeoPoint, build_network, make_segment

# Meters per degree of latitude on the working sphere (R = 6371008.8 m).
M_PER_DEG_LAT = 111195.08023353291

TESTS_DIR = Path(__file__).resolve().parent
DATA_DIR = TESTS_DIR / "data"
GOLDEN_DIR = TESTS_DIR / "golden"


def offset_point(base: GeoPoint, dx_m: float, dy_m: float) -> GeoPoint:
    """Point dx meters east / dy meters north of base (equirectangular)."""
    m_per_deg_lon = M_PER_DEG_LAT * math.cos(math.radians(base.lat))
    return GeoPoint(base.lat + dy_m / M_PER_DEG_LAT, base.lon + dx_m / m_per_deg_lon)


def straight_segment(seg_id: str, start: GeoPoint, bearing_east: bool, length_m: float, n_vertices: int = 2):
    pts = []
    for i in range(n_vertices):
        d = length_m * i / (n_vertices - 1)
        pts.append(offset_point(start, d if bearing_east else 0.0, 0.0 if bearing_east else d))
    return make_segment(seg_id, pts)


@pytest.fixture
def origin() -> GeoPoint:
    return GeoPoint(41.88, -87.63)


@pytest.fixture
def plus_network_doc(origin):
    """Four LineStrings meeting at one shared center point."""
    c = origin
    n = offset_point(c, 0, 100)
    s = offset_point(c, 0, -100)
    e = offset_point(c, 100, 0)
    w = offset_point(c, -100, 0)
    features = []
    for name, end in (("north", n), ("south", s), ("east", e), ("west", w)):
        features.append(
            {
                "type": "Feature",
                "properties": {"id": name},
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[c.lon, c.lat], [end.lon, end.lat]],
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


@pytest.fixture
def plus_network(plus_network_doc):
    return build_network(plus_network_doc)


@pytest.fixture
def sample_dir() -> Path:
    from streetweave.sampledata import sampledata_dir

    return sampledata_dir()


def write_spec(tmp_path: Path, doc: dict, name: str = "spec.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path
