"""Geocoding client: offline literal "lat,lon" parsing, with an optional
remote Nominatim-compatible provider and an on-disk response cache."""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path

import httpx

from .geo import GeoError, GeoPoint

ENV_GEOCODER_URL = "STREETWEAVE_GEOCODER_URL"
ENV_CACHE_DIR = "STREETWEAVE_CACHE_DIR"

_LITERAL_RE = re.compile(r"^\s*([-+]?\d+(?:\.\d+)?)\s*,\s*([-+]?\d+(?:\.\d+)?)\s*$")

# Cache writes are serialized; reads are lock-free (files appear atomically).
_write_lock = threading.Lock()


class GeocodeError(Exception):
    pass


@dataclass(frozen=True)
class GeocodeResult:
    query: str
    center: GeoPoint
    provider: str  # literal | remote | cache


def parse_literal(query: str) -> GeoPoint | None:
    m = _LITERAL_RE.match(query)
    if not m:
        return None
    try:
        return GeoPoint(float(m.group(1)), float(m.group(2)))
    except GeoError as e:
        raise GeocodeError(f"literal coordinate invalid: {e}") from e


def _default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "streetweave" / "geocode"


class Geocoder:
    def __init__(
        self,
        base_url: str | None = None,
        cache_dir: str | Path | None = None,
        timeout: float = 5.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = base_url if base_url is not None else os.environ.get(ENV_GEOCODER_URL)
        self.cache_dir = Path(cache_dir) if cache_dir is not None else _default_cache_dir()
        self.timeout = timeout
        self._transport = transport

    def _cache_path(self, normalized: str) -> Path:
        digest = hashlib.sha256(normalized.encode("utf-8")).hexdigest()
        return self.cache_dir / f"{digest}.json"

    def geocode(self, query: str) -> GeocodeResult:
        if not query or not query.strip():
            raise GeocodeError("empty geocode query")
        literal = parse_literal(query)
        if literal is not None:
            return GeocodeResult(query=query, center=literal, provider="literal")
        if not self.base_url:
            raise GeocodeError(
                "remote geocoding is disabled; set STREETWEAVE_GEOCODER_URL or use a literal 'lat,lon' address"
            )

        normalized = " ".join(query.strip().lower().split())
        cache_file = self._cache_path(normalized)
        if cache_file.is_file():
            cached = json.loads(cache_file.read_text(encoding="utf-8"))
            return GeocodeResult(
                query=query,
                center=GeoPoint(cached["lat"], cached["lon"]),
                provider="cache",
            )

        center = self._fetch_remote(normalized)
        with _write_lock:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump({"query": normalized, "lat": center.lat, "lon": center.lon}, f)
            os.replace(tmp, cache_file)
        return GeocodeResult(query=query, center=center, provider="remote")

    def _fetch_remote(self, normalized: str) -> GeoPoint:
        url = self.base_url.rstrip("/") + "/search"
        try:
            with httpx.Client(transport=self._transport, timeout=self.timeout) as client:
                response = client.get(url, params={"q": normalized, "format": "json"})
        except httpx.HTTPError as e:
            raise GeocodeError(f"geocoder unavailable: {e}") from e
        if response.status_code >= 500:
            raise GeocodeError(f"geocoder unavailable: HTTP {response.status_code}")
        if response.status_code != 200:
            raise GeocodeError(f"geocoder error: HTTP {response.status_code}")
        try:
            hits = response.json()
        except ValueError as e:
            raise GeocodeError(f"geocoder unavailable: invalid response ({e})") from e
        if not isinstance(hits, list) or not hits:
            raise GeocodeError(f"geocoder found no match for {normalized!r}")
        first = hits[0]
        try:
            return GeoPoint(float(first["lat"]), float(first["lon"]))
        except (KeyError, TypeError, ValueError, GeoError) as e:
            raise GeocodeError(f"geocoder unavailable: malformed hit ({e})") from e
