"""Access to the bundled synthetic sample datasets and scenario specs."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

SCENARIOS = {
    "scenario1": "Sidewalk severity, three aligned line layers (buffer 10 m + mean)",
    "scenario2": "Fine-grained sidewalk line map, density 4 (flip orientation for bristles)",
    "scenario2_bristle": "Dual bristle maps aligned left/right",
    "scenario3_perpendicular": "Intersection charts + 311 totals, perpendicular",
    "scenario3_parallel": "Intersection charts + 311 totals, parallel",
}


def sampledata_dir() -> Path:
    return Path(resources.files("streetweave") / "sampledata")  # type: ignore[arg-type]


def scenario_path(name: str) -> Path:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; available: {', '.join(sorted(SCENARIOS))}")
    return sampledata_dir() / f"{name}.json"


def scenario_text(name: str) -> str:
    return scenario_path(name).read_text(encoding="utf-8")
