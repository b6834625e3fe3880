"""HTTP service backing the authoring UI.

Endpoints:
  POST /api/validate   spec document -> {ok, diagnostics}
  POST /api/render     RenderRequest -> render plan JSON or SVG
  GET  /api/geocode?q= -> {query, center, provider}; literal works offline
  GET  /api/health     -> {status, version}
  GET  /api/examples   -> bundled scenario specs for the UI gallery

Status codes: 400 specification errors, 422 data errors, 502 geocoder
failure.  The service is stateless apart from the geocode cache; every
render runs on an immutable snapshot of its inputs.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .geocode import GeocodeError, Geocoder
from .pipeline import DataError, SpecError, build_plan
from .sampledata import SCENARIOS, sampledata_dir, scenario_text
from .specparse import parse_spec, parse_spec_object
from .svg import SvgError, emit_svg


def _diag_payload(diagnostics) -> dict[str, Any]:
    return {"diagnostics": [d.to_json() for d in diagnostics]}


def create_app(
    data_dir: Path | None = None,
    static_dir: Path | None = None,
    geocoder: Geocoder | None = None,
    nominal_zoom: int | None = None,
) -> FastAPI:
    app = FastAPI(title="streetweave", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    base_dir = data_dir if data_dir is not None else sampledata_dir()
    coder = geocoder if geocoder is not None else Geocoder()

    @app.get("/api/health")
    def health() -> dict[str, str]:
        return {"status": "ok", "version": __version__}

    @app.post("/api/validate")
    async def validate(request: Request) -> JSONResponse:
        try:
            body = await request.body()
            doc = json.loads(body)
        except json.JSONDecodeError as e:
            return JSONResponse(
                {
                    "ok": False,
                    "diagnostics": [
                        {"severity": "error", "path": "$", "message": f"malformed JSON at byte {e.pos}: {e.msg}"}
                    ],
                }
            )
        spec, diagnostics = parse_spec_object(doc)
        return JSONResponse({"ok": spec is not None, "diagnostics": [d.to_json() for d in diagnostics]})

    @app.post("/api/render")
    async def render(request: Request) -> Response:
        try:
            payload = json.loads(await request.body())
        except json.JSONDecodeError as e:
            return JSONResponse(
                _diag_payload_from(f"malformed JSON at byte {e.pos}: {e.msg}"), status_code=400
            )
        if not isinstance(payload, dict) or "spec" not in payload:
            return JSONResponse(_diag_payload_from("request body requires a 'spec' field"), status_code=400)

        raw_spec = payload["spec"]
        if isinstance(raw_spec, str):
            spec, diagnostics = parse_spec(raw_spec)
        else:
            spec, diagnostics = parse_spec_object(raw_spec)
        if spec is None:
            return JSONResponse(_diag_payload(diagnostics), status_code=400)

        overrides = payload.get("data") or {}
        inline_physical = overrides.get("physical")
        inline_thematic = overrides.get("thematic")
        output = payload.get("output", "plan")
        if output not in ("plan", "svg"):
            return JSONResponse(_diag_payload_from(f"unknown output {output!r}"), status_code=400)

        try:
            result = build_plan(
                spec,
                base_dir=base_dir,
                inline_physical=inline_physical,
                inline_thematic=inline_thematic,
                nominal_zoom=nominal_zoom,
                geocoder=coder,
            )
        except SpecError as e:
            return JSONResponse(_diag_payload(e.diagnostics), status_code=400)
        except DataError as e:
            return JSONResponse(_diag_payload(e.diagnostics), status_code=422)

        if output == "svg":
            try:
                svg = emit_svg(json.loads(result.text), payload.get("viewport"), payload.get("zoom"))
            except SvgError as e:
                return JSONResponse(_diag_payload_from(str(e)), status_code=400)
            return Response(content=svg, media_type="image/svg+xml")
        return Response(content=result.text, media_type="application/json")

    @app.get("/api/geocode")
    def geocode(q: str = Query(default="")) -> JSONResponse:
        if not q.strip():
            return JSONResponse({"error": "missing query parameter q"}, status_code=400)
        try:
            result = coder.geocode(q)
        except GeocodeError as e:
            return JSONResponse({"error": f"geocoder unavailable: {e}"}, status_code=502)
        return JSONResponse(
            {
                "query": result.query,
                "center": {"lat": result.center.lat, "lon": result.center.lon},
                "provider": result.provider,
            }
        )

    @app.get("/api/examples")
    def examples() -> list[dict[str, str]]:
        return [{"name": name, "title": title} for name, title in sorted(SCENARIOS.items())]

    @app.get("/api/examples/{name}")
    def example(name: str) -> JSONResponse:
        if name not in SCENARIOS:
            return JSONResponse({"error": f"unknown example {name!r}"}, status_code=404)
        return JSONResponse({"name": name, "title": SCENARIOS[name], "spec": scenario_text(name)})

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _diag_payload_from(message: str) -> dict[str, Any]:
    return {"diagnostics": [{"severity": "error", "path": "$", "message": message}]}
