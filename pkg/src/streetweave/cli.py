"""Command-line interface: validate, render, serve.

Exit codes: 0 success, 1 I/O or data errors, 2 specification errors.
Diagnostics stream as JSON lines on stderr.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .model import Diagnostic
from .pipeline import DataError, SpecError, render_spec_text
from .render import DEFAULT_NOMINAL_ZOOM
from .specparse import parse_spec

ENV_PORT = "STREETWEAVE_PORT"
ENV_NOMINAL_ZOOM = "STREETWEAVE_NOMINAL_ZOOM"


def _emit_diagnostics(diagnostics: list[Diagnostic]) -> None:
    for d in diagnostics:
        click.echo(json.dumps(d.to_json(), sort_keys=True), err=True)


def _read_spec(spec_path: str) -> str:
    path = Path(spec_path)
    if not path.is_file():
        click.echo(json.dumps({"severity": "error", "path": "$", "message": f"spec file not found: {path}"}), err=True)
        sys.exit(1)
    return path.read_text(encoding="utf-8")


def _env_nominal_zoom() -> int | None:
    raw = os.environ.get(ENV_NOMINAL_ZOOM)
    return int(raw) if raw else None


@click.group()
@click.version_option(__version__, prog_name="streetweave")
def main() -> None:
    """StreetWeave: street-overlaid visualizations from declarative specs."""


@main.command()
@click.option("--spec", "spec_path", required=True, help="Specification document (JSON).")
def validate(spec_path: str) -> None:
    """Validate a specification; prints OK or diagnostics."""
    text = _read_spec(spec_path)
    spec, diagnostics = parse_spec(text)
    _emit_diagnostics(diagnostics)
    if spec is None:
        sys.exit(2)
    click.echo("OK")


@main.command()
@click.option("--spec", "spec_path", required=True, help="Specification document (JSON).")
@click.option("--out", "out_path", default="-", show_default=True, help="Output file, - for stdout.")
@click.option("--format", "fmt", type=click.Choice(["plan", "svg"]), default="plan", show_default=True)
@click.option("--zoom", type=int, default=None, help="Zoom level for SVG layer visibility.")
@click.option("--width", type=int, default=None, help="SVG viewport width in px.")
@click.option("--height", type=int, default=None, help="SVG viewport height in px.")
@click.option("--data-dir", default=None, help="Base directory for relative data paths (default: the spec's directory).")
@click.option("--nominal-zoom", type=int, default=None, help=f"Pixel-to-meter conversion zoom (default {DEFAULT_NOMINAL_ZOOM}).")
def render(
    spec_path: str,
    out_path: str,
    fmt: str,
    zoom: int | None,
    width: int | None,
    height: int | None,
    data_dir: str | None,
    nominal_zoom: int | None,
) -> None:
    """Render a specification to a plan (JSON) or SVG document."""
    text = _read_spec(spec_path)
    base_dir = Path(data_dir) if data_dir else Path(spec_path).resolve().parent
    viewport = None
    if width is not None or height is not None:
        viewport = {"widthPx": width, "heightPx": height}
    try:
        result = render_spec_text(
            text,
            base_dir=base_dir,
            output=fmt,
            zoom=zoom,
            viewport=viewport,
            nominal_zoom=nominal_zoom if nominal_zoom is not None else _env_nominal_zoom(),
        )
    except SpecError as e:
        _emit_diagnostics(e.diagnostics)
        sys.exit(2)
    except DataError as e:
        _emit_diagnostics(e.diagnostics)
        sys.exit(1)
    _emit_diagnostics(result.warnings)
    if out_path == "-":
        click.echo(result.text, nl=False)
    else:
        Path(out_path).write_text(result.text, encoding="utf-8")


@main.command()
@click.option("--port", type=int, default=None, help=f"Port (default ${ENV_PORT} or 8000).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static-dir", default=None, help="Directory with the web UI bundle to serve at /.")
@click.option("--data-dir", default=None, help="Base directory for data paths in rendered specs (default: bundled sample data).")
def serve(port: int | None, host: str, static_dir: str | None, data_dir: str | None) -> None:
    """Run the HTTP service backing the web authoring UI."""
    import uvicorn

    from .service import create_app

    if port is None:
        port = int(os.environ.get(ENV_PORT, "8000"))
    app = create_app(
        data_dir=Path(data_dir) if data_dir else None,
        static_dir=Path(static_dir) if static_dir else None,
        nominal_zoom=_env_nominal_zoom(),
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
