// Application wiring: spec editor + diagnostics panel + gallery + map view.

import { ApiClient } from './api';
import { fitViewport, panViewport, planToSvg, Viewport } from './mapview';
import { OverlayState } from './overlay';
import { EditorSession } from './session';
import type { Diagnostic } from './types';

const api = new ApiClient();
const session = new EditorSession(api);
const overlay = new OverlayState(api);

const editor = document.getElementById('editor') as HTMLTextAreaElement;
const diagnosticsEl = document.getElementById('diagnostics') as HTMLElement;
const galleryEl = document.getElementById('gallery') as HTMLElement;
const mapEl = document.getElementById('map') as unknown as SVGSVGElement;
const applyButton = document.getElementById('apply') as HTMLButtonElement;
const zoomLabel = document.getElementById('zoom-label') as HTMLElement;
const statusEl = document.getElementById('status') as HTMLElement;

let viewport: Viewport | null = null;

function showStatus(message: string, isError = false): void {
  statusEl.textContent = message;
  statusEl.className = isError ? 'status error' : 'status';
}

function renderDiagnostics(diagnostics: Diagnostic[]): void {
  if (diagnostics.length === 0) {
    diagnosticsEl.innerHTML = '<div class="diag ok">no problems</div>';
    return;
  }
  diagnosticsEl.innerHTML = diagnostics
    .map(
      (d) =>
        `<div class="diag ${d.severity}"><span class="path">${d.path}</span> ${d.message
          .replace(/&/g, '&amp;')
          .replace(/</g, '&lt;')}</div>`,
    )
    .join('');
}

function redraw(): void {
  if (!overlay.plan || !viewport) return;
  viewport = { ...viewport, widthPx: mapEl.clientWidth || 800, heightPx: mapEl.clientHeight || 600 };
  mapEl.innerHTML = planToSvg(overlay.plan, viewport, overlay.visible);
  zoomLabel.textContent = `z${overlay.currentZoom}`;
}

session.onChange(() => renderDiagnostics(session.diagnostics));
overlay.onChange(redraw);

async function apply(): Promise<void> {
  const diagnostics = await session.validateNow();
  renderDiagnostics(diagnostics);
  if (session.hasErrors()) {
    showStatus('spec has errors; overlay unchanged', true);
    return;
  }
  showStatus('rendering…');
  const outcome = await overlay.applySpec(session.specText);
  if (outcome.kind === 'applied') {
    if (!viewport) {
      viewport = fitViewport(
        outcome.plan.bbox,
        mapEl.clientWidth || 800,
        mapEl.clientHeight || 600,
      );
      overlay.setZoom(Math.round(viewport.zoom));
    }
    redraw();
    showStatus(`rendered ${outcome.plan.primitives.length} primitives`);
  } else if (outcome.kind === 'rejected') {
    renderDiagnostics(outcome.diagnostics);
    showStatus('render rejected; overlay unchanged', true);
  } else if (outcome.kind === 'failed') {
    showStatus(`render failed: ${outcome.message}; overlay unchanged`, true);
  }
}

applyButton.addEventListener('click', () => void apply());
editor.addEventListener('input', () => session.edit(editor.value));

document.getElementById('zoom-in')?.addEventListener('click', () => {
  if (!viewport) return;
  viewport = { ...viewport, zoom: Math.min(viewport.zoom + 1, 22) };
  overlay.setZoom(Math.round(viewport.zoom));
});
document.getElementById('zoom-out')?.addEventListener('click', () => {
  if (!viewport) return;
  viewport = { ...viewport, zoom: Math.max(viewport.zoom - 1, 0) };
  overlay.setZoom(Math.round(viewport.zoom));
});

let dragging: { x: number; y: number } | null = null;
mapEl.addEventListener('mousedown', (ev) => {
  dragging = { x: ev.clientX, y: ev.clientY };
});
window.addEventListener('mouseup', () => {
  dragging = null;
});
window.addEventListener('mousemove', (ev) => {
  if (!dragging || !viewport) return;
  viewport = panViewport(viewport, ev.clientX - dragging.x, ev.clientY - dragging.y);
  dragging = { x: ev.clientX, y: ev.clientY };
  redraw();
});

async function loadGallery(): Promise<void> {
  try {
    const examples = await api.examples();
    galleryEl.innerHTML = examples
      .map((e) => `<button class="example" data-name="${e.name}" title="${e.title}">${e.name}</button>`)
      .join('');
    for (const button of galleryEl.querySelectorAll<HTMLButtonElement>('button.example')) {
      button.addEventListener('click', async () => {
        const spec = await api.exampleSpec(button.dataset['name']!);
        editor.value = spec;
        await session.load(spec);
        await apply();
      });
    }
  } catch (err) {
    galleryEl.innerHTML = `<div class="diag error">gallery unavailable: ${String(err)}</div>`;
  }
}

void loadGallery();
showStatus('load an example or paste a spec, then Apply');
