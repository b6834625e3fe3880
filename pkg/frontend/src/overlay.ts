// Overlay state: the current render plan, zoom-filtered layer visibility,
// and the apply loop.  The previous overlay stays visible until a new plan
// has fully arrived; rejected or failed renders leave it untouched.

import { ApiClient, RenderRejected } from './api';
import type { Diagnostic, LayerMeta, RenderPlan } from './types';

export function visibleLayers(layers: LayerMeta[], zoom: number): Set<number> {
  const out = new Set<number>();
  for (const layer of layers) {
    if (layer.zoom[0] <= zoom && zoom <= layer.zoom[1]) out.add(layer.layer);
  }
  return out;
}

export type ApplyOutcome =
  | { kind: 'applied'; plan: RenderPlan }
  | { kind: 'rejected'; diagnostics: Diagnostic[] }
  | { kind: 'failed'; message: string }
  | { kind: 'superseded' };

export class OverlayState {
  plan: RenderPlan | null = null;
  currentZoom = 16;
  visible = new Set<number>();

  private inflight: AbortController | null = null;
  private listeners: (() => void)[] = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  setZoom(zoom: number): void {
    this.currentZoom = zoom;
    this.visible = this.plan ? visibleLayers(this.plan.meta.layers, zoom) : new Set();
    this.notify();
  }

  /**
   * Render the spec and atomically replace the overlay.  A newer apply
   * cancels any pending one; 4xx responses surface diagnostics and keep the
   * current overlay.
   */
  async applySpec(specText: string): Promise<ApplyOutcome> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const plan = await this.api.render(specText, controller.signal);
      if (controller.signal.aborted) return { kind: 'superseded' };
      this.plan = plan;
      this.visible = visibleLayers(plan.meta.layers, this.currentZoom);
      this.notify();
      return { kind: 'applied', plan };
    } catch (err) {
      if (controller.signal.aborted) return { kind: 'superseded' };
      if (err instanceof RenderRejected) {
        return { kind: 'rejected', diagnostics: err.diagnostics };
      }
      return { kind: 'failed', message: String(err) };
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }
}
