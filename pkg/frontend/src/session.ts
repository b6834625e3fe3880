// Editor session: spec text, live diagnostics (debounced), dirty tracking.
// The map must never render a spec that has error diagnostics; applySpec in
// overlay.ts re-checks before posting.

import type { ApiClient } from './api';
import type { Diagnostic } from './types';

export const VALIDATE_DEBOUNCE_MS = 400;

type Scheduler = (fn: () => void, ms: number) => ReturnType<typeof setTimeout>;

export class EditorSession {
  specText = '';
  diagnostics: Diagnostic[] = [];
  dirty = false;

  private timer: ReturnType<typeof setTimeout> | null = null;
  private generation = 0;
  private listeners: (() => void)[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly schedule: Scheduler = (fn, ms) => setTimeout(fn, ms),
    private readonly cancel: (t: ReturnType<typeof setTimeout>) => void = clearTimeout,
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  hasErrors(): boolean {
    return this.diagnostics.some((d) => d.severity === 'error');
  }

  /** Update the text and schedule a debounced validation. */
  edit(text: string): void {
    this.specText = text;
    this.dirty = true;
    if (this.timer !== null) this.cancel(this.timer);
    this.timer = this.schedule(() => {
      this.timer = null;
      void this.validateNow();
    }, VALIDATE_DEBOUNCE_MS);
    this.notify();
  }

  /** Replace the text (gallery load) and validate immediately. */
  async load(text: string): Promise<void> {
    this.specText = text;
    this.dirty = false;
    if (this.timer !== null) {
      this.cancel(this.timer);
      this.timer = null;
    }
    await this.validateNow();
  }

  async validateNow(): Promise<Diagnostic[]> {
    const generation = ++this.generation;
    let diagnostics: Diagnostic[];
    try {
      diagnostics = (await this.api.validate(this.specText)).diagnostics;
    } catch (err) {
      diagnostics = [
        { severity: 'error', path: '$', message: `validation service unreachable: ${String(err)}` },
      ];
    }
    if (generation === this.generation) {
      this.diagnostics = diagnostics;
      this.notify();
    }
    return diagnostics;
  }
}
