// Thin client over the HTTP API. `fetchFn` is injectable for tests.

import type { Diagnostic, ExampleInfo, RenderPlan, ValidateResponse } from './types';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class RenderRejected extends Error {
  constructor(
    public readonly status: number,
    public readonly diagnostics: Diagnostic[],
  ) {
    super(`render rejected with HTTP ${status}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async validate(specText: string): Promise<ValidateResponse> {
    const res = await this.fetchFn(`${this.baseUrl}/api/validate`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: specText,
    });
    return (await res.json()) as ValidateResponse;
  }

  async render(specText: string, signal?: AbortSignal): Promise<RenderPlan> {
    const res = await this.fetchFn(`${this.baseUrl}/api/render`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ spec: specText, output: 'plan' }),
      signal,
    });
    if (!res.ok) {
      let diagnostics: Diagnostic[] = [];
      try {
        diagnostics = ((await res.json()) as { diagnostics?: Diagnostic[] }).diagnostics ?? [];
      } catch {
        // non-JSON error body: keep the status alone
      }
      throw new RenderRejected(res.status, diagnostics);
    }
    return (await res.json()) as RenderPlan;
  }

  async examples(): Promise<ExampleInfo[]> {
    const res = await this.fetchFn(`${this.baseUrl}/api/examples`);
    return (await res.json()) as ExampleInfo[];
  }

  async exampleSpec(name: string): Promise<string> {
    const res = await this.fetchFn(`${this.baseUrl}/api/examples/${encodeURIComponent(name)}`);
    const body = (await res.json()) as { spec: string };
    return body.spec;
  }
}
