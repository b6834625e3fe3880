// The authoring loop end to end against a simulated service: load a bundled
// scenario, edit one grammar field, apply, and watch the overlay update —
// all without any page reload.  Error specs never replace the overlay, and
// chart anchors execute as mini-charts.

import { readFileSync } from 'node:fs';
import { join } from 'node:path';

import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { planToSvg } from '../src/mapview';
import { OverlayState, visibleLayers } from '../src/overlay';
import { EditorSession } from '../src/session';
import type { RenderPlan } from '../src/types';

const PLAN_PERP: RenderPlan = JSON.parse(
  readFileSync(join(__dirname, 'fixtures', 'scenario3_plan.json'), 'utf-8'),
);

// The parallel variant of the same scenario: same styles, different geometry.
const PLAN_PAR: RenderPlan = JSON.parse(JSON.stringify(PLAN_PERP));
PLAN_PAR.meta.specHash = 'f'.repeat(64);
for (const layer of PLAN_PAR.meta.layers) layer.orientation = 'parallel';

const SCENARIO_SPEC = JSON.stringify({
  map: [{}],
  unit: [
    { type: 'node', chart: { mark: 'bar' } },
    { type: 'segment', orientation: 'perpendicular', height: { field: 'requests' } },
  ],
  data: [{ physical: 'grid.geojson', thematic: { path: 'requests.csv' } }],
  relation: { spatial: 'contains', value: 15, aggregation: 'sum' },
});

function fakeService() {
  const fetchFn = async (url: string, init?: RequestInit) => {
    const body = String(init?.body ?? '');
    if (url.endsWith('/api/validate')) {
      const ok = !body.includes('"type":"edge"') && !body.includes('"type": "edge"');
      const diagnostics = ok
        ? []
        : [{ severity: 'error', path: 'unit[1].type', message: "invalid value 'edge'; allowed: segment, node, point" }];
      return new Response(JSON.stringify({ ok, diagnostics }), { status: 200 });
    }
    if (url.endsWith('/api/render')) {
      const payload = JSON.parse(body) as { spec: string };
      if (payload.spec.includes('"edge"')) {
        return new Response(
          JSON.stringify({ diagnostics: [{ severity: 'error', path: 'unit[1].type', message: 'invalid' }] }),
          { status: 400 },
        );
      }
      const plan = payload.spec.includes('"parallel"') ? PLAN_PAR : PLAN_PERP;
      return new Response(JSON.stringify(plan), { status: 200 });
    }
    if (url.endsWith('/api/examples/scenario3')) {
      return new Response(JSON.stringify({ spec: SCENARIO_SPEC }), { status: 200 });
    }
    throw new Error(`unexpected ${url}`);
  };
  return new ApiClient('', fetchFn);
}

describe('authoring loop', () => {
  it('load scenario -> apply -> edit one field -> apply updates the overlay', async () => {
    const api = fakeService();
    const session = new EditorSession(api);
    const overlay = new OverlayState(api);
    overlay.setZoom(16);

    // load the bundled scenario from the gallery
    await session.load(await api.exampleSpec('scenario3'));
    expect(session.hasErrors()).toBe(false);

    // first apply
    expect((await overlay.applySpec(session.specText)).kind).toBe('applied');
    const firstHash = overlay.plan!.meta.specHash;
    expect(overlay.plan!.meta.layers[1]!.orientation).toBe('perpendicular');

    // edit exactly one grammar field: orientation perpendicular -> parallel
    const edited = session.specText.replace('"perpendicular"', '"parallel"');
    await session.load(edited);
    expect(session.hasErrors()).toBe(false);
    expect((await overlay.applySpec(session.specText)).kind).toBe('applied');
    expect(overlay.plan!.meta.specHash).not.toBe(firstHash);
    expect(overlay.plan!.meta.layers[1]!.orientation).toBe('parallel');
  });

  it('error specs never replace the current overlay', async () => {
    const api = fakeService();
    const session = new EditorSession(api);
    const overlay = new OverlayState(api);
    overlay.setZoom(16);

    await session.load(SCENARIO_SPEC);
    await overlay.applySpec(session.specText);
    const good = overlay.plan;

    const broken = SCENARIO_SPEC.replace('"segment"', '"edge"');
    await session.load(broken);
    expect(session.hasErrors()).toBe(true);
    // the UI gate: with error diagnostics, apply is never posted
    if (!session.hasErrors()) await overlay.applySpec(session.specText);
    expect(overlay.plan).toBe(good);

    // even posting directly, a 400 leaves the overlay alone
    const outcome = await overlay.applySpec(broken);
    expect(outcome.kind).toBe('rejected');
    expect(overlay.plan).toBe(good);
  });

  it('chart anchors render as mini-charts in the overlay markup', async () => {
    const api = fakeService();
    const overlay = new OverlayState(api);
    overlay.setZoom(16);
    await overlay.applySpec(SCENARIO_SPEC);
    const svg = planToSvg(
      overlay.plan!,
      { centerLon: -87.632, centerLat: 41.88, zoom: 16, widthPx: 900, heightPx: 700 },
      visibleLayers(overlay.plan!.meta.layers, overlay.currentZoom),
    );
    const anchorCount = overlay.plan!.primitives.filter((p) => p.kind === 'chartAnchor').length;
    expect(anchorCount).toBeGreaterThan(0);
    expect(svg.match(/class="mini-chart"/g)!.length).toBe(anchorCount);
  });
});
