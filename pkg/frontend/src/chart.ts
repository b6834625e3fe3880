// Minimal embedded-chart runtime for chart anchors.
//
// Executes a practical subset of the embedded chart grammar (Vega-Lite
// JSON): mark bar | line | point | arc, with the element's injected
// aggregates as the data rows when the spec carries no inline data.  The
// engine treats chart documents as opaque; this is where they run.
// Charts draw upright regardless of anchor orientation, which is kept as a
// data attribute by the map view.

export class ChartError extends Error {}

export interface ChartDatum {
  [key: string]: unknown;
}

const PALETTE = ['#3182bd', '#e6550d', '#31a354', '#756bb1', '#636363', '#de9ed6'];

const DEFAULT_WIDTH = 60;
const DEFAULT_HEIGHT = 40;

function esc(value: string): string {
  return value
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function markType(spec: Record<string, unknown>): string {
  const mark = spec['mark'];
  if (typeof mark === 'string') return mark;
  if (mark && typeof mark === 'object' && typeof (mark as ChartDatum)['type'] === 'string') {
    return (mark as { type: string }).type;
  }
  throw new ChartError('chart spec has no mark');
}

function encodingField(spec: Record<string, unknown>, channel: string): string | null {
  const enc = spec['encoding'];
  if (!enc || typeof enc !== 'object') return null;
  const ch = (enc as ChartDatum)[channel];
  if (!ch || typeof ch !== 'object') return null;
  const field = (ch as ChartDatum)['field'];
  return typeof field === 'string' ? field : null;
}

function dataRows(
  spec: Record<string, unknown>,
  injected: Record<string, number>,
): ChartDatum[] {
  const data = spec['data'];
  if (data && typeof data === 'object' && Array.isArray((data as ChartDatum)['values'])) {
    return (data as { values: ChartDatum[] }).values;
  }
  // Inject the element's aggregates as {field, value} rows.
  return Object.entries(injected).map(([field, value]) => ({ field, value }));
}

function numericColumn(rows: ChartDatum[], field: string): number[] {
  return rows.map((row) => {
    const v = row[field];
    if (typeof v !== 'number' || !Number.isFinite(v)) {
      throw new ChartError(`field ${field} is not numeric in chart data`);
    }
    return v;
  });
}

function labelColumn(rows: ChartDatum[], field: string | null): string[] {
  return rows.map((row, i) => (field && row[field] !== undefined ? String(row[field]) : String(i)));
}

export interface ChartSize {
  width: number;
  height: number;
}

export function chartSize(spec: Record<string, unknown>): ChartSize {
  const w = typeof spec['width'] === 'number' ? (spec['width'] as number) : DEFAULT_WIDTH;
  const h = typeof spec['height'] === 'number' ? (spec['height'] as number) : DEFAULT_HEIGHT;
  return { width: w, height: h };
}

/**
 * Render the chart to an SVG fragment (a `<g>` whose origin is the chart's
 * top-left corner).  Throws ChartError on specs outside the supported
 * subset; callers show the placeholder marker instead.
 */
export function renderChartSvg(
  spec: Record<string, unknown>,
  injected: Record<string, number>,
): string {
  if (!spec || typeof spec !== 'object') throw new ChartError('chart spec must be an object');
  const mark = markType(spec);
  const { width, height } = chartSize(spec);
  const rows = dataRows(spec, injected);
  if (rows.length === 0) throw new ChartError('chart has no data rows');

  const yField = encodingField(spec, 'y') ?? encodingField(spec, 'theta') ?? 'value';
  const xField = encodingField(spec, 'x');
  const values = numericColumn(rows, yField);
  const labels = labelColumn(rows, xField);

  const parts: string[] = [
    `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff" fill-opacity="0.9" stroke="#999999" stroke-width="0.5"/>`,
  ];
  if (mark === 'bar') {
    const max = Math.max(...values.map((v) => Math.abs(v)), 1e-9);
    const bw = width / values.length;
    values.forEach((v, i) => {
      const h = (Math.abs(v) / max) * (height - 4);
      const color = PALETTE[i % PALETTE.length] ?? '#3182bd';
      parts.push(
        `<rect x="${(i * bw + 1).toFixed(2)}" y="${(height - 2 - h).toFixed(2)}" ` +
          `width="${Math.max(bw - 2, 0.5).toFixed(2)}" height="${h.toFixed(2)}" fill="${color}">` +
          `<title>${esc(labels[i] ?? String(i))}: ${v}</title></rect>`,
      );
    });
  } else if (mark === 'line' || mark === 'point') {
    const max = Math.max(...values, 1e-9);
    const min = Math.min(...values, 0);
    const span = max - min || 1;
    const step = values.length > 1 ? width / (values.length - 1) : 0;
    const pts = values.map((v, i) => {
      const x = values.length > 1 ? i * step : width / 2;
      const y = height - 2 - ((v - min) / span) * (height - 4);
      return [x, y] as const;
    });
    if (mark === 'line') {
      const d = pts.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(' ');
      parts.push(`<polyline points="${d}" fill="none" stroke="#3182bd" stroke-width="1.5"/>`);
    }
    pts.forEach(([x, y], i) => {
      parts.push(
        `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="1.8" fill="#3182bd">` +
          `<title>${esc(labels[i] ?? String(i))}: ${values[i]}</title></circle>`,
      );
    });
  } else if (mark === 'arc') {
    const total = values.reduce((acc, v) => acc + Math.abs(v), 0);
    if (total <= 0) throw new ChartError('arc chart needs positive values');
    const cx = width / 2;
    const cy = height / 2;
    const r = Math.min(width, height) / 2 - 2;
    let angle = -Math.PI / 2;
    values.forEach((v, i) => {
      const sweep = (Math.abs(v) / total) * 2 * Math.PI;
      const x0 = cx + r * Math.cos(angle);
      const y0 = cy + r * Math.sin(angle);
      const x1 = cx + r * Math.cos(angle + sweep);
      const y1 = cy + r * Math.sin(angle + sweep);
      const large = sweep > Math.PI ? 1 : 0;
      const color = PALETTE[i % PALETTE.length] ?? '#3182bd';
      parts.push(
        `<path d="M${cx.toFixed(2)} ${cy.toFixed(2)} L${x0.toFixed(2)} ${y0.toFixed(2)} ` +
          `A${r.toFixed(2)} ${r.toFixed(2)} 0 ${large} 1 ${x1.toFixed(2)} ${y1.toFixed(2)} Z" fill="${color}">` +
          `<title>${esc(labels[i] ?? String(i))}: ${values[i]}</title></path>`,
      );
      angle += sweep;
    });
  } else {
    throw new ChartError(`unsupported mark ${mark}`);
  }
  return `<g class="mini-chart">${parts.join('')}</g>`;
}
