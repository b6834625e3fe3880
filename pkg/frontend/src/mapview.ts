// Map view: pan/zoom viewport math and render-plan -> SVG markup.
// Rendering is a pure function of (plan, viewport, visible layers), so
// pan/zoom only re-projects; it never re-requests the plan.

import { ChartError, chartSize, renderChartSvg } from './chart';
import type { RenderPlan, RenderPrimitive } from './types';

const EARTH_RADIUS_M = 6371008.8;

export interface Viewport {
  centerLon: number;
  centerLat: number;
  zoom: number;
  widthPx: number;
  heightPx: number;
}

export function metersPerPixel(lat: number, zoom: number): number {
  return (2 * Math.PI * EARTH_RADIUS_M * Math.cos((lat * Math.PI) / 180)) / (256 * 2 ** zoom);
}

export function geoToScreen(lon: number, lat: number, vp: Viewport): [number, number] {
  const k = Math.cos((vp.centerLat * Math.PI) / 180);
  const xm = EARTH_RADIUS_M * (((lon - vp.centerLon) * Math.PI) / 180) * k;
  const ym = EARTH_RADIUS_M * (((lat - vp.centerLat) * Math.PI) / 180);
  const mpp = metersPerPixel(vp.centerLat, vp.zoom);
  return [vp.widthPx / 2 + xm / mpp, vp.heightPx / 2 - ym / mpp];
}

export function panViewport(vp: Viewport, dxPx: number, dyPx: number): Viewport {
  const mpp = metersPerPixel(vp.centerLat, vp.zoom);
  const k = Math.cos((vp.centerLat * Math.PI) / 180);
  const dLon = ((-dxPx * mpp) / (EARTH_RADIUS_M * k)) * (180 / Math.PI);
  const dLat = ((dyPx * mpp) / EARTH_RADIUS_M) * (180 / Math.PI);
  return { ...vp, centerLon: vp.centerLon + dLon, centerLat: vp.centerLat + dLat };
}

/** Viewport centered on the plan bbox at the largest integer zoom that fits. */
export function fitViewport(
  bbox: [number, number, number, number],
  widthPx: number,
  heightPx: number,
): Viewport {
  const [minLon, minLat, maxLon, maxLat] = bbox;
  const centerLon = (minLon + maxLon) / 2;
  const centerLat = (minLat + maxLat) / 2;
  const k = Math.cos((centerLat * Math.PI) / 180);
  const spanXm = EARTH_RADIUS_M * (((maxLon - minLon) * Math.PI) / 180) * k;
  const spanYm = EARTH_RADIUS_M * (((maxLat - minLat) * Math.PI) / 180);
  let zoom = 22;
  while (zoom > 0) {
    const mpp = metersPerPixel(centerLat, zoom);
    if (spanXm / mpp <= widthPx * 0.9 && spanYm / mpp <= heightPx * 0.9) break;
    zoom -= 1;
  }
  return { centerLon, centerLat, zoom, widthPx, heightPx };
}

function splitRgba(color: string): { rgb: string; alpha: number } {
  if (color.length === 9 && color.startsWith('#')) {
    return { rgb: color.slice(0, 7), alpha: parseInt(color.slice(7, 9), 16) / 255 };
  }
  return { rgb: color, alpha: 1 };
}

function strokeAttrs(prim: RenderPrimitive): string {
  const { rgb, alpha } = splitRgba(prim.style.color);
  let attrs = `stroke="${rgb}" stroke-width="${prim.style.widthPx}" stroke-opacity="${(
    alpha * prim.style.opacity
  ).toFixed(4)}" fill="none"`;
  if (prim.style.dash) attrs += ` stroke-dasharray="${prim.style.dash[0]} ${prim.style.dash[1]}"`;
  return attrs;
}

function fillAttrs(prim: RenderPrimitive): string {
  const { rgb, alpha } = splitRgba(prim.style.color);
  return `fill="${rgb}" fill-opacity="${(alpha * prim.style.opacity).toFixed(4)}"`;
}

function pointsAttr(coords: [number, number][], vp: Viewport): string {
  return coords
    .map(([lon, lat]) => {
      const [x, y] = geoToScreen(lon, lat, vp);
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(' ');
}

function chartAnchorSvg(prim: RenderPrimitive, x: number, y: number): string {
  const meta =
    `data-source="${prim.sourceId}" data-orientation="${prim.orientationDeg ?? 0}" ` +
    `data-alignment="${prim.alignment ?? 'center'}"`;
  try {
    const inner = renderChartSvg(prim.chart ?? {}, prim.values ?? {});
    const { width, height } = chartSize(prim.chart ?? {});
    return (
      `<g class="chart-anchor" transform="translate(${(x - width / 2).toFixed(2)} ` +
      `${(y - height / 2).toFixed(2)})" ${meta}>${inner}</g>`
    );
  } catch (err) {
    const message = err instanceof ChartError ? err.message : String(err);
    // placeholder marker with a tooltip error; other layers are unaffected
    return (
      `<g class="chart-anchor chart-anchor-error" transform="translate(${x.toFixed(2)} ${y.toFixed(2)})" ${meta}>` +
      `<title>embedded chart failed: ${message.replace(/&/g, '&amp;').replace(/</g, '&lt;')}</title>` +
      `<circle r="6" fill="#fee" stroke="#c00"/>` +
      `<text y="3.5" text-anchor="middle" font-size="9" fill="#c00">!</text></g>`
    );
  }
}

export function primitiveSvg(prim: RenderPrimitive, vp: Viewport): string {
  if (prim.kind === 'polyline' && prim.coordinates) {
    return `<polyline points="${pointsAttr(prim.coordinates, vp)}" ${strokeAttrs(prim)}/>`;
  }
  if (prim.kind === 'path' && prim.coordinates) {
    const d = prim.coordinates
      .map(([lon, lat], i) => {
        const [x, y] = geoToScreen(lon, lat, vp);
        return `${i === 0 ? 'M' : 'L'}${x.toFixed(2)} ${y.toFixed(2)}`;
      })
      .join(' ');
    return `<path d="${d}" ${strokeAttrs(prim)}/>`;
  }
  if (prim.kind === 'circle' && prim.anchor) {
    const [x, y] = geoToScreen(prim.anchor[0], prim.anchor[1], vp);
    return `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${prim.radiusPx ?? 2}" ${fillAttrs(prim)}/>`;
  }
  if (prim.kind === 'rect' && prim.anchor) {
    const [x, y] = geoToScreen(prim.anchor[0], prim.anchor[1], vp);
    const w = prim.alongPx ?? 4;
    const h = prim.acrossPx ?? 4;
    const rot = ((prim.rotationDeg ?? 90) - 90 + 360) % 360;
    return (
      `<rect x="${(x - w / 2).toFixed(2)}" y="${(y - h / 2).toFixed(2)}" width="${w}" height="${h}" ` +
      `transform="rotate(${rot.toFixed(2)} ${x.toFixed(2)} ${y.toFixed(2)})" ${fillAttrs(prim)}/>`
    );
  }
  if (prim.kind === 'chartAnchor' && prim.anchor) {
    const [x, y] = geoToScreen(prim.anchor[0], prim.anchor[1], vp);
    return chartAnchorSvg(prim, x, y);
  }
  return '';
}

/** Full overlay markup: base streets first, then visible layers in z-order. */
export function planToSvg(plan: RenderPlan, vp: Viewport, visible: Set<number>): string {
  const parts: string[] = [];
  const bg = plan.map.background === 'dark' ? '#1a1a1a' : '#fcfcfc';
  parts.push(`<rect width="${vp.widthPx}" height="${vp.heightPx}" fill="${bg}"/>`);
  parts.push(
    `<g id="streets" fill="none" stroke="${plan.map.streetColor}" stroke-width="${plan.map.streetWidth}" stroke-linecap="round">`,
  );
  for (const street of plan.streets) {
    parts.push(`<polyline points="${pointsAttr(street.coordinates, vp)}"/>`);
  }
  parts.push('</g>');

  const byLayer = new Map<number, RenderPrimitive[]>();
  for (const prim of plan.primitives) {
    if (!byLayer.has(prim.layer)) byLayer.set(prim.layer, []);
    byLayer.get(prim.layer)!.push(prim);
  }
  for (const layer of [...byLayer.keys()].sort((a, b) => a - b)) {
    if (!visible.has(layer)) continue;
    parts.push(`<g id="layer-${layer}">`);
    for (const prim of byLayer.get(layer)!) parts.push(primitiveSvg(prim, vp));
    parts.push('</g>');
  }
  return parts.join('\n');
}
