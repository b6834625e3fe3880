// Wire types mirroring schema/renderplan.schema.json and the diagnostics
// format served by /api/validate.

export interface Diagnostic {
  severity: 'error' | 'warning';
  path: string;
  message: string;
}

export interface PrimitiveStyle {
  color: string; // #rrggbbaa
  widthPx: number;
  heightPx: number;
  opacity: number;
  dash: [number, number] | null;
  squiggle: { amplitudePx: number; wavelengthPx: number } | null;
}

export type LonLat = [number, number];

export interface RenderPrimitive {
  kind: 'polyline' | 'rect' | 'path' | 'circle' | 'chartAnchor';
  layer: number;
  sourceId: string;
  zOrder: number;
  style: PrimitiveStyle;
  coordinates?: LonLat[];
  anchor?: LonLat;
  radiusPx?: number;
  alongPx?: number;
  acrossPx?: number;
  rotationDeg?: number;
  orientationDeg?: number;
  alignment?: 'left' | 'center' | 'right';
  chart?: Record<string, unknown>;
  values?: Record<string, number>;
}

export interface LayerMeta {
  layer: number;
  type: 'segment' | 'node' | 'point';
  method: 'line' | 'rect' | 'matrix';
  orientation: 'parallel' | 'perpendicular';
  alignment: 'left' | 'center' | 'right';
  zoom: [number, number];
}

export interface RenderPlan {
  version: 1;
  bbox: [number, number, number, number]; // minLon, minLat, maxLon, maxLat
  map: { streetColor: string; streetWidth: number; background: 'light' | 'dark' };
  streets: { id: string; coordinates: LonLat[] }[];
  primitives: RenderPrimitive[];
  meta: {
    specHash: string;
    unitBindings: { unit: number; data: number; relation: Record<string, unknown> }[];
    layers: LayerMeta[];
    warnings: string[];
    nominalZoom: number;
  };
}

export interface ValidateResponse {
  ok: boolean;
  diagnostics: Diagnostic[];
}

export interface ExampleInfo {
  name: string;
  title: string;
}
