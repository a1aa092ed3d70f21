import type { RegionData } from "./region.js";

/** Everything needed to draw one figure. */
export interface PlotSpec {
  regions: RegionData[];
  labels: string[];
  axisX: string;
  axisY: string;
  width: number;
  height: number;
}

export interface PlotOptions {
  labels?: string[];
  axisX?: string;
  axisY?: string;
  width?: number;
  height?: number;
}

export function makeSpec(regions: RegionData[], opts: PlotOptions = {}): PlotSpec {
  if (regions.length === 0) {
    throw new Error("need at least one region to plot");
  }
  const labels = opts.labels ?? regions.map((r) => r.kind.toLowerCase());
  if (labels.length !== regions.length) {
    throw new Error(`got ${labels.length} labels for ${regions.length} regions`);
  }
  return {
    regions,
    labels,
    axisX: opts.axisX ?? "R⇒",
    axisY: opts.axisY ?? "R⇐",
    width: opts.width ?? 480,
    height: opts.height ?? 360,
  };
}

export const MARGIN = { left: 62, right: 16, top: 16, bottom: 48 };

export interface Frame {
  xMax: number;
  yMax: number;
  plotW: number;
  plotH: number;
  toX(x: number): number;
  toY(y: number): number;
}

/** Data-to-pixel mapping; ranges always include the origin plus a 5% margin. */
export function makeFrame(spec: PlotSpec): Frame {
  let xMax = 0;
  let yMax = 0;
  for (const r of spec.regions) {
    for (const [x, y] of r.vertices) {
      xMax = Math.max(xMax, x);
      yMax = Math.max(yMax, y);
    }
  }
  xMax = (xMax > 0 ? xMax : 1) * 1.05;
  yMax = (yMax > 0 ? yMax : 1) * 1.05;
  const plotW = spec.width - MARGIN.left - MARGIN.right;
  const plotH = spec.height - MARGIN.top - MARGIN.bottom;
  return {
    xMax,
    yMax,
    plotW,
    plotH,
    toX: (x) => MARGIN.left + (x / xMax) * plotW,
    toY: (y) => MARGIN.top + plotH - (y / yMax) * plotH,
  };
}

/** Round ticks covering [0, max]; at most six, anchored at zero. */
export function ticks(max: number): number[] {
  const raw = max / 5;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => max / s <= 5.5) ?? 10 * mag;
  const out: number[] = [];
  for (let v = 0; v <= max + 1e-12; v += step) {
    out.push(Number(v.toFixed(10)));
  }
  return out;
}

/** Closed polygon (pixel coordinates) for a region: boundary plus the two axes. */
export function regionPolygon(r: RegionData, f: Frame): [number, number][] {
  const pts: [number, number][] = [[f.toX(0), f.toY(0)]];
  const first = r.vertices[0];
  if (first[0] > 0) {
    pts.push([f.toX(0), f.toY(first[1])]);
  }
  for (const [x, y] of r.vertices) {
    pts.push([f.toX(x), f.toY(y)]);
  }
  const last = r.vertices[r.vertices.length - 1];
  if (last[1] > 0) {
    pts.push([f.toX(last[0]), f.toY(0)]);
  }
  return pts;
}

export interface Style {
  stroke: string;
  strokeWidth: number;
  fill: string;
  fillOpacity: number;
  dash?: string;
}

const PALETTE = ["#1f4e8c", "#b13d3d", "#3d7a46", "#8c6d1f", "#5d3d8c", "#3d8c85"];

/** Outer bounds are drawn thin (and dashed when heuristic), inner bounds thick. */
export function styleFor(region: RegionData, index: number): Style {
  const color = PALETTE[index % PALETTE.length];
  const outer = region.kind.toUpperCase().includes("OUTER");
  return {
    stroke: color,
    strokeWidth: outer ? 1.2 : 2.6,
    fill: color,
    fillOpacity: outer ? 0.06 : 0.14,
    dash: outer && region.heuristic ? "6 3" : undefined,
  };
}
