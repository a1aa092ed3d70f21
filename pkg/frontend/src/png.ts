import { deflateSync } from "node:zlib";

import type { PlotSpec } from "./figure.js";
import { makeFrame, regionPolygon, styleFor, ticks } from "./figure.js";

/** Tiny RGBA raster with alpha-blended primitives; no text glyphs. */
class Raster {
  data: Uint8ClampedArray;

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.data = new Uint8ClampedArray(width * height * 4);
    this.data.fill(255);
  }

  blend(x: number, y: number, rgb: [number, number, number], alpha: number): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height || alpha <= 0) return;
    const i = (y * this.width + x) * 4;
    for (let c = 0; c < 3; c++) {
      this.data[i + c] = Math.round(rgb[c] * alpha + this.data[i + c] * (1 - alpha));
    }
    this.data[i + 3] = 255;
  }

  fillPolygon(points: [number, number][], rgb: [number, number, number], alpha: number): void {
    const ys = points.map((p) => p[1]);
    const y0 = Math.max(0, Math.floor(Math.min(...ys)));
    const y1 = Math.min(this.height - 1, Math.ceil(Math.max(...ys)));
    for (let y = y0; y <= y1; y++) {
      const crossings: number[] = [];
      for (let i = 0; i < points.length; i++) {
        const [ax, ay] = points[i];
        const [bx, by] = points[(i + 1) % points.length];
        if (ay <= y + 0.5 !== by <= y + 0.5) {
          crossings.push(ax + ((y + 0.5 - ay) / (by - ay)) * (bx - ax));
        }
      }
      crossings.sort((a, b) => a - b);
      for (let k = 0; k + 1 < crossings.length; k += 2) {
        const xa = Math.max(0, Math.round(crossings[k]));
        const xb = Math.min(this.width - 1, Math.round(crossings[k + 1]));
        for (let x = xa; x <= xb; x++) this.blend(x, y, rgb, alpha);
      }
    }
  }

  line(
    a: [number, number],
    b: [number, number],
    rgb: [number, number, number],
    width: number,
    dash?: [number, number],
  ): void {
    const dx = b[0] - a[0];
    const dy = b[1] - a[1];
    const len = Math.hypot(dx, dy);
    const steps = Math.max(1, Math.ceil(len * 2));
    const r = Math.max(width / 2, 0.5);
    for (let s = 0; s <= steps; s++) {
      const t = s / steps;
      if (dash) {
        const pos = (t * len) % (dash[0] + dash[1]);
        if (pos > dash[0]) continue;
      }
      const cx = a[0] + t * dx;
      const cy = a[1] + t * dy;
      for (let y = Math.floor(cy - r); y <= Math.ceil(cy + r); y++) {
        for (let x = Math.floor(cx - r); x <= Math.ceil(cx + r); x++) {
          const d = Math.hypot(x - cx, y - cy);
          if (d <= r) this.blend(x, y, rgb, 1.0);
          else if (d <= r + 1) this.blend(x, y, rgb, r + 1 - d);
        }
      }
    }
  }
}

function hexToRgb(hex: string): [number, number, number] {
  const v = parseInt(hex.slice(1), 16);
  return [(v >> 16) & 255, (v >> 8) & 255, v & 255];
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (const byte of buf) c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

function pngChunk(type: string, payload: Uint8Array): Buffer {
  const len = Buffer.alloc(4);
  len.writeUInt32BE(payload.length, 0);
  const body = Buffer.concat([Buffer.from(type, "ascii"), Buffer.from(payload)]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([len, body, crc]);
}

/** Encode an RGBA raster as an 8-bit truecolor+alpha PNG (filter 0 rows). */
export function encodePng(raster: Raster): Buffer {
  const { width, height, data } = raster;
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // RGBA
  const rows = Buffer.alloc(height * (width * 4 + 1));
  for (let y = 0; y < height; y++) {
    const off = y * (width * 4 + 1);
    rows[off] = 0;
    rows.set(data.subarray(y * width * 4, (y + 1) * width * 4), off + 1);
  }
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    pngChunk("IHDR", ihdr),
    pngChunk("IDAT", deflateSync(rows, { level: 9 })),
    pngChunk("IEND", new Uint8Array(0)),
  ]);
}

/** Rasterize the figure geometry (regions, boundaries, axes, ticks; no text). */
export function renderPng(spec: PlotSpec): Buffer {
  const f = makeFrame(spec);
  const raster = new Raster(spec.width, spec.height);
  spec.regions.forEach((region, i) => {
    const st = styleFor(region, i);
    raster.fillPolygon(regionPolygon(region, f), hexToRgb(st.fill), st.fillOpacity);
  });
  spec.regions.forEach((region, i) => {
    const st = styleFor(region, i);
    const dash: [number, number] | undefined = st.dash ? [6, 3] : undefined;
    const pts = region.vertices.map(([x, y]) => [f.toX(x), f.toY(y)] as [number, number]);
    for (let k = 0; k + 1 < pts.length; k++) {
      raster.line(pts[k], pts[k + 1], hexToRgb(st.stroke), st.strokeWidth, dash);
    }
  });
  const black: [number, number, number] = [0, 0, 0];
  raster.line([f.toX(0), f.toY(0)], [f.toX(f.xMax), f.toY(0)], black, 1);
  raster.line([f.toX(0), f.toY(0)], [f.toX(0), f.toY(f.yMax)], black, 1);
  for (const t of ticks(f.xMax)) {
    raster.line([f.toX(t), f.toY(0)], [f.toX(t), f.toY(0) + 5], black, 1);
  }
  for (const t of ticks(f.yMax)) {
    raster.line([f.toX(0), f.toY(t)], [f.toX(0) - 5, f.toY(t)], black, 1);
  }
  return encodePng(raster);
}
