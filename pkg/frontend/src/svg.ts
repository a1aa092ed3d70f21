import type { PlotSpec } from "./figure.js";
import { MARGIN, makeFrame, regionPolygon, styleFor, ticks } from "./figure.js";

/** Fixed-precision coordinate formatting keeps the output structurally comparable. */
export function fmt(v: number): string {
  const s = v.toFixed(6);
  return s === "-0.000000" ? "0.000000" : s;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function polyline(points: [number, number][]): string {
  return points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
}

/** Render the figure to an SVG string (pure: same spec, same bytes). */
export function renderSvg(spec: PlotSpec): string {
  const f = makeFrame(spec);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${spec.width}" height="${spec.height}" ` +
      `viewBox="0 0 ${spec.width} ${spec.height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${spec.width}" height="${spec.height}" fill="white"/>`);

  // region fills, then strokes on top so nested boundaries stay visible
  spec.regions.forEach((region, i) => {
    const st = styleFor(region, i);
    const poly = polyline(regionPolygon(region, f));
    parts.push(
      `<polygon class="region-fill" points="${poly}" fill="${st.fill}" ` +
        `fill-opacity="${st.fillOpacity}" stroke="none"/>`,
    );
  });
  spec.regions.forEach((region, i) => {
    const st = styleFor(region, i);
    const pts = region.vertices.map(([x, y]) => [f.toX(x), f.toY(y)] as [number, number]);
    const dash = st.dash ? ` stroke-dasharray="${st.dash}"` : "";
    parts.push(
      `<polyline class="region-boundary" points="${polyline(pts)}" fill="none" ` +
        `stroke="${st.stroke}" stroke-width="${st.strokeWidth}"${dash} ` +
        `stroke-linejoin="round" stroke-linecap="round"/>`,
    );
    // axis endpoints, as in tradeoff-curve figures
    const first = region.vertices[0];
    const last = region.vertices[region.vertices.length - 1];
    for (const [x, y] of [first, last]) {
      parts.push(
        `<circle class="endpoint" cx="${fmt(f.toX(x))}" cy="${fmt(f.toY(y))}" r="3" ` +
          `fill="${st.stroke}"/>`,
      );
    }
  });

  // axes
  const x0 = fmt(f.toX(0));
  const y0 = fmt(f.toY(0));
  parts.push(
    `<line class="axis" x1="${x0}" y1="${y0}" x2="${fmt(f.toX(f.xMax))}" y2="${y0}" ` +
      `stroke="black" stroke-width="1"/>`,
  );
  parts.push(
    `<line class="axis" x1="${x0}" y1="${y0}" x2="${x0}" y2="${fmt(f.toY(f.yMax))}" ` +
      `stroke="black" stroke-width="1"/>`,
  );
  for (const t of ticks(f.xMax)) {
    const px = fmt(f.toX(t));
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${fmt(f.toY(0) + 5)}" stroke="black" stroke-width="1"/>`);
    parts.push(
      `<text x="${px}" y="${fmt(f.toY(0) + 18)}" font-size="11" text-anchor="middle">${t}</text>`,
    );
  }
  for (const t of ticks(f.yMax)) {
    const py = fmt(f.toY(t));
    parts.push(`<line x1="${x0}" y1="${py}" x2="${fmt(f.toX(0) - 5)}" y2="${py}" stroke="black" stroke-width="1"/>`);
    parts.push(
      `<text x="${fmt(f.toX(0) - 8)}" y="${fmt(f.toY(t) + 4)}" font-size="11" text-anchor="end">${t}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt(MARGIN.left + f.plotW / 2)}" y="${spec.height - 8}" font-size="13" ` +
      `text-anchor="middle">${esc(spec.axisX)}</text>`,
  );
  parts.push(
    `<text x="14" y="${fmt(MARGIN.top + f.plotH / 2)}" font-size="13" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${fmt(MARGIN.top + f.plotH / 2)})">${esc(spec.axisY)}</text>`,
  );

  // legend, top right inside the plot area
  const lx = MARGIN.left + f.plotW - 150;
  let ly = MARGIN.top + 10;
  parts.push(`<g class="legend">`);
  spec.regions.forEach((region, i) => {
    const st = styleFor(region, i);
    const dash = st.dash ? ` stroke-dasharray="${st.dash}"` : "";
    parts.push(
      `<line x1="${fmt(lx)}" y1="${fmt(ly)}" x2="${fmt(lx + 26)}" y2="${fmt(ly)}" ` +
        `stroke="${st.stroke}" stroke-width="${st.strokeWidth}"${dash}/>`,
    );
    parts.push(
      `<text x="${fmt(lx + 32)}" y="${fmt(ly + 4)}" font-size="12">${esc(spec.labels[i])}</text>`,
    );
    ly += 18;
  });
  parts.push(`</g>`);
  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}
