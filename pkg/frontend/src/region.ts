import { readFileSync } from "node:fs";

/** One rate region as emitted by the biduct CLI (the payload of a region file). */
export interface RegionData {
  kind: string;
  channel: string;
  vertices: [number, number][];
  heuristic: boolean;
}

export class RegionParseError extends Error {}

function asNumberPair(v: unknown): [number, number] {
  if (!Array.isArray(v) || v.length !== 2 || typeof v[0] !== "number" || typeof v[1] !== "number") {
    throw new RegionParseError(`vertex ${JSON.stringify(v)} is not an [x, y] pair`);
  }
  return [v[0], v[1]];
}

/** Parse a region document; accepts both bare regions and {payload, sidecar} wrappers. */
export function parseRegion(text: string, source = "<string>"): RegionData {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new RegionParseError(`${source}: not valid JSON (${String(err)})`);
  }
  let body = doc as Record<string, unknown>;
  if (body && typeof body === "object" && "payload" in body) {
    body = body.payload as Record<string, unknown>;
  }
  if (!body || typeof body !== "object" || !("vertices" in body) || !("kind" in body)) {
    throw new RegionParseError(`${source}: missing region fields (kind, vertices)`);
  }
  const vertices = (body.vertices as unknown[]).map(asNumberPair);
  if (vertices.length === 0) {
    throw new RegionParseError(`${source}: empty vertex list`);
  }
  return {
    kind: String(body.kind),
    channel: String(body.channel ?? ""),
    vertices,
    heuristic: Boolean(body.heuristic),
  };
}

export function loadRegion(path: string): RegionData {
  return parseRegion(readFileSync(path, "utf-8"), path);
}
