#!/usr/bin/env node
import { writeFileSync } from "node:fs";

import { makeSpec } from "./figure.js";
import { renderPng } from "./png.js";
import { loadRegion, RegionParseError } from "./region.js";
import { renderSvg } from "./svg.js";

const USAGE = `usage: biduct-plot --regions file[,file...] [--labels a,b] [--out fig.svg]
                   [--format svg|png] [--axis-x caption] [--axis-y caption]`;

interface Args {
  regions: string[];
  labels?: string[];
  out: string;
  format: "svg" | "png";
  axisX?: string;
  axisY?: string;
}

export function parseArgs(argv: string[]): Args {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (!key.startsWith("--") || val === undefined) {
      throw new Error(`bad argument ${key}\n${USAGE}`);
    }
    flags.set(key.slice(2), val);
  }
  const regions = flags.get("regions");
  if (!regions) {
    throw new Error(`--regions is required\n${USAGE}`);
  }
  const format = (flags.get("format") ?? "svg") as Args["format"];
  if (format !== "svg" && format !== "png") {
    throw new Error(`unknown format ${format}`);
  }
  return {
    regions: regions.split(",").map((s) => s.trim()),
    labels: flags.get("labels")?.split(",").map((s) => s.trim()),
    out: flags.get("out") ?? `figure.${format}`,
    format,
    axisX: flags.get("axis-x"),
    axisY: flags.get("axis-y"),
  };
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  let regions;
  try {
    regions = args.regions.map(loadRegion);
  } catch (err) {
    const msg = err instanceof Error ? err.message : String(err);
    console.error(`region error: ${msg}`);
    return 2;
  }
  try {
    const spec = makeSpec(regions, {
      labels: args.labels,
      axisX: args.axisX,
      axisY: args.axisY,
    });
    if (args.format === "svg") {
      writeFileSync(args.out, renderSvg(spec));
    } else {
      writeFileSync(args.out, renderPng(spec));
    }
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof RegionParseError) {
      console.error(`region error: ${err.message}`);
      return 2;
    }
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "")) {
  process.exit(run(process.argv.slice(2)));
}
