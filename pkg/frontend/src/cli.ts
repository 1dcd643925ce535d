#!/usr/bin/env node
/**
 * plot --kind heatmap|convergence|rank|variance|frame|slice
 *      --in <dir> --out <file.svg|file.png> [--semilog] [--n <N>]
 *
 * Reads the vqa-lab CSV exports from --in and writes one figure.  The output
 * format follows the --out extension; identical inputs produce identical
 * bytes.
 */

import { writeFileSync } from "fs";

import { buildFigure, PlotKind } from "./plots";
import { sceneToPng } from "./raster";
import { sceneToSvg } from "./svg";

const KINDS: PlotKind[] = ["heatmap", "convergence", "rank", "variance", "frame", "slice"];
const USAGE =
  "usage: plot --kind heatmap|convergence|rank|variance|frame|slice " +
  "--in <dir> --out <file.svg|file.png> [--semilog] [--n <N>]";

interface Args {
  kind: PlotKind;
  inDir: string;
  out: string;
  semilog: boolean;
  n?: number;
}

export function parseArgs(argv: string[]): Args {
  let kind: string | undefined;
  let inDir: string | undefined;
  let out: string | undefined;
  let semilog = false;
  let n: number | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i++;
      if (i >= argv.length) throw new Error(`${arg} needs a value\n${USAGE}`);
      return argv[i];
    };
    if (arg === "--kind") kind = next();
    else if (arg === "--in") inDir = next();
    else if (arg === "--out") out = next();
    else if (arg === "--semilog") semilog = true;
    else if (arg === "--n") n = Number(next());
    else if (arg === "--help" || arg === "-h") throw new Error(USAGE);
    else throw new Error(`unknown argument ${arg}\n${USAGE}`);
  }
  if (!kind || !inDir || !out) throw new Error(USAGE);
  if (!KINDS.includes(kind as PlotKind)) {
    throw new Error(`unknown kind '${kind}' (choose from ${KINDS.join(", ")})`);
  }
  if (!out.endsWith(".svg") && !out.endsWith(".png")) {
    throw new Error(`--out must end in .svg or .png, got ${out}`);
  }
  return { kind: kind as PlotKind, inDir, out, semilog, n };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const { scene, warnings } = buildFigure(args.kind, args.inDir, {
      n: args.n,
      semilog: args.semilog,
    });
    for (const warning of warnings) console.error(`warning: ${warning}`);
    const bytes = args.out.endsWith(".png")
      ? sceneToPng(scene)
      : Buffer.from(sceneToSvg(scene), "utf-8");
    writeFileSync(args.out, bytes);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
