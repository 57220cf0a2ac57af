/** CLI: figures <spec-file> [more specs...] --out-dir <dir> [--data-dir <dir>] */

import { buildFigure } from "./figures.js";

export function run(argv: string[]): number {
  const specs: string[] = [];
  let outDir = ".";
  let dataDir: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--out-dir") outDir = argv[++i];
    else if (a === "--data-dir") dataDir = argv[++i];
    else if (a.startsWith("--")) {
      console.error(`unknown flag ${a}`);
      return 2;
    } else specs.push(a);
  }
  if (specs.length === 0) {
    console.error("usage: figures <spec-file> [...] --out-dir <dir> [--data-dir <dir>]");
    return 2;
  }
  try {
    for (const spec of specs) {
      const out = buildFigure(spec, outDir, dataDir);
      console.log(`wrote ${out}`);
    }
  } catch (err) {
    console.error(String(err));
    return 1;
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("main.js")) {
  process.exit(run(process.argv.slice(2)));
}
