/**
 * Figure assembly from a flat key=value spec file.
 *
 * Spec keys:
 *   out            output SVG filename (written under --out-dir)
 *   cols           panels per row (default 4)
 *   panel<N>_csv   sweep CSV path, resolved against --data-dir
 *   panel<N>_label panel title
 *   panel<N>_scale tau | en | ratio | lambda   (fixed color bounds per kind)
 *   panel<N>_overlay none | tau_regions        (hatch 0.5<tau<=1, black tau>1)
 *
 * Panels are numbered 1..N without gaps.  '#' starts a comment.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { parseSweepCsv, SchemaError } from "./csv.js";
import { SCALES } from "./color.js";
import { OverlayRule, PanelSpec, renderFigure } from "./svgmap.js";

export interface FigureSpec {
  out: string;
  cols: number;
  panels: Array<{ csv: string; label: string; scale: keyof typeof SCALES; overlay: OverlayRule }>;
}

export function parseKeyValueFile(text: string): Record<string, string> {
  const out: Record<string, string> = {};
  text.split("\n").forEach((raw, idx) => {
    const line = raw.split("#", 1)[0].trim();
    if (!line) return;
    const eq = line.indexOf("=");
    if (eq < 1) throw new SchemaError(`line ${idx + 1}: expected key=value`);
    out[line.slice(0, eq).trim()] = line.slice(eq + 1).trim();
  });
  return out;
}

export function parseFigureSpec(text: string): FigureSpec {
  const kv = parseKeyValueFile(text);
  if (!kv.out) throw new SchemaError("spec is missing the 'out' key");
  const panels: FigureSpec["panels"] = [];
  for (let n = 1; ; n++) {
    const csv = kv[`panel${n}_csv`];
    if (!csv) break;
    const scale = (kv[`panel${n}_scale`] ?? "tau") as keyof typeof SCALES;
    if (!(scale in SCALES)) throw new SchemaError(`panel${n}: unknown scale ${scale}`);
    const overlay = (kv[`panel${n}_overlay`] ?? "none") as OverlayRule;
    if (overlay !== "none" && overlay !== "tau_regions") {
      throw new SchemaError(`panel${n}: unknown overlay ${overlay}`);
    }
    panels.push({ csv, label: kv[`panel${n}_label`] ?? csv, scale, overlay });
  }
  if (panels.length === 0) throw new SchemaError("spec defines no panels");
  return { out: kv.out, cols: kv.cols ? Number(kv.cols) : 4, panels };
}

export function renderFromSpec(spec: FigureSpec, dataDir: string): string {
  const panels: PanelSpec[] = spec.panels.map((p) => ({
    grid: parseSweepCsv(fs.readFileSync(path.resolve(dataDir, p.csv), "utf-8")),
    label: p.label,
    scale: p.scale,
    overlay: p.overlay,
  }));
  return renderFigure(panels, spec.cols);
}

export function buildFigure(specPath: string, outDir: string, dataDir?: string): string {
  const spec = parseFigureSpec(fs.readFileSync(specPath, "utf-8"));
  const svg = renderFromSpec(spec, dataDir ?? path.dirname(specPath));
  fs.mkdirSync(outDir, { recursive: true });
  const outPath = path.join(outDir, spec.out);
  const tmp = outPath + ".tmp";
  fs.writeFileSync(tmp, svg);
  fs.renameSync(tmp, outPath);
  return outPath;
}
