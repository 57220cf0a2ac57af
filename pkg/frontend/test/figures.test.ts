import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { SWEEP_HEADER } from "../src/csv.js";
import { buildFigure, parseFigureSpec } from "../src/figures.js";
import { run } from "../src/main.js";

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "ptmodes-fig-"));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function writeCsv(name: string, rows: string[]): string {
  const p = path.join(dir, name);
  fs.writeFileSync(p, `# quantity=tau\n${SWEEP_HEADER}\n${rows.join("\n")}\n`);
  return p;
}

const ROWS = ["0,0,0.2,,oscillatory", "1,0,0.8,,oscillatory", "0,1,1.4,,oscillatory", "1,1,nan,,exponential"];

describe("parseFigureSpec", () => {
  it("reads panels in order with defaults", () => {
    const spec = parseFigureSpec(
      "out = f.svg\ncols = 2\npanel1_csv = a.csv\npanel1_scale = tau\npanel2_csv = b.csv\npanel2_label = B\n",
    );
    expect(spec.panels.map((p) => p.csv)).toEqual(["a.csv", "b.csv"]);
    expect(spec.panels[1].label).toBe("B");
    expect(spec.cols).toBe(2);
  });

  it("rejects missing out, no panels, bad scale", () => {
    expect(() => parseFigureSpec("panel1_csv = a.csv\n")).toThrow(/out/);
    expect(() => parseFigureSpec("out = f.svg\n")).toThrow(/panels/);
    expect(() => parseFigureSpec("out=f.svg\npanel1_csv=a.csv\npanel1_scale=bogus\n")).toThrow(/scale/);
  });
});

describe("buildFigure", () => {
  it("renders a figure from CSV files deterministically", () => {
    writeCsv("a.csv", ROWS);
    const specPath = path.join(dir, "fig.spec");
    fs.writeFileSync(specPath, "out = fig.svg\ncols = 1\npanel1_csv = a.csv\npanel1_overlay = tau_regions\n");
    const out = buildFigure(specPath, dir);
    const first = fs.readFileSync(out, "utf-8");
    expect(first.startsWith("<svg ")).toBe(true);
    expect(first).toContain("nonphysical"); // the 1.4 cell
    buildFigure(specPath, dir);
    expect(fs.readFileSync(out, "utf-8")).toBe(first);
  });

  it("fails on an empty CSV without writing the image", () => {
    fs.writeFileSync(path.join(dir, "empty.csv"), "");
    const specPath = path.join(dir, "fig.spec");
    fs.writeFileSync(specPath, "out = fig.svg\npanel1_csv = empty.csv\n");
    expect(() => buildFigure(specPath, dir)).toThrow();
    expect(fs.existsSync(path.join(dir, "fig.svg"))).toBe(false);
  });
});

describe("run", () => {
  it("returns 0 on success and 1 on schema errors", () => {
    writeCsv("a.csv", ROWS);
    const specPath = path.join(dir, "fig.spec");
    fs.writeFileSync(specPath, "out = ok.svg\npanel1_csv = a.csv\n");
    expect(run([specPath, "--out-dir", dir])).toBe(0);
    expect(fs.existsSync(path.join(dir, "ok.svg"))).toBe(true);

    fs.writeFileSync(path.join(dir, "bad.csv"), "not,a,sweep\n1,2,3\n");
    fs.writeFileSync(specPath, "out = bad.svg\npanel1_csv = bad.csv\n");
    expect(run([specPath, "--out-dir", dir])).toBe(1);
    expect(fs.existsSync(path.join(dir, "bad.svg"))).toBe(false);
  });

  it("rejects unknown flags and missing specs", () => {
    expect(run(["--bogus"])).toBe(2);
    expect(run(["--out-dir", dir])).toBe(2);
  });
});
