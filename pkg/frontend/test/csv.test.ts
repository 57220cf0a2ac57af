import { describe, expect, it } from "vitest";

import { parseSweepCsv, SchemaError, SWEEP_HEADER } from "../src/csv.js";

const GOOD = `# tool=ptmodes
# version=0.1.0
# quantity=tau
${SWEEP_HEADER}
0,0,0.1,,oscillatory
0.5,0,0.2,exceeds_gaussian_bound,oscillatory
0,1,nan,outside_oscillatory,exponential
0.5,1,-inf,ep_divergent|outside_oscillatory,exceptional_point
`;

describe("parseSweepCsv", () => {
  it("parses metadata, grid shape and flags", () => {
    const g = parseSweepCsv(GOOD);
    expect(g.metadata.quantity).toBe("tau");
    expect(g.kappas).toEqual([0, 0.5]);
    expect(g.gammas).toEqual([0, 1]);
    expect(g.values[0][1]).toBe(0.2);
    expect(Number.isNaN(g.values[1][0])).toBe(true);
    expect(g.values[1][1]).toBe(-Infinity);
    expect(g.flags[0][1]).toEqual(["exceeds_gaussian_bound"]);
    expect(g.flags[1][1]).toEqual(["ep_divergent", "outside_oscillatory"]);
    expect(g.regimes[1][0]).toBe("exponential");
  });

  it("rejects a wrong header", () => {
    expect(() => parseSweepCsv("a,b,c\n0,0,1\n")).toThrow(SchemaError);
  });

  it("rejects an empty file and a header-only file", () => {
    expect(() => parseSweepCsv("")).toThrow(SchemaError);
    expect(() => parseSweepCsv(SWEEP_HEADER + "\n")).toThrow(SchemaError);
  });

  it("rejects an incomplete grid", () => {
    const text = `${SWEEP_HEADER}\n0,0,1,,oscillatory\n0.5,0,1,,oscillatory\n0,1,1,,oscillatory\n`;
    expect(() => parseSweepCsv(text)).toThrow(/grid/);
  });

  it("rejects out-of-order rows", () => {
    const text = `${SWEEP_HEADER}\n0.5,0,1,,o\n0,0,1,,o\n0,1,1,,o\n0.5,1,1,,o\n`;
    expect(() => parseSweepCsv(text)).toThrow(/order/);
  });
});
