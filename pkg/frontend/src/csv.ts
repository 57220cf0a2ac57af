/**
 * Reader for ptmodes sweep CSV files.
 *
 * Expected layout: `# key=value` metadata lines, the exact header
 * `kappa_over_eps,gamma_over_eps,value,flags,regime`, then one row per grid
 * cell, gamma outer / kappa inner, both ascending. `value` may be `nan`,
 * `inf` or `-inf`; `flags` is a `|`-joined token list.
 */

export const SWEEP_HEADER = "kappa_over_eps,gamma_over_eps,value,flags,regime";

export class SchemaError extends Error {}

export interface SweepCell {
  kappa: number;
  gamma: number;
  value: number;
  flags: string[];
  regime: string;
}

export interface SweepGrid {
  metadata: Record<string, string>;
  kappas: number[];
  gammas: number[];
  /** values[i][j] at gamma = gammas[i], kappa = kappas[j] */
  values: number[][];
  flags: string[][][];
  regimes: string[][];
}

function parseValue(text: string): number {
  if (text === "nan") return NaN;
  if (text === "inf") return Infinity;
  if (text === "-inf") return -Infinity;
  const v = Number(text);
  if (!text || Number.isNaN(v)) throw new SchemaError(`not a number: ${text}`);
  return v;
}

export function parseSweepCsv(text: string): SweepGrid {
  const metadata: Record<string, string> = {};
  const cells: SweepCell[] = [];
  let headerSeen = false;
  for (const raw of text.split("\n")) {
    const line = raw.trimEnd();
    if (!line) continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) metadata[body.slice(0, eq)] = body.slice(eq + 1);
      continue;
    }
    if (!headerSeen) {
      if (line !== SWEEP_HEADER) {
        throw new SchemaError(`unexpected header: ${line}`);
      }
      headerSeen = true;
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== 5) throw new SchemaError(`expected 5 columns, got ${parts.length}`);
    cells.push({
      kappa: parseValue(parts[0]),
      gamma: parseValue(parts[1]),
      value: parseValue(parts[2]),
      flags: parts[3] ? parts[3].split("|") : [],
      regime: parts[4],
    });
  }
  if (!headerSeen) throw new SchemaError("missing header row");
  if (cells.length === 0) throw new SchemaError("no data rows");

  const kappas = [...new Set(cells.map((c) => c.kappa))].sort((a, b) => a - b);
  const gammas = [...new Set(cells.map((c) => c.gamma))].sort((a, b) => a - b);
  if (cells.length !== kappas.length * gammas.length) {
    throw new SchemaError(
      `row count ${cells.length} != ${kappas.length} x ${gammas.length} grid`,
    );
  }
  const nk = kappas.length;
  const values: number[][] = [];
  const flags: string[][][] = [];
  const regimes: string[][] = [];
  for (let i = 0; i < gammas.length; i++) {
    values.push(new Array<number>(nk).fill(NaN));
    flags.push(new Array(nk).fill([]).map(() => [] as string[]));
    regimes.push(new Array<string>(nk).fill(""));
  }
  cells.forEach((c, idx) => {
    const i = Math.floor(idx / nk);
    const j = idx % nk;
    if (c.gamma !== gammas[i] || c.kappa !== kappas[j]) {
      throw new SchemaError("rows are not in gamma-outer / kappa-inner ascending order");
    }
    values[i][j] = c.value;
    flags[i][j] = c.flags;
    regimes[i][j] = c.regime;
  });
  return { metadata, kappas, gammas, values, flags, regimes };
}
