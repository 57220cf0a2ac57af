/** Deterministic colormaps: a compact viridis approximation plus helpers. */

type Rgb = [number, number, number];

// viridis anchor colors at t = 0, 0.25, 0.5, 0.75, 1
const VIRIDIS: Rgb[] = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

export const MISSING_COLOR = "#d9d9d9";

function hex2(v: number): string {
  return Math.max(0, Math.min(255, Math.round(v))).toString(16).padStart(2, "0");
}

export function rgbToHex([r, g, b]: Rgb): string {
  return `#${hex2(r)}${hex2(g)}${hex2(b)}`;
}

/** Map t in [0, 1] onto the colormap (clamped, NaN -> missing gray). */
export function colormap(t: number): string {
  if (Number.isNaN(t)) return MISSING_COLOR;
  const x = Math.max(0, Math.min(1, t)) * (VIRIDIS.length - 1);
  const lo = Math.min(Math.floor(x), VIRIDIS.length - 2);
  const f = x - lo;
  const a = VIRIDIS[lo];
  const b = VIRIDIS[lo + 1];
  return rgbToHex([
    a[0] + f * (b[0] - a[0]),
    a[1] + f * (b[1] - a[1]),
    a[2] + f * (b[2] - a[2]),
  ]);
}

export interface ScaleRule {
  /** fixed bounds, or null to take the finite data maximum */
  lo: number;
  hi: number | null;
  /** values below this are clamped (divergence guard for the sink strength) */
  clampLo?: number;
}

/** Per-quantity color scale bounds, fixed for comparability across panels. */
export const SCALES: Record<string, ScaleRule> = {
  tau: { lo: 0, hi: 1 },
  en: { lo: 0, hi: null },
  ratio: { lo: 0, hi: 1 },
  lambda: { lo: -10, hi: 0, clampLo: -10 },
};

export function resolveBounds(rule: ScaleRule, values: number[][]): [number, number] {
  if (rule.hi !== null) return [rule.lo, rule.hi];
  let hi = -Infinity;
  for (const row of values) {
    for (const v of row) {
      if (Number.isFinite(v) && v > hi) hi = v;
    }
  }
  if (!Number.isFinite(hi) || hi <= rule.lo) hi = rule.lo + 1;
  return [rule.lo, hi];
}
