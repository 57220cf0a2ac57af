/**
 * SVG heatmap rendering for sweep grids.
 *
 * Output is plain deterministic SVG text: one rect per grid cell, optional
 * overlays for depth panels (black where tau > 1, hatched where
 * 0.5 < tau <= 1), and the exceptional-point curve kappa^2 + gamma^2 = 1
 * drawn over every panel. gamma increases upward.
 */

import { SweepGrid } from "./csv.js";
import { MISSING_COLOR, SCALES, colormap, resolveBounds } from "./color.js";

export type OverlayRule = "none" | "tau_regions";

export interface PanelSpec {
  grid: SweepGrid;
  label: string;
  scale: keyof typeof SCALES;
  overlay: OverlayRule;
}

export interface PanelLayout {
  /** drawing size of the heatmap area in px */
  width: number;
  height: number;
  marginLeft: number;
  marginBottom: number;
  marginTop: number;
  marginRight: number;
}

export const DEFAULT_LAYOUT: PanelLayout = {
  width: 220,
  height: 220,
  marginLeft: 42,
  marginBottom: 34,
  marginTop: 22,
  marginRight: 54,
};

const fmt = (x: number): string => {
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
};

interface Extent {
  k0: number;
  k1: number;
  g0: number;
  g1: number;
}

function gridExtent(grid: SweepGrid): Extent {
  const ks = grid.kappas;
  const gs = grid.gammas;
  const dk = ks.length > 1 ? ks[1] - ks[0] : 1;
  const dg = gs.length > 1 ? gs[1] - gs[0] : 1;
  return {
    k0: ks[0] - dk / 2,
    k1: ks[ks.length - 1] + dk / 2,
    g0: gs[0] - dg / 2,
    g1: gs[gs.length - 1] + dg / 2,
  };
}

export function epCurvePoints(extent: Extent, width: number, height: number, n = 256): Array<[number, number]> {
  // the arc kappa^2 + gamma^2 = 1 restricted to the panel extent, in px
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < n; i++) {
    const phi = (Math.PI / 2) * (i / (n - 1));
    const k = Math.cos(phi);
    const g = Math.sin(phi);
    if (k < extent.k0 || k > extent.k1 || g < extent.g0 || g > extent.g1) continue;
    const x = ((k - extent.k0) / (extent.k1 - extent.k0)) * width;
    const y = height - ((g - extent.g0) / (extent.g1 - extent.g0)) * height;
    pts.push([x, y]);
  }
  return pts;
}

function colorbar(x: number, y: number, h: number, lo: number, hi: number, steps = 64): string {
  const parts: string[] = [];
  const w = 10;
  for (let i = 0; i < steps; i++) {
    const t = (i + 0.5) / steps;
    const yy = y + h - ((i + 1) * h) / steps;
    parts.push(
      `<rect x="${fmt(x)}" y="${fmt(yy)}" width="${w}" height="${fmt(h / steps + 0.5)}" fill="${colormap(t)}"/>`,
    );
  }
  parts.push(
    `<rect x="${fmt(x)}" y="${fmt(y)}" width="${w}" height="${fmt(h)}" fill="none" stroke="#000" stroke-width="0.5"/>`,
    `<text x="${fmt(x + w + 3)}" y="${fmt(y + 5)}" font-size="8">${fmt(hi)}</text>`,
    `<text x="${fmt(x + w + 3)}" y="${fmt(y + h)}" font-size="8">${fmt(lo)}</text>`,
  );
  return parts.join("");
}

/** Render one panel as a positioned SVG group. */
export function renderPanel(panel: PanelSpec, ox: number, oy: number, layout = DEFAULT_LAYOUT): string {
  const { grid } = panel;
  const { width, height } = layout;
  const rule = SCALES[panel.scale];
  const [lo, hi] = resolveBounds(rule, grid.values);
  const extent = gridExtent(grid);
  const nk = grid.kappas.length;
  const ng = grid.gammas.length;
  const cw = width / nk;
  const ch = height / ng;
  const parts: string[] = [];
  parts.push(`<g transform="translate(${fmt(ox + layout.marginLeft)},${fmt(oy + layout.marginTop)})">`);

  for (let i = 0; i < ng; i++) {
    const y = height - (i + 1) * ch;
    for (let j = 0; j < nk; j++) {
      let v = grid.values[i][j];
      if (rule.clampLo !== undefined && v < rule.clampLo) v = rule.clampLo;
      const undefinedRatio = grid.flags[i][j].includes("undefined_ratio");
      const fill =
        Number.isNaN(v) || undefinedRatio
          ? MISSING_COLOR
          : colormap((v - lo) / (hi - lo));
      const x = j * cw;
      parts.push(
        `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(cw + 0.1)}" height="${fmt(ch + 0.1)}" fill="${fill}"/>`,
      );
      if (panel.overlay === "tau_regions" && Number.isFinite(grid.values[i][j])) {
        if (grid.values[i][j] > 1.0) {
          parts.push(
            `<rect class="nonphysical" x="${fmt(x)}" y="${fmt(y)}" width="${fmt(cw + 0.1)}" height="${fmt(ch + 0.1)}" fill="#000000"/>`,
          );
        } else if (grid.values[i][j] > 0.5) {
          parts.push(
            `<rect class="beyond-gaussian" x="${fmt(x)}" y="${fmt(y)}" width="${fmt(cw + 0.1)}" height="${fmt(ch + 0.1)}" fill="url(#hatch)"/>`,
          );
        }
      }
    }
  }

  const ep = epCurvePoints(extent, width, height);
  if (ep.length > 1) {
    const d = ep.map(([x, y], i) => `${i ? "L" : "M"}${fmt(x)},${fmt(y)}`).join("");
    parts.push(
      `<path class="ep-curve" d="${d}" fill="none" stroke="#ffffff" stroke-width="1.6" stroke-dasharray="5,3"/>`,
    );
  }

  parts.push(
    `<rect x="0" y="0" width="${fmt(width)}" height="${fmt(height)}" fill="none" stroke="#000" stroke-width="0.8"/>`,
    `<text x="${fmt(width / 2)}" y="-8" font-size="10" text-anchor="middle">${panel.label}</text>`,
    `<text x="${fmt(width / 2)}" y="${fmt(height + 24)}" font-size="9" text-anchor="middle">kappa/eps</text>`,
    `<text x="-30" y="${fmt(height / 2)}" font-size="9" text-anchor="middle" transform="rotate(-90 -30 ${fmt(height / 2)})">gamma/eps</text>`,
  );
  for (const k of [extent.k0, extent.k1]) {
    const x = ((k - extent.k0) / (extent.k1 - extent.k0)) * width;
    parts.push(`<text x="${fmt(x)}" y="${fmt(height + 12)}" font-size="8" text-anchor="middle">${fmt(k)}</text>`);
  }
  for (const g of [extent.g0, extent.g1]) {
    const y = height - ((g - extent.g0) / (extent.g1 - extent.g0)) * height;
    parts.push(`<text x="-4" y="${fmt(y + 3)}" font-size="8" text-anchor="end">${fmt(g)}</text>`);
  }
  parts.push(colorbar(width + 8, 0, height, lo, hi));
  parts.push("</g>");
  return parts.join("\n");
}

export function panelCellSize(layout = DEFAULT_LAYOUT): [number, number] {
  return [
    layout.marginLeft + layout.width + layout.marginRight,
    layout.marginTop + layout.height + layout.marginBottom,
  ];
}

/** Assemble panels into a complete standalone SVG document. */
export function renderFigure(panels: PanelSpec[], cols: number, layout = DEFAULT_LAYOUT): string {
  const [pw, ph] = panelCellSize(layout);
  const rows = Math.ceil(panels.length / cols);
  const W = cols * pw;
  const H = rows * ph;
  const body = panels
    .map((p, idx) => renderPanel(p, (idx % cols) * pw, Math.floor(idx / cols) * ph, layout))
    .join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`,
    "<defs>",
    '<pattern id="hatch" patternUnits="userSpaceOnUse" width="6" height="6" patternTransform="rotate(45)">',
    '<line x1="0" y1="0" x2="0" y2="6" stroke="#ffffff" stroke-width="1.8"/>',
    "</pattern>",
    "</defs>",
    `<rect width="${W}" height="${H}" fill="#ffffff"/>`,
    body,
    "</svg>",
    "",
  ].join("\n");
}
