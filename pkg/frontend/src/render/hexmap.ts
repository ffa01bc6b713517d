/** Hexagon map: z-score heat tiles, hatch for flagged hexes, hover lookup,
 * and worm / density glyph overlays on a coarser grid. */

import { LinearScale, divergingColor, extent } from "../scale.js";
import type { GlyphGrid, Hex, HexSummaryGrid } from "../types.js";

export interface HexLayout {
  width: number;
  height: number;
  pad: number;
}

export const HEX_LAYOUT: HexLayout = { width: 640, height: 560, pad: 40 };

export interface HexTile {
  hex: Hex;
  cx: number;
  cy: number;
  corners: [number, number][];
  color: string | null; // null renders as hatched (flagged)
}

export interface HexModel {
  tiles: HexTile[];
  x: LinearScale;
  y: LinearScale;
  zmax: number;
  summary: string;
}

export function buildHexModel(payload: HexSummaryGrid, layout: HexLayout = HEX_LAYOUT): HexModel {
  const lat = payload.lattice;
  const x = new LinearScale(
    lat.x1_min,
    lat.x1_min + lat.x1_range,
    layout.pad,
    layout.width - layout.pad,
  );
  const y = new LinearScale(
    lat.x2_min,
    lat.x2_min + lat.x2_range,
    layout.height - layout.pad,
    layout.pad,
  );
  const zmax = Math.max(
    1e-12,
    ...payload.hexes.filter((h) => !h.flag && h.z !== null).map((h) => Math.abs(h.z as number)),
  );
  // circumradius in standardized units for pointy-top hexes with spacing w
  const radius = lat.w / Math.sqrt(3);
  const rxPix = (Math.abs(x.map(lat.x1_min + lat.x1_range) - x.map(lat.x1_min)) / 1) * radius;
  const ryPix = (Math.abs(y.map(lat.x2_min) - y.map(lat.x2_min + lat.x2_range)) / 1) * radius;
  const tiles: HexTile[] = payload.hexes.map((hex) => {
    const cx = x.map(hex.center[0]);
    const cy = y.map(hex.center[1]);
    const corners: [number, number][] = [];
    for (let k = 0; k < 6; k++) {
      const angle = (Math.PI / 180) * (60 * k - 30);
      corners.push([cx + rxPix * Math.cos(angle), cy - ryPix * Math.sin(angle)]);
    }
    const color = hex.flag || hex.z === null ? null : divergingColor((hex.z as number) / zmax);
    return { hex, cx, cy, corners, color };
  });
  return { tiles, x, y, zmax, summary: payload.summary };
}

const HATCH_DEF =
  `<defs><pattern id="hatch" width="6" height="6" patternTransform="rotate(45)" patternUnits="userSpaceOnUse">` +
  `<rect width="6" height="6" fill="#f2f2f2"/><line x1="0" y1="0" x2="0" y2="6" stroke="#999999" stroke-width="1.5"/>` +
  `</pattern></defs>`;

export function renderHexMap(model: HexModel, layout: HexLayout = HEX_LAYOUT, overlay = ""): string {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" height="${layout.height}" viewBox="0 0 ${layout.width} ${layout.height}">`,
    HATCH_DEF,
    `<rect width="${layout.width}" height="${layout.height}" fill="white"/>`,
  ];
  for (const tile of model.tiles) {
    const pts = tile.corners.map(([a, b]) => `${a.toFixed(1)},${b.toFixed(1)}`).join(" ");
    const fill = tile.color ?? "url(#hatch)";
    parts.push(
      `<polygon points="${pts}" fill="${fill}" stroke="#ffffff" stroke-width="0.5" data-q="${tile.hex.q}" data-r="${tile.hex.r}"/>`,
    );
  }
  if (overlay) parts.push(overlay);
  parts.push("</svg>");
  return parts.join("");
}

/** Hover model: payload numbers for the tile nearest to a pixel position. */
export function hexAt(model: HexModel, px: number, py: number): Hex | null {
  let best: HexTile | null = null;
  let bestD = Infinity;
  for (const tile of model.tiles) {
    const d = (tile.cx - px) ** 2 + (tile.cy - py) ** 2;
    if (d < bestD) {
      bestD = d;
      best = tile;
    }
  }
  if (!best) return null;
  const rPix = Math.max(
    Math.abs(best.corners[0][0] - best.cx),
    Math.abs(best.corners[0][1] - best.cy),
  );
  return bestD <= (2 * rPix) ** 2 ? best.hex : null;
}

export function hoverText(hex: Hex): string {
  const z = hex.flag || hex.z === null ? "flagged" : `z=${hex.z}`;
  const s = hex.s === null ? "s=n/a" : `s=${hex.s}`;
  return `count=${hex.count} ${s} ${z}`;
}

/** Worm or density glyphs drawn inside their coarse-cell bounds. */
export function renderGlyphOverlay(glyphs: GlyphGrid, x: LinearScale, y: LinearScale): string {
  const parts: string[] = [];
  for (const cell of glyphs.cells) {
    const payload = cell.payload;
    const [x1lo, x1hi, x2lo, x2hi] = cell.bounds;
    const left = x.map(x1lo);
    const right = x.map(x1hi);
    const bottom = y.map(x2lo);
    const top = y.map(x2hi);
    parts.push(
      `<rect x="${Math.min(left, right).toFixed(1)}" y="${Math.min(top, bottom).toFixed(1)}" width="${Math.abs(right - left).toFixed(1)}" height="${Math.abs(bottom - top).toFixed(1)}" fill="none" stroke="#33333355"/>`,
    );
    if (cell.kind === "worm" && payload.z && payload.dev && payload.outside) {
      const zs = payload.z;
      const devs = payload.dev;
      const hw = payload.halfwidth ?? [];
      const devScale = Math.max(1e-12, ...devs.map(Math.abs), ...hw.map(Math.abs));
      const gx = new LinearScale(zs[0], zs[zs.length - 1] || 1, Math.min(left, right) + 3, Math.max(left, right) - 3);
      const mid = (top + bottom) / 2;
      const gy = new LinearScale(-devScale, devScale, mid + Math.abs(bottom - top) / 2 - 3, mid - Math.abs(bottom - top) / 2 + 3);
      for (let i = 1; i < zs.length; i++) {
        const stroke = payload.outside[i] ? "#111111" : "#aaaaaa";
        parts.push(
          `<line x1="${gx.map(zs[i - 1]).toFixed(1)}" y1="${gy.map(devs[i - 1]).toFixed(1)}" x2="${gx.map(zs[i]).toFixed(1)}" y2="${gy.map(devs[i]).toFixed(1)}" stroke="${stroke}" stroke-width="1.4"/>`,
        );
      }
    } else if (cell.kind === "kde" && payload.density && glyphs.r_knots) {
      const dens = payload.density;
      const peak = Math.max(1e-12, ...dens);
      const gx = new LinearScale(0, dens.length - 1, Math.min(left, right) + 2, Math.max(left, right) - 2);
      const gy = new LinearScale(0, peak, Math.max(top, bottom) - 2, Math.min(top, bottom) + 2);
      const pts = dens.map((d, i) => `${gx.map(i).toFixed(1)},${gy.map(d).toFixed(1)}`).join(" ");
      parts.push(`<polyline fill="none" stroke="#225522" stroke-width="1.2" points="${pts}"/>`);
    }
  }
  return parts.join("");
}
