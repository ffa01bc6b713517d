/** Raster heatmaps: misfit fields (diverging, NaN cells unpainted) and
 * effect surfaces with plain / opacity-weighted / perturbed modes. */

import { LinearScale, divergingColor } from "../scale.js";
import type { DensityField, EffectPayload } from "../types.js";

export interface HeatLayout {
  width: number;
  height: number;
  pad: number;
}

export const HEAT_LAYOUT: HeatLayout = { width: 640, height: 480, pad: 40 };

export interface HeatCell {
  i: number;
  j: number;
  px: number;
  py: number;
  w: number;
  h: number;
  value: number;
  color: string;
  opacity: number;
}

export interface HeatModel {
  cells: HeatCell[];
  x: LinearScale;
  y: LinearScale;
  vmax: number;
  skipped: number; // masked / null cells left unpainted
}

function buildGridModel(
  xs: number[],
  ys: number[],
  value: (i: number, j: number) => number | null,
  cellOpacity: (i: number, j: number) => number,
  layout: HeatLayout,
): HeatModel {
  const x = new LinearScale(xs[0], xs[xs.length - 1], layout.pad, layout.width - layout.pad);
  const y = new LinearScale(ys[0], ys[ys.length - 1], layout.height - layout.pad, layout.pad);
  const w = (layout.width - 2 * layout.pad) / xs.length;
  const h = (layout.height - 2 * layout.pad) / ys.length;
  let vmax = 1e-12;
  for (let i = 0; i < xs.length; i++) {
    for (let j = 0; j < ys.length; j++) {
      const v = value(i, j);
      if (v !== null && Math.abs(v) > vmax) vmax = Math.abs(v);
    }
  }
  const cells: HeatCell[] = [];
  let skipped = 0;
  for (let i = 0; i < xs.length; i++) {
    for (let j = 0; j < ys.length; j++) {
      const v = value(i, j);
      if (v === null || !Number.isFinite(v)) {
        skipped += 1;
        continue;
      }
      cells.push({
        i,
        j,
        px: x.map(xs[i]) - w / 2,
        py: y.map(ys[j]) - h / 2,
        w,
        h,
        value: v,
        color: divergingColor(v / vmax),
        opacity: cellOpacity(i, j),
      });
    }
  }
  return { cells, x, y, vmax, skipped };
}

export function buildDensityModel(payload: DensityField, layout: HeatLayout = HEAT_LAYOUT): HeatModel {
  return buildGridModel(
    payload.x_knots,
    payload.r_knots,
    (i, j) => payload.delta[i][j],
    () => 1,
    layout,
  );
}

export type EffectMode = "plain" | "opacity" | "perturb";

export function buildEffectModel(
  payload: EffectPayload,
  mode: EffectMode,
  layout: HeatLayout = HEAT_LAYOUT,
): HeatModel {
  const field = mode === "perturb" && payload.ghat ? payload.ghat : payload.fhat;
  const alpha = payload.alpha;
  return buildGridModel(
    payload.x1,
    payload.x2,
    (i, j) => field[i][j],
    (i, j) => (mode === "opacity" && alpha ? alpha[i][j] : 1),
    layout,
  );
}

export function renderHeatmap(model: HeatModel, layout: HeatLayout = HEAT_LAYOUT): string {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" height="${layout.height}" viewBox="0 0 ${layout.width} ${layout.height}">`,
    `<rect width="${layout.width}" height="${layout.height}" fill="white"/>`,
  ];
  for (const c of model.cells) {
    const op = c.opacity >= 1 ? "" : ` fill-opacity="${c.opacity.toFixed(3)}"`;
    parts.push(
      `<rect x="${c.px.toFixed(1)}" y="${c.py.toFixed(1)}" width="${(c.w + 0.5).toFixed(1)}" height="${(c.h + 0.5).toFixed(1)}" fill="${c.color}"${op}/>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
