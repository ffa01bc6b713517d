/** QQ view rendering: curve, bands, envelope, and brush-to-zoom geometry. */

import { LinearScale, extent } from "../scale.js";
import type { BinnedQQ } from "../types.js";

export interface QQLayout {
  width: number;
  height: number;
  pad: number;
}

export const DEFAULT_LAYOUT: QQLayout = { width: 720, height: 460, pad: 44 };

export interface QQModel {
  empty: boolean;
  x: LinearScale;
  y: LinearScale;
  /** data table shown on hover/inspect: payload values, untouched */
  table: { sbar: number[]; s: number[]; counts: number[] };
  bands: { kind: string; lo: number[]; hi: number[] }[];
  envelope: { lo: number[]; hi: number[] } | null;
  clipCount: number;
}

export function buildQQModel(payload: BinnedQQ, layout: QQLayout = DEFAULT_LAYOUT): QQModel {
  const { width, height, pad } = layout;
  if (payload.empty || payload.s.length === 0) {
    return {
      empty: true,
      x: new LinearScale(0, 1, pad, width - pad),
      y: new LinearScale(0, 1, height - pad, pad),
      table: { sbar: [], s: [], counts: [] },
      bands: [],
      envelope: null,
      clipCount: payload.clip_count,
    };
  }
  const yValues: number[] = [...payload.s];
  for (const band of payload.bands) yValues.push(...band.lo, ...band.hi);
  if (payload.envelope) yValues.push(...payload.envelope.lo, ...payload.envelope.hi);
  const [xLo, xHi] = extent(payload.sbar);
  const [yLo, yHi] = extent(yValues);
  return {
    empty: false,
    x: new LinearScale(xLo, xHi, pad, width - pad),
    y: new LinearScale(yLo, yHi, height - pad, pad),
    table: { sbar: payload.sbar, s: payload.s, counts: payload.counts },
    bands: payload.bands,
    envelope: payload.envelope,
    clipCount: payload.clip_count,
  };
}

function polyline(xs: number[], ys: number[], stroke: string, width: number, dash?: string): string {
  const pts = xs.map((x, i) => `${x.toFixed(1)},${ys[i].toFixed(1)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr} points="${pts}"/>`;
}

function ribbon(x: number[], lo: number[], hi: number[], fill: string, opacity: number): string {
  const top = x.map((v, i) => `${v.toFixed(1)},${lo[i].toFixed(1)}`);
  const bottom = x.map((v, i) => `${v.toFixed(1)},${hi[i].toFixed(1)}`).reverse();
  return `<polygon fill="${fill}" fill-opacity="${opacity}" stroke="none" points="${top.join(" ")} ${bottom.join(" ")}"/>`;
}

export function renderQQ(model: QQModel, layout: QQLayout = DEFAULT_LAYOUT): string {
  const { width, height } = layout;
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
  ];
  if (model.empty) {
    parts.push(
      `<text x="${width / 2}" y="${height / 2}" text-anchor="middle" class="empty-state">no points in range</text>`,
    );
    parts.push("</svg>");
    return parts.join("");
  }
  const px = model.table.sbar.map((v) => model.x.map(v));
  if (model.envelope) {
    parts.push(
      ribbon(px, model.envelope.lo.map((v) => model.y.map(v)), model.envelope.hi.map((v) => model.y.map(v)), "#9aa0a6", 0.3),
    );
  }
  for (const band of model.bands) {
    parts.push(
      ribbon(px, band.lo.map((v) => model.y.map(v)), band.hi.map((v) => model.y.map(v)), "#4477cc", 0.25),
    );
  }
  const [dLo, dHi] = [Math.max(model.x.d0, model.y.d0), Math.min(model.x.d1, model.y.d1)];
  if (dLo < dHi) {
    parts.push(
      polyline([model.x.map(dLo), model.x.map(dHi)], [model.y.map(dLo), model.y.map(dHi)], "#999999", 1, "4 3"),
    );
  }
  parts.push(polyline(px, model.table.s.map((v) => model.y.map(v)), "#cc3333", 1.8));
  if (model.clipCount > 0) {
    parts.push(
      `<text x="${width - 8}" y="16" text-anchor="end" class="clip-note">${model.clipCount} clipped</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

/** Pixel brush selection -> theoretical-axis range for /api/qq/zoom. */
export function brushToDomain(model: QQModel, pxLo: number, pxHi: number): { lo: number; hi: number } {
  const a = model.x.invert(Math.min(pxLo, pxHi));
  const b = model.x.invert(Math.max(pxLo, pxHi));
  return { lo: a, hi: b };
}
