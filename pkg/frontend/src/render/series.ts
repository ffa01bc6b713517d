/** 1D check rendering: summary dots with a simulated-interval ribbon. */

import { LinearScale, extent } from "../scale.js";
import type { SummarySeries } from "../types.js";

export interface SeriesLayout {
  width: number;
  height: number;
  pad: number;
}

export const SERIES_LAYOUT: SeriesLayout = { width: 720, height: 320, pad: 40 };

export interface SeriesPoint {
  center: number;
  value: number | null;
  lo: number | null;
  hi: number | null;
  count: number;
  flagged: boolean;
  outside: boolean;
}

export interface SeriesModel {
  points: SeriesPoint[];
  x: LinearScale;
  y: LinearScale;
  summary: string;
}

export function buildSeriesModel(payload: SummarySeries, layout: SeriesLayout = SERIES_LAYOUT): SeriesModel {
  const values: number[] = [];
  for (const v of payload.s) if (v !== null) values.push(v);
  if (payload.lo) for (const v of payload.lo) if (v !== null) values.push(v);
  if (payload.hi) for (const v of payload.hi) if (v !== null) values.push(v);
  const [yLo, yHi] = extent(values);
  const [xLo, xHi] = extent(payload.centers);
  const points: SeriesPoint[] = payload.centers.map((center, i) => {
    const value = payload.s[i];
    const lo = payload.lo ? payload.lo[i] : null;
    const hi = payload.hi ? payload.hi[i] : null;
    const flagged = payload.flags[i] !== 0;
    const outside =
      !flagged && value !== null && lo !== null && hi !== null && (value < lo || value > hi);
    return { center, value, lo, hi, count: payload.counts[i], flagged, outside };
  });
  return {
    points,
    x: new LinearScale(xLo, xHi, layout.pad, layout.width - layout.pad),
    y: new LinearScale(yLo, yHi, layout.height - layout.pad, layout.pad),
    summary: payload.summary,
  };
}

export function renderSeries(model: SeriesModel, layout: SeriesLayout = SERIES_LAYOUT): string {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" height="${layout.height}" viewBox="0 0 ${layout.width} ${layout.height}">`,
    `<rect width="${layout.width}" height="${layout.height}" fill="white"/>`,
  ];
  const banded = model.points.filter((p) => !p.flagged && p.lo !== null && p.hi !== null);
  if (banded.length > 1) {
    const top = banded.map((p) => `${model.x.map(p.center).toFixed(1)},${model.y.map(p.lo as number).toFixed(1)}`);
    const bottom = banded
      .map((p) => `${model.x.map(p.center).toFixed(1)},${model.y.map(p.hi as number).toFixed(1)}`)
      .reverse();
    parts.push(
      `<polygon fill="#4477cc" fill-opacity="0.25" stroke="none" points="${top.join(" ")} ${bottom.join(" ")}"/>`,
    );
  }
  for (const p of model.points) {
    if (p.value === null) continue;
    const color = p.flagged ? "#bbbbbb" : p.outside ? "#111111" : "#cc3333";
    parts.push(
      `<circle cx="${model.x.map(p.center).toFixed(1)}" cy="${model.y.map(p.value).toFixed(1)}" r="3.5" fill="${color}" data-count="${p.count}"/>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
