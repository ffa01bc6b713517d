/** Versioned JSON payloads served by the diagnostics API (schema v1). */

export interface ColumnMeta {
  name: string;
  role: "response" | "covariate" | "param";
  dtype: string;
}

export interface Meta {
  v: number;
  n: number;
  columns: ColumnMeta[];
  family: string;
  residual_type: string;
  has_surface: boolean;
}

export interface Band {
  kind: string;
  lo: number[];
  hi: number[];
}

export interface BinnedQQ {
  v: number;
  s: number[];
  sbar: number[];
  counts: number[];
  b0: number;
  bands: Band[];
  envelope: { lo: number[]; hi: number[] } | null;
  clip_count: number;
  empty: boolean;
}

export interface SummarySeries {
  v: number;
  centers: number[];
  s: (number | null)[];
  lo: (number | null)[] | null;
  hi: (number | null)[] | null;
  counts: number[];
  flags: number[];
  summary: string;
}

export interface HexLattice {
  x1_min: number;
  x1_range: number;
  x2_min: number;
  x2_range: number;
  w: number;
  vstep: number;
}

export interface Hex {
  q: number;
  r: number;
  center: [number, number];
  count: number;
  s: number | null;
  z: number | null;
  flag: number;
}

export interface HexSummaryGrid {
  v: number;
  lattice: HexLattice;
  summary: string;
  hexes: Hex[];
}

export interface WormPayload {
  z: number[];
  dev: number[];
  halfwidth: number[];
  outside: number[];
  count: number;
}

export interface KdePayload {
  density: number[];
  count: number;
}

export interface GlyphCell {
  bounds: [number, number, number, number];
  kind: "worm" | "kde";
  payload: Partial<WormPayload & KdePayload>;
}

export interface GlyphGrid {
  v: number;
  kind: "worm" | "kde";
  r_knots: number[] | null;
  cells: GlyphCell[];
}

export interface DensityField {
  v: number;
  x_knots: number[];
  r_knots: number[];
  delta: (number | null)[][];
  mask: number[];
  distance: string;
}

export interface EffectPayload {
  v: number;
  x1: number[];
  x2: number[];
  fhat: number[][];
  vhat: number[][];
  alpha?: number[][];
  ghat?: number[][];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  param: string | null;
}
