/** Presentation-only helpers: pixel scales and colormaps.
 *
 * Everything numeric that the UI displays comes verbatim from server
 * payloads; these helpers only map payload values to pixels and colors.
 */

export class LinearScale {
  constructor(
    public readonly d0: number,
    public readonly d1: number,
    public readonly r0: number,
    public readonly r1: number,
  ) {}

  map(v: number): number {
    const span = this.d1 - this.d0 || 1;
    return this.r0 + ((v - this.d0) / span) * (this.r1 - this.r0);
  }

  invert(px: number): number {
    const span = this.r1 - this.r0 || 1;
    return this.d0 + ((px - this.r0) / span) * (this.d1 - this.d0);
  }
}

export function extent(values: Iterable<number>): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

function channel(x: number): number {
  return Math.round(Math.max(0, Math.min(255, x)));
}

/** Blue-white-red, centered at 0 on [-1, 1]: negative = model exceeds data. */
export function divergingColor(t: number): string {
  const c = Math.max(-1, Math.min(1, t));
  if (c < 0) {
    const f = 1 + c;
    return `rgb(${channel(40 + 215 * f)},${channel(80 + 175 * f)},255)`;
  }
  const f = 1 - c;
  return `rgb(255,${channel(80 + 175 * f)},${channel(40 + 215 * f)})`;
}

/** Single-hue dark-to-bright on [0, 1] for densities. */
export function sequentialColor(t: number): string {
  const c = Math.max(0, Math.min(1, t));
  return `rgb(${channel(15 + 225 * c)},${channel(35 + 180 * c)},${channel(70 + 120 * c)})`;
}

export function ticks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step * 10, step * 5, step * 2, step];
  const chosen = candidates.reverse().find((s) => span / s <= count * 1.6) ?? step * 10;
  const out: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + 1e-12; v += chosen) {
    out.push(Number(v.toFixed(12)));
  }
  return out;
}
