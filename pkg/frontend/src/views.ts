/** View controllers: fetch -> model -> SVG, with zoom, toggles and hover.
 *
 * Each view owns one container element and at most one in-flight request
 * (the client aborts superseded ones).  All numbers shown come straight from
 * payloads; views never derive new statistics.
 */

import { ApiClient, ApiError } from "./api.js";
import { buildDensityModel, buildEffectModel, renderHeatmap, type EffectMode } from "./render/heatmap.js";
import { buildHexModel, hexAt, hoverText, renderGlyphOverlay, renderHexMap, HEX_LAYOUT } from "./render/hexmap.js";
import { brushToDomain, buildQQModel, renderQQ, DEFAULT_LAYOUT, type QQModel } from "./render/qq.js";
import { buildSeriesModel, renderSeries } from "./render/series.js";
import type { BinnedQQ, DensityField, EffectPayload, GlyphGrid, HexSummaryGrid, Meta, SummarySeries } from "./types.js";

function errorNote(el: HTMLElement, err: unknown): void {
  if (err instanceof DOMException && err.name === "AbortError") return;
  const message = err instanceof ApiError ? `${err.body.code}: ${err.body.message}` : String(err);
  el.innerHTML = `<p class="error">${message}</p>`;
}

export class QQView {
  private zoomStack: { lo: number; hi: number }[] = [];
  private model: QQModel | null = null;
  band = "auto";
  l = 0;
  seed = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly el: HTMLElement,
  ) {}

  private params(extra: Record<string, string | number> = {}) {
    const base: Record<string, string | number> = { b0: 1000, band: this.band, alpha: 0.95, ...extra };
    if (this.l >= 2) {
      base.l = this.l;
      base.seed = this.seed;
    }
    return base;
  }

  async load(): Promise<void> {
    try {
      const window = this.zoomStack[this.zoomStack.length - 1];
      const payload = window
        ? await this.api.get<BinnedQQ>("qq", "/api/qq/zoom", this.params({ lo: window.lo, hi: window.hi }))
        : await this.api.get<BinnedQQ>("qq", "/api/qq", this.params());
      this.model = buildQQModel(payload);
      this.el.innerHTML = renderQQ(this.model);
      this.attachBrush();
    } catch (err) {
      errorNote(this.el, err);
    }
  }

  /** Drag-selection in pixels; issues a zoom request over the selected range. */
  async zoomTo(pxLo: number, pxHi: number): Promise<void> {
    if (!this.model || Math.abs(pxHi - pxLo) < 4) return;
    this.zoomStack.push(brushToDomain(this.model, pxLo, pxHi));
    await this.load();
  }

  async reset(): Promise<void> {
    this.zoomStack = [];
    await this.load();
  }

  private attachBrush(): void {
    const svg = this.el.querySelector("svg");
    if (!svg) return;
    let start: number | null = null;
    svg.addEventListener("mousedown", (ev) => {
      start = (ev as MouseEvent).offsetX;
    });
    svg.addEventListener("mouseup", (ev) => {
      if (start !== null) void this.zoomTo(start, (ev as MouseEvent).offsetX);
      start = null;
    });
    svg.addEventListener("dblclick", () => void this.reset());
  }
}

export class Check1DView {
  variable = "";
  summary = "mean";
  constructor(
    private readonly api: ApiClient,
    private readonly el: HTMLElement,
  ) {}

  async load(): Promise<void> {
    if (!this.variable) return;
    try {
      const payload = await this.api.get<SummarySeries>("check1d", "/api/check1d", {
        var: this.variable,
        b: 20,
        summary: this.summary,
        l: 50,
        alpha: 0.9,
        seed: 0,
      });
      this.el.innerHTML = renderSeries(buildSeriesModel(payload));
    } catch (err) {
      errorNote(this.el, err);
    }
  }
}

export class Check2DView {
  x1 = "";
  x2 = "";
  summary = "mean";
  glyphKind: "none" | "worm" | "kde" = "none";

  constructor(
    private readonly api: ApiClient,
    private readonly el: HTMLElement,
    private readonly hoverEl: HTMLElement | null = null,
  ) {}

  async load(): Promise<void> {
    if (!this.x1 || !this.x2) return;
    try {
      const payload = await this.api.get<HexSummaryGrid>("check2d", "/api/check2d", {
        x1: this.x1,
        x2: this.x2,
        summary: this.summary,
        l: 50,
        seed: 0,
        hexes: 24,
      });
      const model = buildHexModel(payload);
      let overlay = "";
      if (this.glyphKind !== "none") {
        const glyphs = await this.api.get<GlyphGrid>("glyphs", "/api/glyphs", {
          x1: this.x1,
          x2: this.x2,
          kind: this.glyphKind,
          cells: 4,
        });
        overlay = renderGlyphOverlay(glyphs, model.x, model.y);
      }
      this.el.innerHTML = renderHexMap(model, HEX_LAYOUT, overlay);
      if (this.hoverEl) {
        const svg = this.el.querySelector("svg");
        svg?.addEventListener("mousemove", (ev) => {
          const hex = hexAt(model, (ev as MouseEvent).offsetX, (ev as MouseEvent).offsetY);
          this.hoverEl!.textContent = hex ? hoverText(hex) : "";
        });
      }
    } catch (err) {
      errorNote(this.el, err);
    }
  }
}

export class DensCheckView {
  variable = "";
  constructor(
    private readonly api: ApiClient,
    private readonly el: HTMLElement,
  ) {}

  async load(): Promise<void> {
    if (!this.variable) return;
    try {
      const payload = await this.api.get<DensityField>("denscheck", "/api/denscheck", {
        var: this.variable,
        gx: 96,
        gr: 96,
      });
      this.el.innerHTML = renderHeatmap(buildDensityModel(payload));
    } catch (err) {
      errorNote(this.el, err);
    }
  }
}

export class EffectView {
  mode: EffectMode = "plain";
  seed = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly el: HTMLElement,
  ) {}

  async load(): Promise<void> {
    try {
      const payload = await this.api.get<EffectPayload>("effect", "/api/effect", {
        mode: this.mode,
        seed: this.seed,
      });
      this.el.innerHTML = renderHeatmap(buildEffectModel(payload, this.mode));
    } catch (err) {
      errorNote(this.el, err);
    }
  }

  /** New noise draw; calling load() again with the same seed reproduces it. */
  async reroll(): Promise<void> {
    this.seed += 1;
    await this.load();
  }
}

export function covariates(meta: Meta): string[] {
  return meta.columns.filter((c) => c.role === "covariate" && c.dtype !== "categorical").map((c) => c.name);
}
