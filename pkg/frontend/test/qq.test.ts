import { describe, expect, it } from "vitest";

import { brushToDomain, buildQQModel, renderQQ, DEFAULT_LAYOUT } from "../src/render/qq.js";
import type { BinnedQQ } from "../src/types.js";
import { loadFixture } from "./fixtures.js";

const qq = loadFixture<BinnedQQ>("qq");
const zoomed = loadFixture<BinnedQQ>("qq_zoom");
const oracle = loadFixture<BinnedQQ>("qq_zoom_oracle");
const empty = loadFixture<BinnedQQ>("qq_zoom_empty");

describe("qq view", () => {
  it("data table echoes the payload numbers exactly", () => {
    const model = buildQQModel(qq);
    expect(model.table.s).toEqual(qq.s);
    expect(model.table.sbar).toEqual(qq.sbar);
    expect(model.table.counts).toEqual(qq.counts);
    expect(model.bands.map((b) => b.kind)).toEqual(["normal"]);
  });

  it("zoom round trip on the 1e5-row session matches the offline oracle", () => {
    // the server's re-binned window must equal a from-scratch recomputation
    // on the manually subset curve, element for element
    expect(zoomed.s).toEqual(oracle.s);
    expect(zoomed.sbar).toEqual(oracle.sbar);
    expect(zoomed.counts).toEqual(oracle.counts);
    const zb = zoomed.bands.find((b) => b.kind === "normal")!;
    const ob = oracle.bands.find((b) => b.kind === "normal")!;
    expect(zb.lo).toEqual(ob.lo);
    expect(zb.hi).toEqual(ob.hi);
    // and the rendered table is that payload, untouched
    const model = buildQQModel(zoomed);
    expect(model.table.s).toEqual(oracle.s);
  });

  it("zoomed window sits inside the requested theoretical range", () => {
    for (const v of zoomed.sbar) {
      expect(v).toBeGreaterThanOrEqual(-1.25);
      expect(v).toBeLessThanOrEqual(0.75);
    }
  });

  it("empty zoom renders the no-points state without crashing", () => {
    expect(empty.empty).toBe(true);
    const svg = renderQQ(buildQQModel(empty));
    expect(svg).toContain("no points in range");
    expect(svg).not.toContain("polyline");
  });

  it("full render contains curve, band, envelope-free layers", () => {
    const svg = renderQQ(buildQQModel(qq));
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("polyline");
    expect(svg).toContain("polygon");
  });

  it("brush geometry inverts the x scale", () => {
    const model = buildQQModel(qq);
    const { lo, hi } = brushToDomain(model, DEFAULT_LAYOUT.pad, DEFAULT_LAYOUT.width - DEFAULT_LAYOUT.pad);
    expect(lo).toBeCloseTo(Math.min(...qq.sbar), 6);
    expect(hi).toBeCloseTo(Math.max(...qq.sbar), 6);
    const mid = brushToDomain(model, 300, 200);
    expect(mid.lo).toBeLessThan(mid.hi);
  });
});
