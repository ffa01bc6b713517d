/** Bootstrap: read /api/meta, populate pickers, wire the five views. */

import { ApiClient } from "./api.js";
import type { Meta } from "./types.js";
import { Check1DView, Check2DView, DensCheckView, EffectView, QQView, covariates } from "./views.js";

function option(value: string): HTMLOptionElement {
  const el = document.createElement("option");
  el.value = value;
  el.textContent = value;
  return el;
}

function fill(select: HTMLSelectElement, values: string[]): void {
  select.innerHTML = "";
  for (const v of values) select.appendChild(option(v));
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const meta = await api.get<Meta>("meta", "/api/meta");
  const covs = covariates(meta);

  const header = document.getElementById("session-info")!;
  header.textContent = `${meta.n.toLocaleString()} rows - ${meta.family} - ${meta.residual_type} residuals`;

  const qq = new QQView(api, document.getElementById("qq-plot")!);
  const bandSel = document.getElementById("qq-band") as HTMLSelectElement;
  const envInput = document.getElementById("qq-l") as HTMLInputElement;
  bandSel.addEventListener("change", () => {
    qq.band = bandSel.value;
    void qq.load();
  });
  envInput.addEventListener("change", () => {
    qq.l = Number(envInput.value) || 0;
    void qq.load();
  });
  document.getElementById("qq-reset")!.addEventListener("click", () => void qq.reset());
  void qq.load();

  const c1 = new Check1DView(api, document.getElementById("check1d-plot")!);
  const c1var = document.getElementById("check1d-var") as HTMLSelectElement;
  const c1sum = document.getElementById("check1d-summary") as HTMLSelectElement;
  fill(c1var, covs);
  c1.variable = covs[0] ?? "";
  const reload1 = () => {
    c1.variable = c1var.value;
    c1.summary = c1sum.value;
    void c1.load();
  };
  c1var.addEventListener("change", reload1);
  c1sum.addEventListener("change", reload1);
  void c1.load();

  const c2 = new Check2DView(api, document.getElementById("check2d-plot")!, document.getElementById("check2d-hover"));
  const c2x1 = document.getElementById("check2d-x1") as HTMLSelectElement;
  const c2x2 = document.getElementById("check2d-x2") as HTMLSelectElement;
  const c2sum = document.getElementById("check2d-summary") as HTMLSelectElement;
  const c2glyph = document.getElementById("check2d-glyph") as HTMLSelectElement;
  fill(c2x1, covs);
  fill(c2x2, covs);
  if (covs.length > 1) c2x2.value = covs[1];
  const reload2 = () => {
    c2.x1 = c2x1.value;
    c2.x2 = c2x2.value;
    c2.summary = c2sum.value;
    c2.glyphKind = c2glyph.value as "none" | "worm" | "kde";
    void c2.load();
  };
  for (const el of [c2x1, c2x2, c2sum, c2glyph]) el.addEventListener("change", reload2);
  reload2();

  const dens = new DensCheckView(api, document.getElementById("dens-plot")!);
  const densVar = document.getElementById("dens-var") as HTMLSelectElement;
  fill(densVar, covs);
  dens.variable = covs[0] ?? "";
  densVar.addEventListener("change", () => {
    dens.variable = densVar.value;
    void dens.load();
  });
  void dens.load();

  const effectSection = document.getElementById("effect-section")!;
  if (meta.has_surface) {
    const effect = new EffectView(api, document.getElementById("effect-plot")!);
    const modeSel = document.getElementById("effect-mode") as HTMLSelectElement;
    modeSel.addEventListener("change", () => {
      effect.mode = modeSel.value as typeof effect.mode;
      void effect.load();
    });
    document.getElementById("effect-reroll")!.addEventListener("click", () => void effect.reroll());
    void effect.load();
  } else {
    effectSection.innerHTML = "<p class='note'>no surface loaded for this session</p>";
  }
}

void boot();
