"""Binned summary checks: 1D intervals, hexagon maps, glyph grids.

A heteroscedastic dataset is checked three ways.  The 1D check bins the
residual standard deviation along x and overlays simulated reference
intervals; the hexagon map standardizes per-hex summaries against replicate
summaries; worm glyphs drill into local distribution shape.
"""

import pathlib

import numpy as np

from gamdiag import get_family, render_svg, transform
from gamdiag.grid_checks import grid_check_1d, grid_check_2d, kde_glyphs, worm_glyphs
from gamdiag.residuals import simulate_residuals
from gamdiag.scenarios import generate

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

family = get_family("shash")
ds, _ = generate("var_miss", 2 * 10**4, seed=3)
res = transform(ds, family, "quantile")
sims = simulate_residuals(ds, family, "quantile", 50, seed=4)
x = ds.column("x")

series = grid_check_1d(res.values, x, b=20, summary="sd", sims=sims, alpha=0.9)
outside = (~series.flags) & ((series.values < series.lo) | (series.values > series.hi))
print(f"1D sd check: {outside.sum()}/{(~series.flags).sum()} bins outside the 90% interval")
(OUT / "check1d_sd.svg").write_text(
    render_svg.render_series(series.to_payload(), "sd of residuals by x, 90% RIs")
)

# second axis independent of the model, as a display coordinate
rng = np.random.default_rng(0)
x2 = rng.uniform(0, 1, ds.n)
hexes = grid_check_2d(res.values, x, x2, summary="sd", sims=sims, hexes_across=24)
hot = [c for c in hexes.cells if not c.flag and abs(c.z) > 2]
print(f"hex map: {len(hexes.cells)} hexes, {len(hot)} with |z| > 2")

worms = worm_glyphs(res.values, x, x2, cells=3, alpha=0.95)
filled = [c for c in worms.cells if not c.empty]
worst = max(filled, key=lambda c: np.max(np.abs(c.payload["dev"])))
print(
    f"worm glyphs: {len(filled)} cells, worst detrended deviation "
    f"{np.max(np.abs(worst.payload['dev'])):.2f} in x1 range {worst.bounds[:2]}"
)

kdes = kde_glyphs(res.values, x, x2, cells=3)
print(f"kde glyphs share a {len(kdes.r_knots)}-knot residual axis")
print(f"wrote {OUT}/check1d_sd.svg")
