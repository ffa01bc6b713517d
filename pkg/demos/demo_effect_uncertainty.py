"""Smooth-effect uncertainty: opacity fades and noise re-rolls.

Given a fitted surface and its pointwise variance, two complementary visuals
convey uncertainty without extra panels: cell opacity driven by the two-sided
significance of the fit (confident regions stay vivid, flat ones fade to a
floor), and Gaussian perturbation with each cell's own variance (stable
features survive the re-roll, speculative ones shimmer away).
"""

import pathlib

import numpy as np

from gamdiag import EffectSurface, opacity_field, perturb_field, render_svg, t_transform

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

g = np.linspace(0, 1, 50)
X1, X2 = np.meshgrid(g, g, indexing="ij")
fhat = np.sin(2 * np.pi * X1) * np.cos(2 * np.pi * X2)
# variance grows toward the x2 edges, as it would where data thins out
vhat = 0.05 + 0.8 * (2 * np.abs(X2 - 0.5)) ** 2
surf = EffectSurface(x1=g, x2=g, fhat=fhat, vhat=vhat)

alpha = opacity_field(surf)
print(f"opacity: min {alpha.min():.2f} (floor), max {alpha.max():.2f}, mean {alpha.mean():.2f}")
print(f"t-transform checkpoints: t(0.04)={t_transform(0.04):.2f} t(0.3)={t_transform(0.3):.3f} t(1.0)={t_transform(1.0):.2f}")

faded = fhat * alpha  # what an opacity-weighted colormap effectively shows
(OUT / "effect_plain.svg").write_text(render_svg.render_heatmap(g, g, fhat, "fitted surface"))
(OUT / "effect_opacity.svg").write_text(render_svg.render_heatmap(g, g, faded, "opacity-weighted"))

for seed in (1, 2):
    ghat = perturb_field(surf, seed)
    (OUT / f"effect_perturb_{seed}.svg").write_text(
        render_svg.render_heatmap(g, g, ghat, f"perturbed (seed {seed})")
    )
corr = np.corrcoef(perturb_field(surf, 1).ravel(), fhat.ravel())[0, 1]
print(f"perturbed-vs-fitted correlation: {corr:.2f} (low-variance center survives the re-roll)")
print(f"wrote effect_*.svg to {OUT}")
