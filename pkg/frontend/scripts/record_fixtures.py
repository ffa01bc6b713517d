"""Record JSON fixtures for the UI snapshot tests.

Builds a 10^5-row session in-process, captures each endpoint's response
bytes, and additionally computes the zoom window offline from the engine
(bin the manually subset sorted curve) so the UI tests can verify the
round trip against an independent oracle.  Run from the frontend directory:

    python scripts/record_fixtures.py
"""

import json
import pathlib

import numpy as np
from fastapi.testclient import TestClient

from gamdiag import SessionState, create_app, get_family, qq
from gamdiag.effects import EffectSurface
from gamdiag.residuals import transform
from gamdiag.scenarios import generate

OUT = pathlib.Path(__file__).resolve().parent.parent / "test" / "fixtures"
OUT.mkdir(parents=True, exist_ok=True)

N = 10**5
ZOOM = {"lo": -1.25, "hi": 0.75, "b0": 200}

ds, _ = generate("var_miss", N, seed=21)
rng = np.random.default_rng(9)
g = np.linspace(0, 1, 25)
F1, F2 = np.meshgrid(g, g, indexing="ij")
surface = EffectSurface(
    x1=g,
    x2=g,
    fhat=np.sin(2 * np.pi * F1) * np.cos(2 * np.pi * F2),
    vhat=0.02 + 0.5 * (2 * np.abs(F2 - 0.5)) ** 2,
)
family = get_family("shash")
session = SessionState(ds, family, "quantile", surface=surface)
client = TestClient(create_app(session))


def record(name, path):
    response = client.get(path)
    assert response.status_code == 200, (path, response.status_code, response.text)
    (OUT / f"{name}.json").write_bytes(response.content)
    print(f"recorded {name}.json ({len(response.content)} bytes)")


record("meta", "/api/meta")
record("qq", "/api/qq?b0=1000&band=normal&alpha=0.95")
record("qq_zoom", f"/api/qq/zoom?lo={ZOOM['lo']}&hi={ZOOM['hi']}&b0={ZOOM['b0']}&band=normal&alpha=0.95")
record("check1d", "/api/check1d?var=x&b=20&summary=sd&l=50&alpha=0.9&seed=0")
record("check2d", "/api/check2d?x1=x&x2=mu&summary=sd&l=50&seed=0&hexes=24")
record("glyphs_worm", "/api/glyphs?x1=x&x2=mu&kind=worm&cells=3")
record("glyphs_kde", "/api/glyphs?x1=x&x2=mu&kind=kde&cells=3")
record("denscheck", "/api/denscheck?var=x&gx=64&gr=64")
record("effect_plain", "/api/effect?mode=plain")
record("effect_opacity", "/api/effect?mode=opacity")
record("effect_perturb", "/api/effect?mode=perturb&seed=5")
record("effect_perturb_again", "/api/effect?mode=perturb&seed=5")

# offline zoom oracle: recompute the window from scratch, bypassing the server
res = transform(ds, family, "quantile")
curve = qq.compute_qq(res)
keep = (curve.rbar >= ZOOM["lo"]) & (curve.rbar <= ZOOM["hi"])
manual = qq.QQCurve(r=curve.r[keep], rbar=curve.rbar[keep], source="analytic", rtype="quantile")
band = qq.reference_band(curve, 0.95)
oracle = qq.bin_qq(
    manual,
    b0=ZOOM["b0"],
    bands={"normal": (band[0][keep], band[1][keep])},
    clip_count=res.clip_count,
)
(OUT / "qq_zoom_oracle.json").write_text(
    json.dumps(oracle.to_payload(), sort_keys=True, separators=(",", ":"))
)
print("recorded qq_zoom_oracle.json")

# an empty zoom window between two adjacent theoretical points
record("qq_zoom_empty", "/api/qq/zoom?lo=40&hi=41&b0=50")
print("done:", sorted(p.name for p in OUT.glob("*.json")))
