"""End-to-end service round trip without leaving Python.

Builds a session on a synthetic dataset, mounts the HTTP app in-process and
walks the endpoints a browser client would hit: metadata, a banded QQ with
envelope, a zoom into the lower tail (served from the cached sorted curve),
a 1D check and a hexagon map.
"""

import json

from fastapi.testclient import TestClient

from gamdiag import SessionState, create_app, get_family
from gamdiag.scenarios import generate

ds, _ = generate("var_miss", 10**4, seed=2)
session = SessionState(ds, get_family("shash"), "quantile")
client = TestClient(create_app(session))

meta = client.get("/api/meta").json()
print(f"session: n={meta['n']}, family={meta['family']}, columns={[c['name'] for c in meta['columns']]}")

qq = client.get("/api/qq?b0=500&band=normal&alpha=0.95&l=20&seed=1").json()
print(f"/api/qq -> {len(qq['s'])} binned points, bands={[b['kind'] for b in qq['bands']]}, envelope={'yes' if qq['envelope'] else 'no'}")

zoomed = client.get("/api/qq/zoom?lo=-4&hi=-2&b0=200&l=20&seed=1").json()
print(f"/api/qq/zoom lower tail -> {len(zoomed['s'])} points (sorts this session: {session.sort_count})")

check = client.get("/api/check1d?var=x&b=20&summary=sd&l=50&alpha=0.9&seed=3").json()
n_out = sum(
    1
    for s, lo, hi, fl in zip(check["s"], check["lo"], check["hi"], check["flags"])
    if not fl and (s < lo or s > hi)
)
print(f"/api/check1d sd -> {n_out}/{len(check['s'])} bins outside their interval")

hexes = client.get("/api/check2d?x1=x&x2=mu&summary=mean&l=20&seed=1&hexes=16").json()
print(f"/api/check2d -> {len(hexes['hexes'])} hexes")

body = client.get("/api/check1d?var=nope")
print(f"unknown column -> {body.status_code} {json.dumps(body.json())}")
