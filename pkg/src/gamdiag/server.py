"""HTTP diagnostics service: every engine operation as a JSON GET endpoint.

A session owns one immutable dataset plus family/residual-type config.  The
sorted QQ curve and each simulation batch are built once and cached, so zoom
requests re-bin a cached curve instead of re-sorting, and repeated band or
interval requests with the same (type, l, seed) key are free.  Concurrent
requests for the same un-built batch coalesce onto a single builder; waiters
that exceed the configured timeout receive 503.
"""

from __future__ import annotations

import json
import math
import threading
from concurrent.futures import Future
from concurrent.futures import TimeoutError as FutureTimeoutError

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import density, effects, grid_checks, qq
from .dataset import DiagnosticDataset
from .errors import GamdiagError
from .residuals import RESIDUAL_TYPES, SimulatedResiduals, resolve_workers, simulate_residuals, transform

DEFAULT_SIM_TIMEOUT = 30.0


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, param: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.param = param

    def body(self) -> dict:
        return {"code": self.code, "message": str(self), "param": self.param}


class SessionState:
    """Immutable data plus lazily built, coalesced caches."""

    def __init__(
        self,
        ds: DiagnosticDataset,
        family,
        rtype: str,
        surface: effects.EffectSurface | None = None,
        workers: int | None = None,
        sim_timeout: float = DEFAULT_SIM_TIMEOUT,
    ):
        if rtype not in RESIDUAL_TYPES:
            raise GamdiagError(f"unknown residual type {rtype!r}")
        self.ds = ds
        self.family = family
        self.rtype = rtype
        self.surface = surface
        self.workers = resolve_workers(workers)
        self.sim_timeout = sim_timeout
        self.sort_count = 0  # instrumentation: full sorts per session
        self._lock = threading.Lock()
        self._futures: dict = {}
        self._residuals = None
        self._curves: dict = {}

    def _coalesced(self, key, builder):
        """Run ``builder`` once per key; concurrent callers wait with timeout."""
        with self._lock:
            fut = self._futures.get(key)
            if fut is None:
                fut = Future()
                self._futures[key] = fut
                owner = True
            else:
                owner = False
        if owner:
            try:
                fut.set_result(builder())
            except BaseException as exc:  # propagate to all waiters, allow retry
                fut.set_exception(exc)
                with self._lock:
                    self._futures.pop(key, None)
                raise
            return fut.result()
        try:
            return fut.result(timeout=self.sim_timeout)
        except (TimeoutError, FutureTimeoutError):
            raise ApiError(
                503,
                "busy",
                f"simulation batch {key} still building after {self.sim_timeout}s",
            ) from None

    def residuals(self):
        return self._coalesced(("residuals",), lambda: transform(self.ds, self.family, self.rtype))

    def curve(self, sims_key=None):
        """Cached sorted QQ curve; one engine sort per reference config."""

        def build():
            res = self.residuals()
            sims = self.sims(*sims_key) if sims_key else None
            self.sort_count += 1
            return qq.compute_qq(res, sims)

        return self._coalesced(("curve", sims_key), build)

    def sims(self, l: int, seed: int) -> SimulatedResiduals:
        key = ("sims", self.rtype, l, seed)
        return self._coalesced(
            key,
            lambda: simulate_residuals(
                self.ds, self.family, self.rtype, l, seed, workers=self.workers
            ),
        )


def _json_response(payload, status=200) -> Response:
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return Response(content=body, status_code=status, media_type="application/json")


def _q(request: Request, name: str, default=None, cast=str, required=False):
    raw = request.query_params.get(name)
    if raw is None:
        if required:
            raise ApiError(400, "missing_param", f"query parameter {name!r} is required", name)
        return default
    try:
        value = cast(raw)
    except ValueError:
        raise ApiError(400, "bad_param", f"cannot parse {name}={raw!r}", name) from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ApiError(400, "bad_param", f"{name} must be finite", name)
    return value


def _covariate(session: SessionState, name: str, param: str) -> np.ndarray:
    try:
        col = session.ds.column(name)
    except KeyError:
        raise ApiError(404, "unknown_column", f"no column named {name!r}", param) from None
    if session.ds.is_categorical(name):
        raise ApiError(400, "categorical_column", f"column {name!r} is categorical", param)
    return col


def _band_spec(session, curve, band, alpha):
    if band in (None, "", "none"):
        return {}
    if band not in ("ks", "normal", "auto"):
        raise ApiError(400, "bad_param", f"unknown band kind {band!r}", "band")
    kind = band
    if band == "auto":
        kind = "ks" if session.rtype == "uniform" else "normal"
    expected = {"uniform": "ks", "quantile": "normal"}.get(session.rtype)
    if expected != kind:
        raise ApiError(
            400,
            "bad_param",
            f"band {kind!r} is not defined for {session.rtype} residuals",
            "band",
        )
    return {kind: qq.reference_band(curve, alpha)}


def create_app(session: SessionState, frontend_dir=None) -> FastAPI:
    app = FastAPI(title="gamdiag", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def _api_error(request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(GamdiagError)
    async def _engine_error(request, exc: GamdiagError):
        return JSONResponse(status_code=400, content={"code": "engine_error", "message": str(exc), "param": None})

    @app.get("/api/meta")
    def meta():
        ds = session.ds
        return _json_response(
            {
                "v": 1,
                "n": ds.n,
                "columns": [
                    {
                        "name": name,
                        "role": ds.roles[name],
                        "dtype": "categorical" if ds.is_categorical(name) else "float64",
                    }
                    for name in ds.columns
                ],
                "family": session.family.name,
                "residual_type": session.rtype,
                "has_surface": session.surface is not None,
            }
        )

    def _qq_ingredients(request):
        b0 = _q(request, "b0", 1000, int)
        band = _q(request, "band", "none")
        alpha = _q(request, "alpha", 0.95, float)
        l = _q(request, "l", 0, int)
        seed = _q(request, "seed", 0, int)
        if b0 < 1:
            raise ApiError(400, "bad_param", "b0 must be >= 1", "b0")
        if not 0 < alpha < 1:
            raise ApiError(400, "bad_param", "alpha must be in (0, 1)", "alpha")
        res = session.residuals()
        needs_sims = res.reference == "simulation"
        if needs_sims and l < 2:
            raise ApiError(400, "bad_param", f"{session.rtype} residuals need l >= 2 simulations", "l")
        sims_key = (l, seed) if (l >= 2) else None
        curve = session.curve(sims_key)
        bands = _band_spec(session, curve, band, alpha)
        envelope = qq.sim_envelope(session.sims(l, seed), alpha) if l >= 2 else None
        return res, curve, b0, bands, envelope

    @app.get("/api/qq")
    def qq_endpoint(request: Request):
        res, curve, b0, bands, envelope = _qq_ingredients(request)
        binned = qq.bin_qq(curve, b0, bands=bands, envelope=envelope, clip_count=res.clip_count)
        return _json_response(binned.to_payload())

    @app.get("/api/qq/zoom")
    def qq_zoom(request: Request):
        lo = _q(request, "lo", cast=float, required=True)
        hi = _q(request, "hi", cast=float, required=True)
        if not lo < hi:
            raise ApiError(400, "bad_param", "zoom needs lo < hi", "lo")
        res, curve, b0, bands, envelope = _qq_ingredients(request)
        binned = qq.zoom(curve, lo, hi, b0, bands=bands, envelope=envelope, clip_count=res.clip_count)
        return _json_response(binned.to_payload())

    @app.get("/api/check1d")
    def check1d(request: Request):
        var = _q(request, "var", required=True)
        b = _q(request, "b", 20, int)
        summary = _q(request, "summary", "mean")
        l = _q(request, "l", 50, int)
        alpha = _q(request, "alpha", 0.9, float)
        seed = _q(request, "seed", 0, int)
        x = _covariate(session, var, "var")
        res = session.residuals()
        sims = session.sims(l, seed) if l >= 2 else None
        series = grid_checks.grid_check_1d(res.values, x, b, summary, sims, alpha)
        return _json_response(series.to_payload())

    @app.get("/api/check2d")
    def check2d(request: Request):
        x1 = _covariate(session, _q(request, "x1", required=True), "x1")
        x2 = _covariate(session, _q(request, "x2", required=True), "x2")
        summary = _q(request, "summary", "mean")
        l = _q(request, "l", 50, int)
        seed = _q(request, "seed", 0, int)
        hexes = _q(request, "hexes", grid_checks.DEFAULT_HEXES_ACROSS, int)
        if l < 2:
            raise ApiError(400, "bad_param", "check2d needs l >= 2 simulations", "l")
        res = session.residuals()
        sims = session.sims(l, seed)
        grid = grid_checks.grid_check_2d(res.values, x1, x2, summary, sims, hexes_across=hexes)
        return _json_response(grid.to_payload())

    @app.get("/api/glyphs")
    def glyphs(request: Request):
        x1 = _covariate(session, _q(request, "x1", required=True), "x1")
        x2 = _covariate(session, _q(request, "x2", required=True), "x2")
        kind = _q(request, "kind", "worm")
        cells = _q(request, "cells", 4, int)
        alpha = _q(request, "alpha", 0.95, float)
        res = session.residuals()
        if kind == "worm":
            if session.rtype != "quantile":
                raise ApiError(400, "bad_param", "worm glyphs need quantile residuals", "kind")
            grid = grid_checks.worm_glyphs(res.values, x1, x2, cells, alpha)
        elif kind == "kde":
            grid = grid_checks.kde_glyphs(res.values, x1, x2, cells)
        else:
            raise ApiError(400, "bad_param", f"unknown glyph kind {kind!r}", "kind")
        return _json_response(grid.to_payload())

    @app.get("/api/denscheck")
    def denscheck(request: Request):
        var = _q(request, "var", required=True)
        gx = _q(request, "gx", density.DEFAULT_GRID, int)
        gr = _q(request, "gr", density.DEFAULT_GRID, int)
        ref = _q(request, "ref", "auto")
        l = _q(request, "l", 0, int)
        seed = _q(request, "seed", 0, int)
        x = _covariate(session, var, "var")
        res = session.residuals()
        if ref == "auto":
            ref = {"uniform": "uniform", "quantile": "normal"}.get(session.rtype, "sim")
        if ref == "sim":
            if l < 2:
                raise ApiError(400, "bad_param", "simulated reference needs l >= 2", "l")
            model_ref = session.sims(l, seed)
        elif ref in ("normal", "uniform"):
            model_ref = ref
        else:
            raise ApiError(400, "bad_param", f"unknown reference {ref!r}", "ref")
        field = density.dens_check(res.values, x, model_ref, gx=gx, gr=gr)
        return _json_response(field.to_payload())

    @app.get("/api/effect")
    def effect(request: Request):
        if session.surface is None:
            raise ApiError(400, "no_surface", "server started without a --surface file", "mode")
        mode = _q(request, "mode", "plain")
        seed = _q(request, "seed", 0, int)
        surf = session.surface
        if mode == "plain":
            return _json_response(surf.to_payload())
        if mode == "opacity":
            return _json_response(surf.to_payload(alpha=effects.opacity_field(surf)))
        if mode == "perturb":
            return _json_response(surf.to_payload(ghat=effects.perturb_field(surf, seed)))
        raise ApiError(400, "bad_param", f"unknown mode {mode!r}", "mode")

    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
