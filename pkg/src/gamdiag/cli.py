"""Command-line driver: every diagnostic as a subcommand writing JSON (and
optionally a static SVG), plus the HTTP service and a micro-benchmark.

Column conventions: the response column is named ``y`` (override with
--response) and the family's parameter columns carry the parameter names
(gaussian: mu, sigma; poisson: mu; binomial: p; gamma: mu, k; shash: mu,
sigma, eps, delta).  Every other column is treated as a covariate.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import density, effects, grid_checks, qq, render_svg, scenarios
from .dataset import load_csv, write_csv
from .distributions import get_family
from .errors import GamdiagError
from .residuals import simulate_residuals, transform
from .server import SessionState, create_app


def _write_json(payload, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"), allow_nan=False)
        fh.write("\n")


def _write_svg(svg, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)


def _sniff_columns(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return [h.strip() for h in next(csv.reader(fh))]


def _load(args):
    family = get_family(args.family)
    response = getattr(args, "response", None) or "y"
    header = _sniff_columns(args.data)
    schema = {}
    for name in header:
        if name == response:
            schema[name] = "response"
        elif name in family.param_names:
            schema[name] = "param"
        else:
            schema[name] = "covariate"
    ds = load_csv(args.data, schema)
    return ds, family


def _cmd_scenario(args):
    ds, _sc = scenarios.generate(args.id, args.n, args.seed)
    write_csv(ds, args.out)
    print(f"wrote {args.out} ({ds.n} rows, scenario {args.id})")
    return 0


def _cmd_qq(args):
    ds, family = _load(args)
    res = transform(ds, family, args.type)
    sims = None
    if args.l >= 2:
        sims = simulate_residuals(ds, family, args.type, args.l, args.seed, workers=args.workers)
    if res.reference == "simulation" and sims is None:
        raise GamdiagError(f"{args.type} residuals need --l >= 2 for a simulated reference")
    curve = qq.compute_qq(res, sims)
    bands = {}
    if args.band != "none":
        kind = args.band
        if kind == "auto":
            kind = "ks" if args.type == "uniform" else "normal"
        bands = {kind: qq.reference_band(curve, args.alpha)}
    envelope = qq.sim_envelope(sims, args.alpha) if sims is not None else None
    binned = qq.bin_qq(curve, args.b0, bands=bands, envelope=envelope, clip_count=res.clip_count)
    payload = binned.to_payload()
    _write_json(payload, args.out)
    if args.svg:
        _write_svg(render_svg.render_qq(payload, f"QQ ({args.type})"), args.svg)
    return 0


def _cmd_check1d(args):
    ds, family = _load(args)
    res = transform(ds, family, args.type)
    sims = None
    if args.l >= 2:
        sims = simulate_residuals(ds, family, args.type, args.l, args.seed, workers=args.workers)
    series = grid_checks.grid_check_1d(res.values, ds.column(args.var), args.b, args.summary, sims, args.alpha)
    payload = series.to_payload()
    _write_json(payload, args.out)
    if args.svg:
        _write_svg(render_svg.render_series(payload, f"{args.summary} by {args.var}"), args.svg)
    return 0


def _cmd_check2d(args):
    ds, family = _load(args)
    res = transform(ds, family, args.type)
    sims = simulate_residuals(ds, family, args.type, args.l, args.seed, workers=args.workers)
    grid = grid_checks.grid_check_2d(
        res.values, ds.column(args.x1), ds.column(args.x2), args.summary, sims, hexes_across=args.hexes
    )
    _write_json(grid.to_payload(), args.out)
    return 0


def _cmd_glyphs(args):
    ds, family = _load(args)
    res = transform(ds, family, args.type)
    x1, x2 = ds.column(args.x1), ds.column(args.x2)
    if args.kind == "worm":
        grid = grid_checks.worm_glyphs(res.values, x1, x2, args.cells, args.alpha)
    else:
        grid = grid_checks.kde_glyphs(res.values, x1, x2, args.cells)
    _write_json(grid.to_payload(), args.out)
    return 0


def _cmd_denscheck(args):
    ds, family = _load(args)
    res = transform(ds, family, args.type)
    if args.ref == "auto":
        ref = {"uniform": "uniform", "quantile": "normal"}.get(args.type, "sim")
    else:
        ref = args.ref
    if ref == "sim":
        model_ref = simulate_residuals(ds, family, args.type, max(args.l, 2), args.seed, workers=args.workers)
    else:
        model_ref = ref
    field = density.dens_check(res.values, ds.column(args.var), model_ref, gx=args.gx, gr=args.gr)
    payload = field.to_payload()
    _write_json(payload, args.out)
    if args.svg:
        _write_svg(
            render_svg.render_heatmap(field.x_knots, field.r_knots, field.delta, f"density misfit over {args.var}"),
            args.svg,
        )
    return 0


def _cmd_effect(args):
    surf = effects.load_surface_csv(args.surface)
    if args.mode == "opacity":
        payload = surf.to_payload(alpha=effects.opacity_field(surf))
        matrix, diverging = np.asarray(payload["alpha"]), False
    elif args.mode == "perturb":
        ghat = effects.perturb_field(surf, args.seed)
        payload = surf.to_payload(ghat=ghat)
        matrix, diverging = ghat, True
    else:
        payload = surf.to_payload()
        matrix, diverging = surf.fhat, True
    _write_json(payload, args.out)
    if args.svg:
        _write_svg(
            render_svg.render_heatmap(surf.x1, surf.x2, matrix, f"effect ({args.mode})", diverging=diverging),
            args.svg,
        )
    return 0


def _cmd_serve(args):
    import uvicorn

    ds, family = _load(args)
    surface = effects.load_surface_csv(args.surface) if args.surface else None
    session = SessionState(
        ds, family, args.type, surface=surface, workers=args.workers, sim_timeout=args.sim_timeout
    )
    frontend = args.frontend if args.frontend else None
    app = create_app(session, frontend_dir=frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_bench(args):
    rng = np.random.default_rng(args.seed)
    n = args.n
    from .dataset import from_arrays

    y = rng.standard_normal(n)
    ds = from_arrays(
        {"y": y, "mu": np.zeros(n), "sigma": np.ones(n)},
        {"y": "response", "mu": "param", "sigma": "param"},
    )
    family = get_family("gaussian")
    t0 = time.perf_counter()
    res = transform(ds, family, "quantile")
    t1 = time.perf_counter()
    curve = qq.compute_qq(res)
    t2 = time.perf_counter()
    qq.bin_qq(curve, 1000, bands={"normal": qq.reference_band(curve, 0.95)})
    t3 = time.perf_counter()
    report = {
        "v": 1,
        "n": n,
        "transform_ms": (t1 - t0) * 1e3,
        "sort_ms": (t2 - t1) * 1e3,
        "bin_ms": (t3 - t2) * 1e3,
    }
    if args.out:
        _write_json(report, args.out)
    print(json.dumps(report, sort_keys=True))
    return 0


def _add_data_args(p, needs_type=True):
    p.add_argument("--data", required=True, help="input CSV")
    p.add_argument("--family", required=True, choices=["gaussian", "poisson", "binomial", "gamma", "shash"])
    p.add_argument("--response", default="y", help="response column name (default y)")
    if needs_type:
        p.add_argument("--type", default="quantile", choices=["uniform", "quantile", "pearson", "deviance"])
    p.add_argument("--workers", type=int, default=None, help="simulation workers (default GAMDIAG_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gamdiag", description="model diagnostics engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", help="generate a synthetic scenario dataset")
    p.add_argument("--id", required=True, choices=list(scenarios.SCENARIO_IDS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("qq", help="binned QQ curve with bands/envelope")
    _add_data_args(p)
    p.add_argument("--b0", type=int, default=1000)
    p.add_argument("--band", default="none", choices=["none", "auto", "ks", "normal"])
    p.add_argument("--alpha", type=float, default=0.95)
    p.add_argument("--l", type=int, default=0, help="simulation replicates for the envelope")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=_cmd_qq)

    p = sub.add_parser("check1d", help="binned summary along one covariate")
    _add_data_args(p)
    p.add_argument("--var", required=True)
    p.add_argument("--b", type=int, default=20)
    p.add_argument("--summary", default="mean", choices=list(grid_checks.SUMMARIES))
    p.add_argument("--l", type=int, default=50)
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=_cmd_check1d)

    p = sub.add_parser("check2d", help="hex-binned standardized summaries")
    _add_data_args(p)
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", required=True)
    p.add_argument("--summary", default="mean", choices=list(grid_checks.SUMMARIES))
    p.add_argument("--l", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hexes", type=int, default=grid_checks.DEFAULT_HEXES_ACROSS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_check2d)

    p = sub.add_parser("glyphs", help="worm or kde glyph grid")
    _add_data_args(p)
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", required=True)
    p.add_argument("--kind", default="worm", choices=["worm", "kde"])
    p.add_argument("--cells", type=int, default=4)
    p.add_argument("--alpha", type=float, default=0.95)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_glyphs)

    p = sub.add_parser("denscheck", help="conditional density misfit field")
    _add_data_args(p)
    p.add_argument("--var", required=True)
    p.add_argument("--gx", type=int, default=density.DEFAULT_GRID)
    p.add_argument("--gr", type=int, default=density.DEFAULT_GRID)
    p.add_argument("--ref", default="auto", choices=["auto", "normal", "uniform", "sim"])
    p.add_argument("--l", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=_cmd_denscheck)

    p = sub.add_parser("effect", help="smooth-effect opacity / perturbation fields")
    p.add_argument("--surface", required=True, help="CSV with columns x1,x2,fhat,vhat")
    p.add_argument("--mode", default="opacity", choices=["plain", "opacity", "perturb"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=_cmd_effect)

    p = sub.add_parser("serve", help="run the HTTP diagnostics service")
    _add_data_args(p)
    p.add_argument("--surface", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--sim-timeout", type=float, default=30.0)
    p.add_argument("--frontend", default=None, help="directory with built UI assets")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("bench", help="time the large-n QQ pipeline")
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GamdiagError as exc:
        print(f"gamdiag: {exc}", file=sys.stderr)
        return 1
    except (KeyError, FileNotFoundError) as exc:
        print(f"gamdiag: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
