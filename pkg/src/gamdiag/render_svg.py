"""Minimal static SVG rendering for headless CLI output.

Three primitives cover every artifact: a line with optional band/envelope
(QQ), a dot series with interval ribbon (1D checks) and a heatmap raster
(misfit fields and effect surfaces).  The interactive experience lives in the
browser client; this renderer exists so `--svg` works anywhere.
"""

from __future__ import annotations

import numpy as np

W, H = 720, 480
PAD = 48


def _scale(values, lo, hi, out_lo, out_hi):
    values = np.asarray(values, dtype=np.float64)
    if hi <= lo:
        hi = lo + 1.0
    return out_lo + (values - lo) / (hi - lo) * (out_hi - out_lo)


def _finite(*arrays):
    vals = np.concatenate([np.asarray(a, dtype=np.float64).ravel() for a in arrays if a is not None and len(np.atleast_1d(a))])
    vals = vals[np.isfinite(vals)]
    return (float(vals.min()), float(vals.max())) if len(vals) else (0.0, 1.0)


def _polyline(xs, ys, color, width=1.5, dash=None):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{extra} points="{pts}"/>'


def _polygon(xs_top, ys_top, xs_bot, ys_bot, color, opacity=0.25):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs_top, ys_top))
    pts += " " + " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs_bot[::-1], ys_bot[::-1]))
    return f'<polygon fill="{color}" fill-opacity="{opacity}" stroke="none" points="{pts}"/>'


def _frame(title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W/2:.0f}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>',
    ]


def diverging_color(t: float) -> str:
    """Blue-white-red map on [-1, 1]."""
    t = float(np.clip(t, -1.0, 1.0))
    if t < 0:
        f = 1.0 + t
        r, g, b = int(40 + 215 * f), int(80 + 175 * f), 255
    else:
        f = 1.0 - t
        r, g, b = 255, int(80 + 175 * f), int(40 + 215 * f)
    return f"rgb({r},{g},{b})"


def sequential_color(t: float) -> str:
    """Dark-to-bright single-hue map on [0, 1]."""
    t = float(np.clip(t, 0.0, 1.0))
    return f"rgb({int(15 + 225 * t)},{int(35 + 180 * t)},{int(70 + 120 * t)})"


def render_qq(payload: dict, title: str = "QQ") -> str:
    sbar = np.asarray(payload["sbar"], dtype=np.float64)
    s = np.asarray(payload["s"], dtype=np.float64)
    parts = _frame(title)
    if len(s) == 0:
        parts.append(f'<text x="{W/2}" y="{H/2}" text-anchor="middle" font-family="sans-serif">no points in range</text>')
        parts.append("</svg>")
        return "\n".join(parts)
    band_arrays = [np.asarray(b[k], dtype=np.float64) for b in payload.get("bands", []) for k in ("lo", "hi")]
    env = payload.get("envelope")
    if env:
        band_arrays += [np.asarray(env["lo"]), np.asarray(env["hi"])]
    xlo, xhi = _finite(sbar)
    ylo, yhi = _finite(s, *band_arrays)
    X = lambda v: _scale(v, xlo, xhi, PAD, W - PAD)
    Y = lambda v: _scale(v, ylo, yhi, H - PAD, PAD)
    if env:
        parts.append(_polygon(X(sbar), Y(np.asarray(env["lo"])), X(sbar), Y(np.asarray(env["hi"])), "#888888"))
    for band in payload.get("bands", []):
        parts.append(_polygon(X(sbar), Y(np.asarray(band["lo"])), X(sbar), Y(np.asarray(band["hi"])), "#4477cc"))
    parts.append(_polyline(X(np.array([xlo, xhi])), Y(np.array([xlo, xhi])), "#999999", 1.0, dash="4 3"))
    parts.append(_polyline(X(sbar), Y(s), "#cc3333", 1.8))
    parts.append("</svg>")
    return "\n".join(parts)


def render_series(payload: dict, title: str = "binned summary") -> str:
    centers = np.asarray(payload["centers"], dtype=np.float64)
    values = np.asarray([np.nan if v is None else v for v in payload["s"]], dtype=np.float64)
    lo = payload.get("lo")
    hi = payload.get("hi")
    parts = _frame(title)
    xlo, xhi = _finite(centers)
    seq = [values]
    if lo is not None:
        lo = np.asarray([np.nan if v is None else v for v in lo], dtype=np.float64)
        hi = np.asarray([np.nan if v is None else v for v in hi], dtype=np.float64)
        seq += [lo, hi]
    ylo, yhi = _finite(*seq)
    X = lambda v: _scale(v, xlo, xhi, PAD, W - PAD)
    Y = lambda v: _scale(v, ylo, yhi, H - PAD, PAD)
    if lo is not None:
        okb = np.isfinite(lo) & np.isfinite(hi)
        if okb.any():
            parts.append(_polygon(X(centers[okb]), Y(lo[okb]), X(centers[okb]), Y(hi[okb]), "#4477cc"))
    flags = np.asarray(payload.get("flags", [0] * len(centers)))
    for i, (cx, cy) in enumerate(zip(X(centers), Y(values))):
        if not np.isfinite(cy):
            continue
        color = "#bbbbbb" if flags[i] else "#cc3333"
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3.5" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def render_heatmap(x, y, matrix, title: str = "field", diverging: bool = True) -> str:
    """Raster over a regular grid; NaN cells are left unpainted."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m = np.asarray(matrix, dtype=np.float64)
    parts = _frame(title)
    finite = m[np.isfinite(m)]
    if len(finite) == 0:
        parts.append("</svg>")
        return "\n".join(parts)
    vmax = float(np.abs(finite).max()) or 1.0
    vmin = float(finite.min())
    span = float(finite.max() - vmin) or 1.0
    cw = (W - 2 * PAD) / len(x)
    ch = (H - 2 * PAD) / len(y)
    for i in range(len(x)):
        for j in range(len(y)):
            v = m[i, j]
            if not np.isfinite(v):
                continue
            color = diverging_color(v / vmax) if diverging else sequential_color((v - vmin) / span)
            px = PAD + i * cw
            py = H - PAD - (j + 1) * ch
            parts.append(f'<rect x="{px:.2f}" y="{py:.2f}" width="{cw + 0.5:.2f}" height="{ch + 0.5:.2f}" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts)
