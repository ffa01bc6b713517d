"""Binned scalar-summary checks (1D and hexagonal 2D) and glyph grids.

Observed residuals are binned along one or two covariates and reduced to a
scalar summary per bin; the same binning applied to simulated replicate
residuals yields either reference intervals (1D) or a per-bin mean and
standard deviation used to standardize the observed summary (2D hexagons).
Glyph grids carry a small vector payload per coarse cell instead: a detrended
QQ (worm) or a per-cell kernel density curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .density import binned_kde_1d, linear_bin_1d, make_knots, select_bandwidth
from .errors import ConfigError, DomainError
from .qq import normal_band
from .residuals import SimulatedResiduals

SUMMARIES = ("mean", "sd", "skewness")
# sd and skewness are too unstable below this many points per bin
MIN_BIN_COUNT = 5
DEFAULT_HEXES_ACROSS = 30


def _group_moments(idx, values, nbins):
    """Per-group count and raw power sums up to order three."""
    cnt = np.bincount(idx, minlength=nbins)
    s1 = np.bincount(idx, weights=values, minlength=nbins)
    s2 = np.bincount(idx, weights=values * values, minlength=nbins)
    s3 = np.bincount(idx, weights=values * values * values, minlength=nbins)
    return cnt, s1, s2, s3


def _summary_from_moments(name, cnt, s1, s2, s3):
    """Vectorized summary per group; NaN where undefined."""
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = s1 / cnt
        if name == "mean":
            return mean
        m2 = s2 / cnt - mean**2
        if name == "sd":
            var = np.where(cnt > 1, (s2 - cnt * mean**2) / np.maximum(cnt - 1, 1), np.nan)
            return np.sqrt(np.maximum(var, 0.0))
        if name == "skewness":
            m3 = s3 / cnt - 3 * mean * (s2 / cnt) + 2 * mean**3
            return m3 / np.maximum(m2, 0.0) ** 1.5
    raise DomainError(f"unknown summary {name!r}; expected one of {SUMMARIES}")


def summarize(name: str, values: np.ndarray) -> float:
    """Scalar summary of one group (same definitions as the binned path)."""
    cnt, s1, s2, s3 = _group_moments(np.zeros(len(values), dtype=np.int64), values, 1)
    return float(_summary_from_moments(name, cnt, s1, s2, s3)[0])


@dataclass
class SummarySeries:
    centers: np.ndarray
    values: np.ndarray
    lo: np.ndarray | None
    hi: np.ndarray | None
    counts: np.ndarray
    flags: np.ndarray  # True = excluded from RI comparison
    summary: str
    edges: np.ndarray

    def to_payload(self) -> dict:
        def opt(a):
            return None if a is None else [None if not np.isfinite(v) else v for v in a.tolist()]

        return {
            "v": 1,
            "centers": self.centers.tolist(),
            "s": opt(self.values),
            "lo": opt(self.lo),
            "hi": opt(self.hi),
            "counts": self.counts.tolist(),
            "flags": self.flags.astype(int).tolist(),
            "summary": self.summary,
        }


def grid_check_1d(
    res_values,
    x,
    b: int,
    summary: str = "mean",
    sims: SimulatedResiduals | None = None,
    alpha: float = 0.9,
    min_count: int = MIN_BIN_COUNT,
) -> SummarySeries:
    """Summaries of residuals in ``b`` equal-width bins along a covariate.

    Reference intervals come from binning each simulated replicate with the
    same edges and taking empirical quantiles of the replicate summaries per
    bin.  Bins whose summary is undefined or whose count is below the minimum
    (for sd/skewness) are flagged and excluded from interval comparison.
    """
    if b < 1:
        raise DomainError("bin count b must be >= 1")
    if summary not in SUMMARIES:
        raise DomainError(f"unknown summary {summary!r}; expected one of {SUMMARIES}")
    r = np.asarray(res_values, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    ok = np.isfinite(x)
    r_ok, x_ok = r[ok], x[ok]
    if len(x_ok) == 0:
        raise DomainError("no finite covariate values")
    edges = np.linspace(x_ok.min(), x_ok.max(), b + 1)
    idx = np.clip(np.searchsorted(edges, x_ok, side="right") - 1, 0, b - 1)

    cnt, s1, s2, s3 = _group_moments(idx, r_ok, b)
    values = _summary_from_moments(summary, cnt, s1, s2, s3)
    xbar = np.where(cnt > 0, np.bincount(idx, weights=x_ok, minlength=b) / np.maximum(cnt, 1), 0.5 * (edges[:-1] + edges[1:]))

    need = 1 if summary == "mean" else min_count
    flags = (cnt < need) | ~np.isfinite(values)

    lo = hi = None
    if sims is not None:
        if not sims.aligned:
            raise ConfigError("grid_check_1d needs row-aligned simulated residuals")
        sim_stats = np.empty((sims.l, b))
        for v in range(sims.l):
            row = sims.values[v][ok]
            c, a1, a2, a3 = _group_moments(idx, row, b)
            sim_stats[v] = _summary_from_moments(summary, c, a1, a2, a3)
        lo = np.quantile(sim_stats, (1 - alpha) / 2, axis=0)
        hi = np.quantile(sim_stats, (1 + alpha) / 2, axis=0)
    return SummarySeries(
        centers=xbar,
        values=values,
        lo=lo,
        hi=hi,
        counts=cnt,
        flags=flags,
        summary=summary,
        edges=edges,
    )


@dataclass
class HexLattice:
    """Offset hexagon lattice over covariates standardized to the unit square.

    Row spacing is w * sqrt(3)/2 with odd rows shifted by w/2, so nearest
    centers tile the plane into regular hexagons.
    """

    x1_min: float
    x1_range: float
    x2_min: float
    x2_range: float
    w: float  # horizontal center spacing in standardized units

    @property
    def vstep(self) -> float:
        return self.w * np.sqrt(3.0) / 2.0

    @classmethod
    def from_data(cls, x1, x2, hexes_across: int = DEFAULT_HEXES_ACROSS) -> "HexLattice":
        x1 = np.asarray(x1, dtype=np.float64)
        x2 = np.asarray(x2, dtype=np.float64)
        ok = np.isfinite(x1) & np.isfinite(x2)
        if hexes_across < 1:
            raise DomainError("hexes_across must be >= 1")
        r1 = np.ptp(x1[ok]) or 1.0
        r2 = np.ptp(x2[ok]) or 1.0
        return cls(
            x1_min=float(x1[ok].min()),
            x1_range=float(r1),
            x2_min=float(x2[ok].min()),
            x2_range=float(r2),
            w=1.0 / hexes_across,
        )

    def standardize(self, x1, x2):
        u = (np.asarray(x1, dtype=np.float64) - self.x1_min) / self.x1_range
        v = (np.asarray(x2, dtype=np.float64) - self.x2_min) / self.x2_range
        return u, v

    def center(self, row, col):
        """Hex center in original data coordinates."""
        row = np.asarray(row)
        col = np.asarray(col)
        u = col * self.w + (row % 2) * (self.w / 2.0)
        v = row * self.vstep
        return self.x1_min + u * self.x1_range, self.x2_min + v * self.x2_range

    def to_payload(self) -> dict:
        return {
            "x1_min": self.x1_min,
            "x1_range": self.x1_range,
            "x2_min": self.x2_min,
            "x2_range": self.x2_range,
            "w": self.w,
            "vstep": self.vstep,
        }


def hex_assign(x1, x2, lattice: HexLattice) -> tuple[np.ndarray, np.ndarray]:
    """Nearest hexagon (row, col) per point on the offset lattice.

    Two candidate rows surround every point; the closer center wins and exact
    ties break to the lexicographically smaller (row, col).
    """
    u, v = lattice.standardize(x1, x2)
    w = lattice.w
    vstep = lattice.vstep

    rows = np.floor(v / vstep)
    cand = []
    for row in (rows, rows + 1.0):
        off = (np.asarray(row, dtype=np.int64) % 2) * (w / 2.0)
        col = np.round((u - off) / w)
        cu = col * w + off
        cv = row * vstep
        d2 = (u - cu) ** 2 + (v - cv) ** 2
        cand.append((d2, row.astype(np.int64), col.astype(np.int64)))
    (d0, r0, c0), (d1, r1, c1) = cand
    better1 = d1 < d0
    tie = d1 == d0
    lex1 = tie & ((r1 < r0) | ((r1 == r0) & (c1 < c0)))
    pick1 = better1 | lex1
    return np.where(pick1, r1, r0), np.where(pick1, c1, c0)


@dataclass
class HexCell:
    row: int
    col: int
    center: tuple[float, float]
    count: int
    s: float
    sim_mean: float
    sim_sd: float
    z: float
    flag: bool


@dataclass
class HexSummaryGrid:
    lattice: HexLattice
    cells: list[HexCell]
    summary: str

    def to_payload(self) -> dict:
        def num(x):
            return None if not np.isfinite(x) else float(x)

        return {
            "v": 1,
            "lattice": self.lattice.to_payload(),
            "summary": self.summary,
            "hexes": [
                {
                    "q": c.col,
                    "r": c.row,
                    "center": [c.center[0], c.center[1]],
                    "count": c.count,
                    "s": num(c.s),
                    "z": num(c.z),
                    "flag": int(c.flag),
                }
                for c in self.cells
            ],
        }


def grid_check_2d(
    res_values,
    x1,
    x2,
    summary: str = "mean",
    sims: SimulatedResiduals | None = None,
    lattice: HexLattice | None = None,
    hexes_across: int = DEFAULT_HEXES_ACROSS,
    min_count: int = MIN_BIN_COUNT,
) -> HexSummaryGrid:
    """Hexagon-binned residual summaries standardized against simulations.

    Per hexagon the observed summary s is reduced to z = (s - m) / sd using
    the mean and standard deviation of the replicate summaries in the same
    hexagon.  Hexes with too few points or zero replicate spread are flagged.
    """
    if summary not in SUMMARIES:
        raise DomainError(f"unknown summary {summary!r}; expected one of {SUMMARIES}")
    r = np.asarray(res_values, dtype=np.float64)
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    ok = np.isfinite(x1) & np.isfinite(x2)
    if lattice is None:
        lattice = HexLattice.from_data(x1[ok], x2[ok], hexes_across)
    rows, cols = hex_assign(x1[ok], x2[ok], lattice)
    key = np.stack([rows, cols], axis=1)
    uniq, inverse = np.unique(key, axis=0, return_inverse=True)
    nhex = len(uniq)

    cnt, s1, s2, s3 = _group_moments(inverse, r[ok], nhex)
    obs = _summary_from_moments(summary, cnt, s1, s2, s3)

    if sims is not None:
        if sims.l < 2:
            raise ConfigError("hex standardization needs at least 2 replicates")
        if not sims.aligned:
            raise ConfigError("grid_check_2d needs row-aligned simulated residuals")
        sim_stats = np.empty((sims.l, nhex))
        for v in range(sims.l):
            c, a1, a2, a3 = _group_moments(inverse, sims.values[v][ok], nhex)
            sim_stats[v] = _summary_from_moments(summary, c, a1, a2, a3)
        sim_mean = sim_stats.mean(axis=0)
        sim_sd = sim_stats.std(axis=0, ddof=1)
    else:
        sim_mean = np.full(nhex, np.nan)
        sim_sd = np.full(nhex, np.nan)

    need = 1 if summary == "mean" else min_count
    with np.errstate(invalid="ignore", divide="ignore"):
        z = (obs - sim_mean) / sim_sd
    flags = (cnt < need) | ~np.isfinite(obs) | ~(sim_sd > 0) | ~np.isfinite(z)

    cx, cy = lattice.center(uniq[:, 0], uniq[:, 1])
    cells = [
        HexCell(
            row=int(uniq[i, 0]),
            col=int(uniq[i, 1]),
            center=(float(cx[i]), float(cy[i])),
            count=int(cnt[i]),
            s=float(obs[i]),
            sim_mean=float(sim_mean[i]),
            sim_sd=float(sim_sd[i]),
            z=float(z[i]) if np.isfinite(z[i]) else float("nan"),
            flag=bool(flags[i]),
        )
        for i in range(nhex)
    ]
    return HexSummaryGrid(lattice=lattice, cells=cells, summary=summary)


@dataclass
class GlyphCell:
    bounds: tuple[float, float, float, float]  # x1lo, x1hi, x2lo, x2hi
    kind: str
    payload: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not self.payload


@dataclass
class GlyphGrid:
    cells: list[GlyphCell]
    kind: str
    r_knots: np.ndarray | None = None  # shared KDE axis, kde kind only

    def to_payload(self) -> dict:
        return {
            "v": 1,
            "kind": self.kind,
            "r_knots": None if self.r_knots is None else self.r_knots.tolist(),
            "cells": [
                {"bounds": list(c.bounds), "kind": c.kind, "payload": c.payload}
                for c in self.cells
            ],
        }


def _cell_partition(x1, x2, cells):
    if isinstance(cells, int):
        cells = (cells, cells)
    c1, c2 = cells
    if c1 < 1 or c2 < 1:
        raise DomainError("glyph grid needs at least one cell per axis")
    e1 = np.linspace(x1.min(), x1.max(), c1 + 1)
    e2 = np.linspace(x2.min(), x2.max(), c2 + 1)
    i1 = np.clip(np.searchsorted(e1, x1, side="right") - 1, 0, c1 - 1)
    i2 = np.clip(np.searchsorted(e2, x2, side="right") - 1, 0, c2 - 1)
    return e1, e2, i1 * c2 + i2, c1, c2


def worm_glyphs(
    res_values,
    x1,
    x2,
    cells=4,
    alpha: float = 0.95,
    min_count: int = 20,
    max_points: int = 200,
) -> GlyphGrid:
    """Detrended QQ (worm) payloads per coarse rectangular cell.

    Each cell sorts its member residuals, subtracts the normal quantiles at
    midpoint plotting positions and attaches pointwise band half-widths; cells
    below ``min_count`` stay empty.  Large cells are thinned to evenly spaced
    order statistics so the payload stays bounded.
    """
    r = np.asarray(res_values, dtype=np.float64)
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    ok = np.isfinite(x1) & np.isfinite(x2)
    r, x1, x2 = r[ok], x1[ok], x2[ok]
    e1, e2, idx, c1, c2 = _cell_partition(x1, x2, cells)

    out = []
    for a in range(c1):
        for b in range(c2):
            bounds = (float(e1[a]), float(e1[a + 1]), float(e2[b]), float(e2[b + 1]))
            member = r[idx == a * c2 + b]
            m = len(member)
            if m < min_count:
                out.append(GlyphCell(bounds=bounds, kind="worm"))
                continue
            srt = np.sort(member)
            if m > max_points:
                ranks = np.unique(np.linspace(0, m - 1, max_points).astype(np.int64))
            else:
                ranks = np.arange(m)
            p = (ranks + 0.5) / m
            zq = special.ndtri(p)
            dev = srt[ranks] - zq
            hw = normal_band(p, m, alpha)
            outside = np.abs(dev) > hw
            out.append(
                GlyphCell(
                    bounds=bounds,
                    kind="worm",
                    payload={
                        "z": zq.tolist(),
                        "dev": dev.tolist(),
                        "halfwidth": hw.tolist(),
                        "outside": outside.astype(int).tolist(),
                        "count": int(m),
                    },
                )
            )
    return GlyphGrid(cells=out, kind="worm")


def kde_glyphs(
    res_values,
    x1,
    x2,
    cells=4,
    grid_size: int = 64,
    bandwidth: float | None = None,
) -> GlyphGrid:
    """Per-cell kernel density curves of the residuals on one shared axis."""
    r = np.asarray(res_values, dtype=np.float64)
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    ok = np.isfinite(x1) & np.isfinite(x2) & np.isfinite(r)
    r, x1, x2 = r[ok], x1[ok], x2[ok]
    h = bandwidth if bandwidth is not None else select_bandwidth(r)
    knots = make_knots(r.min() - 3 * h, r.max() + 3 * h, grid_size)
    e1, e2, idx, c1, c2 = _cell_partition(x1, x2, cells)

    out = []
    for a in range(c1):
        for b in range(c2):
            bounds = (float(e1[a]), float(e1[a + 1]), float(e2[b]), float(e2[b + 1]))
            member = r[idx == a * c2 + b]
            if len(member) == 0:
                out.append(GlyphCell(bounds=bounds, kind="kde"))
                continue
            dens = binned_kde_1d(linear_bin_1d(member, knots), h)
            out.append(
                GlyphCell(
                    bounds=bounds,
                    kind="kde",
                    payload={"density": dens.tolist(), "count": int(len(member))},
                )
            )
    return GlyphGrid(cells=out, kind="kde", r_knots=knots)
