"""QQ curves, reference bands, simulation envelopes and arc-length binning.

The full sorted curve is computed once (O(n log n)); rendering and zooming
work on an equal-arc-length binned compression of it, so a million-point
curve redraws from a few hundred summary points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ConfigError, DegenerateCurveError, DomainError
from .residuals import ResidualVector, SimulatedResiduals


@dataclass
class QQCurve:
    """Sorted observed residuals against model-based theoretical quantiles."""

    r: np.ndarray
    rbar: np.ndarray
    source: str  # "analytic" | "simulation"
    rtype: str

    @property
    def n(self) -> int:
        return len(self.r)


@dataclass
class BinnedQQ:
    """Equal-arc-length compression of a QQ curve and its bands."""

    s: np.ndarray
    sbar: np.ndarray
    counts: np.ndarray
    b0: int
    bands: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    envelope: tuple[np.ndarray, np.ndarray] | None = None
    clip_count: int = 0

    @property
    def b(self) -> int:
        return len(self.s)

    @property
    def empty(self) -> bool:
        return self.b == 0

    def to_payload(self) -> dict:
        payload = {
            "v": 1,
            "s": self.s.tolist(),
            "sbar": self.sbar.tolist(),
            "counts": self.counts.tolist(),
            "b0": self.b0,
            "bands": [
                {"kind": kind, "lo": lo.tolist(), "hi": hi.tolist()}
                for kind, (lo, hi) in self.bands.items()
            ],
            "envelope": (
                None
                if self.envelope is None
                else {"lo": self.envelope[0].tolist(), "hi": self.envelope[1].tolist()}
            ),
            "clip_count": self.clip_count,
            "empty": self.empty,
        }
        return payload


def plotting_positions(n: int) -> np.ndarray:
    """Midpoint plotting positions (i - 0.5) / n for i = 1..n."""
    return (np.arange(1, n + 1) - 0.5) / n


def compute_qq(res: ResidualVector, sims: SimulatedResiduals | None = None) -> QQCurve:
    """Build the sorted QQ curve for a residual vector.

    With ``sims`` the theoretical quantiles are the replicate means of each
    order statistic; otherwise the analytic reference of the residual type is
    used (uniform or normal), which exists only for uniform/quantile residuals.
    """
    r = np.sort(res.values)
    n = len(r)
    if sims is not None:
        if sims.l < 2:
            raise ConfigError("simulation reference needs at least 2 replicates")
        if sims.n != n:
            raise ConfigError(f"simulated width {sims.n} != residual length {n}")
        rbar = sims.sorted_rows().mean(axis=0)
        return QQCurve(r=r, rbar=rbar, source="simulation", rtype=res.rtype)
    if res.reference == "uniform":
        rbar = plotting_positions(n)
    elif res.reference == "normal":
        rbar = special.ndtri(plotting_positions(n))
    else:
        raise ConfigError(
            f"{res.rtype} residuals have no analytic reference; pass simulated replicates"
        )
    return QQCurve(r=r, rbar=rbar, source="analytic", rtype=res.rtype)


def _cumulative_arc(curve: QQCurve) -> np.ndarray:
    if curve.n < 2:
        raise DegenerateCurveError("arc length needs at least two points")
    seg = np.hypot(np.diff(curve.r), np.diff(curve.rbar))
    out = np.empty(curve.n)
    out[0] = 0.0
    np.cumsum(seg, out=out[1:])
    return out


def arc_length(curve: QQCurve) -> float:
    """Total arc length of the (r, rbar) polyline."""
    return float(_cumulative_arc(curve)[-1])


def ks_band(n: int, alpha: float) -> float:
    """Constant half-width of the Kolmogorov-Smirnov band for uniform residuals.

    Uses the asymptotic critical value c = sqrt(-ln(a/2) / 2) at tail mass
    a = 1 - alpha, scaled by 1/sqrt(n); conservative at small n.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must be in (0, 1)")
    tail = 1.0 - alpha
    return float(np.sqrt(-np.log(tail / 2.0) / 2.0) / np.sqrt(n))


def normal_band(probs, n: int, alpha: float) -> np.ndarray:
    """Pointwise half-widths around normal quantiles at the given probabilities.

    half_width = Phi^{-1}((1+alpha)/2) * phi(z)^{-1} * sqrt(p (1-p) / n),
    the asymptotic order-statistic band for normal scores.
    """
    p = np.asarray(probs, dtype=np.float64)
    if np.any(p <= 0) or np.any(p >= 1):
        raise DomainError("probabilities must be in (0, 1)")
    z = special.ndtri(p)
    phi = np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)
    return special.ndtri((1.0 + alpha) / 2.0) / phi * np.sqrt(p * (1.0 - p) / n)


def reference_band(curve: QQCurve, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Analytic band (lo, hi) around the theoretical quantiles, per point."""
    if curve.rtype == "uniform":
        d = ks_band(curve.n, alpha)
        return np.clip(curve.rbar - d, 0.0, 1.0), np.clip(curve.rbar + d, 0.0, 1.0)
    if curve.rtype == "quantile":
        hw = normal_band(plotting_positions(curve.n), curve.n, alpha)
        return curve.rbar - hw, curve.rbar + hw
    raise ConfigError(f"no analytic band for residual type {curve.rtype!r}")


def sim_envelope(sims: SimulatedResiduals, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Empirical (lo, hi) envelope of each order statistic across replicates.

    Quantiles use linear interpolation between order statistics; results do
    not depend on replicate ordering.
    """
    if sims.l < 2:
        raise ConfigError("envelope needs at least 2 replicates")
    if not 0.0 < alpha <= 1.0:
        raise DomainError("alpha must be in (0, 1]")
    rows = sims.sorted_rows()
    lo = np.quantile(rows, (1.0 - alpha) / 2.0, axis=0)
    hi = np.quantile(rows, (1.0 + alpha) / 2.0, axis=0)
    return lo, hi


def _bin_window(
    curve: QQCurve,
    start: int,
    stop: int,
    b0: int,
    bands=None,
    envelope=None,
    clip_count: int = 0,
) -> BinnedQQ:
    if b0 < 1:
        raise DomainError("bin budget b0 must be >= 1")
    bands = bands or {}
    if stop - start <= 0:
        z = np.empty(0)
        return BinnedQQ(
            s=z,
            sbar=z.copy(),
            counts=np.empty(0, dtype=np.int64),
            b0=b0,
            bands={k: (z.copy(), z.copy()) for k in bands},
            envelope=None if envelope is None else (z.copy(), z.copy()),
            clip_count=clip_count,
        )
    r = curve.r[start:stop]
    rbar = curve.rbar[start:stop]
    m = stop - start
    if m == 1:
        idx = np.zeros(1, dtype=np.int64)
    else:
        seg = np.hypot(np.diff(r), np.diff(rbar))
        h = np.empty(m)
        h[0] = 0.0
        np.cumsum(seg, out=h[1:])
        total = h[-1]
        if total <= 0.0:
            idx = np.zeros(m, dtype=np.int64)
        else:
            idx = np.minimum((h / (total / b0)).astype(np.int64), b0 - 1)
    counts = np.bincount(idx, minlength=b0)
    keep = counts > 0

    def binmean(v):
        return np.bincount(idx, weights=v, minlength=b0)[keep] / counts[keep]

    out_bands = {
        kind: (binmean(lo[start:stop]), binmean(hi[start:stop]))
        for kind, (lo, hi) in bands.items()
    }
    out_env = None
    if envelope is not None:
        out_env = (binmean(envelope[0][start:stop]), binmean(envelope[1][start:stop]))
    return BinnedQQ(
        s=binmean(r),
        sbar=binmean(rbar),
        counts=counts[keep],
        b0=b0,
        bands=out_bands,
        envelope=out_env,
        clip_count=clip_count,
    )


def bin_qq(curve: QQCurve, b0: int = 1000, bands=None, envelope=None, clip_count: int = 0) -> BinnedQQ:
    """Average curve, bands and envelope within ``b0`` equal-arc-length bins.

    Empty bins are dropped, so the realized bin count can be below ``b0``.
    ``bands`` maps a band kind to full-length (lo, hi) vectors aligned to the
    sorted curve; the envelope is a per-order-statistic (lo, hi) pair.
    """
    if curve.n < 2 and curve.n != 1:
        raise DegenerateCurveError("cannot bin an empty curve")
    return _bin_window(curve, 0, curve.n, b0, bands, envelope, clip_count)


def zoom(
    curve: QQCurve,
    lo: float,
    hi: float,
    b0: int = 1000,
    bands=None,
    envelope=None,
    clip_count: int = 0,
) -> BinnedQQ:
    """Re-bin the cached sorted curve over a theoretical-axis window.

    The contiguous index window with rbar in [lo, hi] is located by binary
    search, then binning runs on the window only; no re-sort happens.  An
    empty window yields an empty BinnedQQ rather than an error.
    """
    if not lo < hi:
        raise DomainError("zoom needs lo < hi")
    start = int(np.searchsorted(curve.rbar, lo, side="left"))
    stop = int(np.searchsorted(curve.rbar, hi, side="right"))
    return _bin_window(curve, start, stop, b0, bands, envelope, clip_count)
