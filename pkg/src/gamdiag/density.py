"""Fast kernel density machinery and the conditional-density misfit field.

Points are spread onto equally spaced knots by linear binning (each point
splits its unit mass between the two or four surrounding knots), densities
come from convolving the knot weights with a sampled Gaussian kernel, and the
misfit field compares the observed conditional density of residuals given a
covariate with its model-based counterpart through a signed distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DomainError, GamdiagError
from .residuals import SimulatedResiduals

DEFAULT_GRID = 128
# columns whose covariate density falls below this fraction of its maximum
# are masked: the density ratio is unstable on near-empty support
SUPPORT_FRACTION = 0.01
KERNEL_TRUNCATION = 4.0  # in bandwidths; leaves < 1e-4 of kernel mass outside


@dataclass
class Grid1D:
    knots: np.ndarray
    weights: np.ndarray

    @property
    def spacing(self) -> float:
        return float(self.knots[1] - self.knots[0])


@dataclass
class Grid2D:
    x_knots: np.ndarray
    r_knots: np.ndarray
    weights: np.ndarray  # shape (len(x_knots), len(r_knots))

    @property
    def x_spacing(self) -> float:
        return float(self.x_knots[1] - self.x_knots[0])

    @property
    def r_spacing(self) -> float:
        return float(self.r_knots[1] - self.r_knots[0])


@dataclass
class DensityField:
    """Misfit delta(r|x) between observed and model conditional densities."""

    x_knots: np.ndarray
    r_knots: np.ndarray
    delta: np.ndarray  # (gx, gr), NaN on masked columns
    observed: np.ndarray
    model: np.ndarray
    mask: np.ndarray  # (gx,) True where the column is masked
    distance_name: str

    def to_payload(self) -> dict:
        delta = [
            [None if not np.isfinite(v) else v for v in row] for row in self.delta.tolist()
        ]
        return {
            "v": 1,
            "x_knots": self.x_knots.tolist(),
            "r_knots": self.r_knots.tolist(),
            "delta": delta,
            "mask": self.mask.astype(int).tolist(),
            "distance": self.distance_name,
        }


def make_knots(lo: float, hi: float, g: int) -> np.ndarray:
    if g < 2:
        raise DomainError("a grid needs at least 2 knots")
    if not lo < hi:
        raise DomainError("grid range must have lo < hi")
    return np.linspace(lo, hi, g)


def select_bandwidth(x) -> float:
    """Normal-reference bandwidth 1.06 min(sd, IQR/1.349) n^(-1/5)."""
    x = np.asarray(x, dtype=np.float64)
    x = x[np.isfinite(x)]
    n = len(x)
    if n < 2:
        raise DomainError("bandwidth selection needs at least 2 points")
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    iqr_scale = (q75 - q25) / 1.349
    spread = min(sd, iqr_scale) if iqr_scale > 0 else sd
    if spread <= 0:
        raise DomainError("column is constant; supply an explicit bandwidth")
    return 1.06 * spread * n ** (-0.2)


def _fractional_positions(x, knots):
    g = len(knots)
    u = (np.asarray(x, dtype=np.float64) - knots[0]) / (knots[1] - knots[0])
    u = np.clip(u, 0.0, g - 1.0)  # out-of-range points clamp to the end knots
    k = np.minimum(u.astype(np.int64), g - 2)
    return k, u - k


def linear_bin_1d(x, knots) -> Grid1D:
    """Spread each point's unit mass linearly onto its two surrounding knots."""
    knots = np.asarray(knots, dtype=np.float64)
    if len(knots) < 2:
        raise DomainError("linear binning needs at least 2 knots")
    g = len(knots)
    x = np.asarray(x, dtype=np.float64)
    x = x[np.isfinite(x)]
    if len(x) == 0:
        return Grid1D(knots=knots, weights=np.zeros(g))
    k, f = _fractional_positions(x, knots)
    w = np.bincount(k, weights=1.0 - f, minlength=g)
    w += np.bincount(k + 1, weights=f, minlength=g)
    return Grid1D(knots=knots, weights=w)


def linear_bin_2d(x, r, x_knots, r_knots) -> Grid2D:
    """Tensor-product linear binning onto a 2D knot lattice."""
    x_knots = np.asarray(x_knots, dtype=np.float64)
    r_knots = np.asarray(r_knots, dtype=np.float64)
    if len(x_knots) < 2 or len(r_knots) < 2:
        raise DomainError("linear binning needs at least 2 knots per axis")
    gx, gr = len(x_knots), len(r_knots)
    x = np.asarray(x, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    ok = np.isfinite(x) & np.isfinite(r)
    x, r = x[ok], r[ok]
    w = np.zeros(gx * gr)
    if len(x):
        kx, fx = _fractional_positions(x, x_knots)
        kr, fr = _fractional_positions(r, r_knots)
        base = kx * gr + kr
        np.add.at(w, base, (1.0 - fx) * (1.0 - fr))
        np.add.at(w, base + 1, (1.0 - fx) * fr)
        np.add.at(w, base + gr, fx * (1.0 - fr))
        np.add.at(w, base + gr + 1, fx * fr)
    return Grid2D(x_knots=x_knots, r_knots=r_knots, weights=w.reshape(gx, gr))


def _kernel_taps(bandwidth: float, spacing: float) -> np.ndarray:
    if bandwidth <= 0:
        raise DomainError("bandwidth must be > 0")
    half = int(np.ceil(KERNEL_TRUNCATION * bandwidth / spacing))
    offsets = np.arange(-half, half + 1) * spacing
    return np.exp(-0.5 * (offsets / bandwidth) ** 2)


def binned_kde_1d(grid: Grid1D, bandwidth: float) -> np.ndarray:
    """Gaussian KDE of the binned weights, normalized to unit trapezoid mass.

    A zero-weight grid yields an all-zero density.
    """
    total = grid.weights.sum()
    if total <= 0:
        return np.zeros_like(grid.weights)
    kernel = _kernel_taps(bandwidth, grid.spacing)
    dens = ndimage.convolve1d(grid.weights, kernel, mode="constant", cval=0.0)
    mass = np.trapezoid(dens, grid.knots)
    return dens / mass if mass > 0 else dens


def binned_kde_2d(grid: Grid2D, x_bandwidth: float, r_bandwidth: float) -> np.ndarray:
    """Separable Gaussian KDE of 2D binned weights, unit trapezoid mass."""
    total = grid.weights.sum()
    if total <= 0:
        return np.zeros_like(grid.weights)
    kx = _kernel_taps(x_bandwidth, grid.x_spacing)
    kr = _kernel_taps(r_bandwidth, grid.r_spacing)
    dens = ndimage.convolve1d(grid.weights, kx, axis=0, mode="constant", cval=0.0)
    dens = ndimage.convolve1d(dens, kr, axis=1, mode="constant", cval=0.0)
    mass = np.trapezoid(np.trapezoid(dens, grid.r_knots, axis=1), grid.x_knots)
    return dens / mass if mass > 0 else dens


def direct_kde_1d(x, knots, bandwidth: float) -> np.ndarray:
    """O(n g) reference KDE used as the oracle for the binned estimator."""
    x = np.asarray(x, dtype=np.float64)
    z = (np.asarray(knots)[:, None] - x[None, :]) / bandwidth
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (len(x) * bandwidth * np.sqrt(2 * np.pi))
    return dens


@dataclass
class ConditionalDensity:
    x_knots: np.ndarray
    r_knots: np.ndarray
    cond: np.ndarray  # (gx, gr), conditional density of r given x per column
    px: np.ndarray
    mask: np.ndarray  # (gx,) True where support is too thin


def conditional_density(
    r,
    x,
    x_knots,
    r_knots,
    x_bandwidth: float,
    r_bandwidth: float,
    support_fraction: float = SUPPORT_FRACTION,
) -> ConditionalDensity:
    """Estimate p(r|x) as the ratio of a 2D and a 1D binned KDE.

    Columns whose covariate density falls below ``support_fraction`` of its
    maximum are masked (NaN) instead of divided.
    """
    x = np.asarray(x, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    ok = np.isfinite(x) & np.isfinite(r)
    joint = binned_kde_2d(linear_bin_2d(x[ok], r[ok], x_knots, r_knots), x_bandwidth, r_bandwidth)
    px = binned_kde_1d(linear_bin_1d(x[ok], x_knots), x_bandwidth)
    mask = px < support_fraction * px.max() if px.max() > 0 else np.ones_like(px, dtype=bool)
    cond = np.full_like(joint, np.nan)
    cond[~mask] = joint[~mask] / px[~mask, None]
    return ConditionalDensity(
        x_knots=np.asarray(x_knots, dtype=np.float64),
        r_knots=np.asarray(r_knots, dtype=np.float64),
        cond=cond,
        px=px,
        mask=mask,
    )


def signed_cuberoot_distance(p_obs, p_model):
    """Default misfit: signed cube root of sqrt(p_obs) - sqrt(p_model)."""
    a = np.sqrt(p_obs) - np.sqrt(p_model)
    return np.cbrt(a)


def _reference_pdf(kind: str, r_knots: np.ndarray) -> np.ndarray:
    if kind == "normal":
        return np.exp(-0.5 * r_knots**2) / np.sqrt(2.0 * np.pi)
    if kind == "uniform":
        return np.where((r_knots >= 0.0) & (r_knots <= 1.0), 1.0, 0.0)
    raise DomainError(f"unknown analytic reference {kind!r}; expected 'normal' or 'uniform'")


def dens_check(
    res_values,
    x,
    model_ref,
    gx: int = DEFAULT_GRID,
    gr: int = DEFAULT_GRID,
    x_bandwidth: float | None = None,
    r_bandwidth: float | None = None,
    x_range: tuple[float, float] | None = None,
    r_range: tuple[float, float] | None = None,
    distance=None,
    support_fraction: float = SUPPORT_FRACTION,
) -> DensityField:
    """Misfit field delta(r|x) between observed and model conditional densities.

    ``model_ref`` is either an analytic reference name ("normal" for quantile
    residuals, "uniform" for uniform residuals) or a SimulatedResiduals whose
    rows are processed exactly like the observed residuals.  Positive delta
    marks cells where the empirical density exceeds the model's, negative the
    reverse; the distance function is pluggable and defaults to the signed
    cube root of the difference of root densities.
    """
    r = np.asarray(res_values, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if len(r) != len(x):
        raise DomainError("residuals and covariate must have equal length")
    ok = np.isfinite(r) & np.isfinite(x)
    r_ok, x_ok = r[ok], x[ok]
    if len(r_ok) < 2:
        raise DomainError("dens_check needs at least 2 finite observations")

    hx = x_bandwidth if x_bandwidth is not None else select_bandwidth(x_ok)
    hr = r_bandwidth if r_bandwidth is not None else select_bandwidth(r_ok)
    if x_range is None:
        x_range = (x_ok.min() - 3 * hx, x_ok.max() + 3 * hx)
    if r_range is None:
        r_range = (r_ok.min() - 3 * hr, r_ok.max() + 3 * hr)
    x_knots = make_knots(x_range[0], x_range[1], gx)
    r_knots = make_knots(r_range[0], r_range[1], gr)

    obs = conditional_density(r_ok, x_ok, x_knots, r_knots, hx, hr, support_fraction)

    if isinstance(model_ref, SimulatedResiduals):
        if not model_ref.aligned:
            raise DomainError("dens_check needs row-aligned simulated residuals")
        sim_r = model_ref.values[:, ok].ravel()
        sim_x = np.tile(x_ok, model_ref.l)
        model = conditional_density(sim_r, sim_x, x_knots, r_knots, hx, hr, support_fraction)
        model_cond = model.cond
        mask = obs.mask | model.mask
    else:
        ref = _reference_pdf(model_ref, r_knots)
        model_cond = np.broadcast_to(ref, obs.cond.shape).copy()
        mask = obs.mask.copy()

    dist = distance or signed_cuberoot_distance
    name = getattr(dist, "__name__", "custom")
    if dist is signed_cuberoot_distance:
        name = "signed_cuberoot"

    delta = np.full_like(obs.cond, np.nan)
    rows = ~mask
    p_obs = np.nan_to_num(obs.cond[rows], nan=0.0)
    p_mod = np.nan_to_num(model_cond[rows], nan=0.0)
    vals = np.asarray(dist(p_obs, p_mod), dtype=np.float64)
    if not np.all(np.isfinite(vals)):
        raise GamdiagError("distance function produced non-finite values on finite densities")
    delta[rows] = vals
    return DensityField(
        x_knots=x_knots,
        r_knots=r_knots,
        delta=delta,
        observed=obs.cond,
        model=model_cond,
        mask=mask,
        distance_name=name,
    )
