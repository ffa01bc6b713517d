import numpy as np
import pytest
from scipy import special

from gamdiag.errors import ConfigError, DomainError
from gamdiag.grid_checks import (
    HexLattice,
    grid_check_1d,
    grid_check_2d,
    hex_assign,
    kde_glyphs,
    summarize,
    worm_glyphs,
)
from gamdiag.qq import normal_band
from gamdiag.residuals import SimulatedResiduals

RNG = np.random.default_rng(0)


def sims_of(values):
    return SimulatedResiduals(values=np.asarray(values, dtype=float), rtype="quantile", seed=0)


# ------------------------------------------------------------- summaries


def test_skewness_of_symmetric_triple_is_zero():
    assert summarize("skewness", np.array([-1.0, 0.0, 1.0])) == pytest.approx(0.0)


def test_skewness_scale_and_sign():
    x = RNG.gamma(2.0, size=2000)
    s = summarize("skewness", x)
    assert summarize("skewness", 3.0 * x) == pytest.approx(s, rel=1e-9)
    assert summarize("skewness", -x) == pytest.approx(-s, rel=1e-9)


def test_sd_uses_unbiased_denominator():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    assert summarize("sd", x) == pytest.approx(np.std(x, ddof=1))


# ------------------------------------------------------------- 1D checks


def test_constant_residuals_mean_and_flagged_sd():
    x = np.linspace(0, 1, 40)
    r = np.full(40, 2.5)
    series = grid_check_1d(r, x, b=4, summary="mean")
    np.testing.assert_allclose(series.values, 2.5)
    singles = grid_check_1d(r[:4], x[:4], b=4, summary="sd")
    assert singles.flags.all()  # one point per bin: sd undefined


def test_single_bin_mean_reproduces_global_mean():
    r = RNG.standard_normal(1000)
    x = RNG.uniform(0, 1, 1000)
    series = grid_check_1d(r, x, b=1, summary="mean")
    assert series.values[0] == pytest.approx(r.mean(), abs=1e-12)


def test_bin_partition_counts():
    r = RNG.standard_normal(500)
    x = RNG.uniform(-2, 2, 500)
    series = grid_check_1d(r, x, b=13, summary="mean")
    assert series.counts.sum() == 500


def test_nan_covariate_rows_excluded():
    x = np.array([0.0, 0.5, np.nan, 1.0])
    r = np.array([1.0, 2.0, 100.0, 3.0])
    series = grid_check_1d(r, x, b=2, summary="mean")
    assert series.counts.sum() == 3


def test_reference_intervals_cover_well_specified_sd():
    # Monte Carlo oracle: under the truth, about 10% of bins fall outside a
    # 90% interval; require <= 20% averaged over seeds
    from gamdiag.distributions import get_family
    from gamdiag.residuals import simulate_residuals, transform
    from helpers import gaussian_dataset

    fam = get_family("gaussian")
    outside = []
    for seed in range(8):
        ds = gaussian_dataset(5000, seed)
        res = transform(ds, fam, "quantile")
        sims = simulate_residuals(ds, fam, "quantile", 50, seed + 77)
        x = np.random.default_rng(seed).uniform(0, 1, 5000)
        series = grid_check_1d(res.values, x, b=20, summary="sd", sims=sims, alpha=0.9)
        ok = ~series.flags
        outside.append(np.mean((series.values[ok] < series.lo[ok]) | (series.values[ok] > series.hi[ok])))
    assert np.mean(outside) <= 0.2


def test_misaligned_sims_rejected():
    r = RNG.standard_normal(100)
    x = RNG.uniform(0, 1, 100)
    sims = SimulatedResiduals(values=np.zeros((3, 100)), rtype="quantile", seed=0, aligned=False)
    with pytest.raises(ConfigError):
        grid_check_1d(r, x, 5, "mean", sims)


# ------------------------------------------------------------- hexagons


def test_point_at_center_maps_to_that_hex():
    lattice = HexLattice(x1_min=0.0, x1_range=1.0, x2_min=0.0, x2_range=1.0, w=0.1)
    cx, cy = lattice.center(np.array([4]), np.array([3]))
    rows, cols = hex_assign(cx, cy, lattice)
    assert rows[0] == 4 and cols[0] == 3


def test_lattice_translation_equivariance():
    lattice = HexLattice(x1_min=0.0, x1_range=1.0, x2_min=0.0, x2_range=1.0, w=0.1)
    pts_x = RNG.uniform(0.2, 0.6, 200)
    pts_y = RNG.uniform(0.2, 0.6, 200)
    r0, c0 = hex_assign(pts_x, pts_y, lattice)
    # shift by one full horizontal period (w in standardized units)
    r1, c1 = hex_assign(pts_x + 0.1, pts_y, lattice)
    np.testing.assert_array_equal(r1, r0)
    np.testing.assert_array_equal(c1, c0 + 1)
    # shift by two rows (one vertical period of the two-row lattice)
    r2, c2 = hex_assign(pts_x, pts_y + 2 * lattice.vstep, lattice)
    np.testing.assert_array_equal(r2, r0 + 2)
    np.testing.assert_array_equal(c2, c0)


def test_hex_assignment_is_nearest_center_brute_force():
    # oracle: brute force over all candidate centers in a window
    lattice = HexLattice(x1_min=0.0, x1_range=1.0, x2_min=0.0, x2_range=1.0, w=1 / 7)
    pts_x = RNG.uniform(0, 1, 10**4)
    pts_y = RNG.uniform(0, 1, 10**4)
    rows, cols = hex_assign(pts_x, pts_y, lattice)
    u, v = lattice.standardize(pts_x, pts_y)
    w, vs = lattice.w, lattice.vstep
    got_d2 = (u - (cols * w + (rows % 2) * w / 2)) ** 2 + (v - rows * vs) ** 2
    best = np.full(len(u), np.inf)
    for row in range(-1, 10):
        off = (row % 2) * w / 2
        for col in range(-1, 9):
            d2 = (u - (col * w + off)) ** 2 + (v - row * vs) ** 2
            best = np.minimum(best, d2)
    np.testing.assert_allclose(got_d2, best, atol=1e-12)


def test_grid2d_standardization_null():
    rng = np.random.default_rng(1)
    n, l = 20000, 40
    r = rng.standard_normal(n)
    x1 = rng.uniform(0, 1, n)
    x2 = rng.uniform(0, 1, n)
    sims = sims_of(rng.standard_normal((l, n)))
    grid = grid_check_2d(r, x1, x2, "sd", sims, hexes_across=12)
    z = np.array([c.z for c in grid.cells if not c.flag])
    assert abs(z.mean()) <= 0.2
    assert 0.7 <= z.std(ddof=1) <= 1.3


def test_grid2d_degenerate_sims_flagged():
    n = 200
    r = RNG.standard_normal(n)
    x1 = RNG.uniform(0, 1, n)
    x2 = RNG.uniform(0, 1, n)
    sims = sims_of(np.vstack([r, r]))  # identical rows: sim sd is 0
    grid = grid_check_2d(r, x1, x2, "sd", sims, hexes_across=3)
    assert all(c.flag for c in grid.cells)


def test_grid2d_sd_translation_invariant():
    n = 3000
    r = RNG.standard_normal(n)
    x1 = RNG.uniform(0, 1, n)
    x2 = RNG.uniform(0, 1, n)
    sims = sims_of(RNG.standard_normal((5, n)))
    a = grid_check_2d(r, x1, x2, "sd", sims, hexes_across=6)
    b = grid_check_2d(r + 10.0, x1, x2, "sd", sims, hexes_across=6)
    np.testing.assert_allclose(
        [c.s for c in a.cells], [c.s for c in b.cells], rtol=1e-10, equal_nan=True
    )


def test_every_point_in_exactly_one_hex():
    n = 5000
    r = RNG.standard_normal(n)
    x1 = RNG.uniform(0, 1, n)
    x2 = RNG.uniform(0, 1, n)
    sims = sims_of(RNG.standard_normal((2, n)))
    grid = grid_check_2d(r, x1, x2, "mean", sims, hexes_across=9)
    assert sum(c.count for c in grid.cells) == n


# ------------------------------------------------------------- glyphs


def test_worm_exact_normal_scores_all_inside():
    m = 60
    z = special.ndtri((np.arange(1, m + 1) - 0.5) / m)
    x1 = np.full(m, 0.5)
    x2 = np.full(m, 0.5)
    grid = worm_glyphs(z, x1, x2, cells=1, min_count=10)
    cell = grid.cells[0]
    np.testing.assert_allclose(cell.payload["dev"], 0.0, atol=1e-12)
    assert not any(cell.payload["outside"])


def test_worm_shifted_all_outside():
    m = 60
    z = special.ndtri((np.arange(1, m + 1) - 0.5) / m) + 10.0
    grid = worm_glyphs(z, np.full(m, 0.5), np.full(m, 0.5), cells=1, min_count=10)
    assert all(grid.cells[0].payload["outside"])


def test_worm_central_halfwidth_value():
    # same evaluation as the band formula at the central plotting position
    m = 100
    r = special.ndtri((np.arange(1, m + 1) - 0.5) / m)
    grid = worm_glyphs(r, np.full(m, 0.5), np.full(m, 0.5), cells=1, min_count=10, alpha=0.95)
    hw = np.asarray(grid.cells[0].payload["halfwidth"])
    p = (np.arange(m) + 0.5) / m
    central = np.argmin(np.abs(p - 0.5))
    assert hw[central] == pytest.approx(normal_band([p[central]], m, 0.95)[0])
    assert hw[central] == pytest.approx(0.24566, abs=1e-3)


def test_worm_small_cells_empty():
    grid = worm_glyphs(np.zeros(5), np.zeros(5), np.zeros(5), cells=1, min_count=10)
    assert grid.cells[0].empty


def test_worm_payload_bounded():
    m = 5000
    r = RNG.standard_normal(m)
    grid = worm_glyphs(r, RNG.uniform(size=m), RNG.uniform(size=m), cells=1, max_points=150)
    assert len(grid.cells[0].payload["z"]) <= 150


def test_kde_glyph_single_member():
    grid = kde_glyphs(np.array([0.5]), np.array([0.2]), np.array([0.8]), cells=1, bandwidth=0.3)
    dens = np.asarray(grid.cells[0].payload["density"])
    assert dens.max() > 0
    assert grid.r_knots[np.argmax(dens)] == pytest.approx(0.5, abs=0.1)


def test_kde_glyph_bimodal_modes():
    # oracle: direct KDE mode count on a +-3 cluster mixture
    rng = np.random.default_rng(2)
    r = np.concatenate([rng.normal(-3, 0.4, 400), rng.normal(3, 0.4, 400)])
    x = rng.uniform(size=800)
    grid = kde_glyphs(r, x, x, cells=1, bandwidth=0.4)
    dens = np.asarray(grid.cells[0].payload["density"])
    interior = (dens[1:-1] > dens[:-2]) & (dens[1:-1] > dens[2:])
    peaks = np.where(interior & (dens[1:-1] > 0.05 * dens.max()))[0]
    assert len(peaks) == 2


def test_kde_glyphs_share_axis():
    rng = np.random.default_rng(3)
    r = rng.standard_normal(500)
    grid = kde_glyphs(r, rng.uniform(size=500), rng.uniform(size=500), cells=3)
    assert grid.r_knots is not None
    lens = {len(c.payload["density"]) for c in grid.cells if not c.empty}
    assert lens == {len(grid.r_knots)}


def test_empty_glyph_cell():
    # data concentrated in one corner leaves other cells empty
    r = RNG.standard_normal(50)
    x = np.full(50, 0.1)
    grid = kde_glyphs(r, x, x, cells=2)
    empties = [c for c in grid.cells if c.empty]
    assert empties


def test_bad_summary_rejected():
    with pytest.raises(DomainError):
        grid_check_1d(np.zeros(10), np.arange(10.0), 2, "median")
