import numpy as np
import pytest
from scipy import stats

from gamdiag.dataset import from_arrays
from gamdiag.distributions import get_family
from gamdiag.errors import ConfigError, UnsupportedResidualError
from gamdiag.residuals import simulate_residuals, transform

from helpers import gaussian_dataset


def dataset_with(y, mu=0.0, sigma=1.0):
    n = len(np.atleast_1d(y))
    return from_arrays(
        {"y": np.atleast_1d(y), "mu": np.full(n, mu), "sigma": np.full(n, sigma)},
        {"y": "response", "mu": "param", "sigma": "param"},
    )


GAUSS = get_family("gaussian")


def test_center_of_symmetric_model():
    ds = dataset_with([0.0])
    assert transform(ds, GAUSS, "uniform").values[0] == pytest.approx(0.5)
    assert transform(ds, GAUSS, "quantile").values[0] == pytest.approx(0.0, abs=1e-12)
    assert transform(ds, GAUSS, "pearson").values[0] == pytest.approx(0.0)
    assert transform(ds, GAUSS, "deviance").values[0] == pytest.approx(0.0)


def test_pearson_one_sigma():
    ds = dataset_with([2.0], mu=1.0, sigma=1.0)
    assert transform(ds, GAUSS, "pearson").values[0] == pytest.approx(1.0)


def test_poisson_deviance_value():
    # oracle: deviance_component gives d = 2 at y=0, mu=1, so r = -sqrt(2)
    ds = from_arrays({"y": [0.0], "mu": [1.0]}, {"y": "response", "mu": "param"})
    res = transform(ds, get_family("poisson"), "deviance")
    assert res.values[0] == pytest.approx(-np.sqrt(2.0))


def test_deviance_sign_matches_centering():
    rng = np.random.default_rng(3)
    y = rng.poisson(3.0, 200).astype(float)
    ds = from_arrays({"y": y, "mu": np.full(200, 3.0)}, {"y": "response", "mu": "param"})
    res = transform(ds, get_family("poisson"), "deviance")
    np.testing.assert_array_equal(np.sign(res.values), np.sign(y - 3.0))


def test_uniform_values_in_unit_interval():
    ds = gaussian_dataset(500, 1)
    res = transform(ds, GAUSS, "uniform")
    assert res.values.min() >= 0.0 and res.values.max() <= 1.0
    assert res.reference == "uniform"


def test_quantile_clipping_counts_extremes():
    ds = dataset_with([1e9], mu=0.0, sigma=1.0)
    res = transform(ds, GAUSS, "quantile")
    assert res.clip_count == 1
    assert np.isfinite(res.values[0])


def test_deviance_on_shash_unsupported():
    ds = from_arrays(
        {"y": [0.0], "mu": [0.0], "sigma": [1.0], "eps": [0.0], "delta": [1.0]},
        {"y": "response", "mu": "param", "sigma": "param", "eps": "param", "delta": "param"},
    )
    with pytest.raises(UnsupportedResidualError):
        transform(ds, get_family("shash"), "deviance")


def test_discrete_uniform_warns():
    ds = from_arrays({"y": [1.0], "mu": [2.0]}, {"y": "response", "mu": "param"})
    with pytest.warns(UserWarning, match="discrete"):
        transform(ds, get_family("poisson"), "uniform")


def test_permutation_equivariance():
    ds = gaussian_dataset(100, 5)
    res = transform(ds, GAUSS, "quantile").values
    perm = np.random.default_rng(0).permutation(100)
    ds_perm = from_arrays(
        {name: ds.column(name)[perm] for name in ds.columns}, dict(ds.roles)
    )
    res_perm = transform(ds_perm, GAUSS, "quantile").values
    np.testing.assert_allclose(res_perm, res[perm])


def test_monotone_in_response():
    y = np.linspace(-3, 3, 50)
    ds = dataset_with(y)
    for rtype in ("uniform", "quantile"):
        vals = transform(ds, GAUSS, rtype).values
        assert np.all(np.diff(vals) > 0)


def test_uniform_residuals_pass_ks_under_truth():
    # well-specified model: uniform residuals are exactly U(0,1)
    passes = 0
    for seed in range(100):
        ds = gaussian_dataset(10**4, seed)
        res = transform(ds, GAUSS, "uniform")
        if stats.kstest(res.values, "uniform").pvalue > 0.01:
            passes += 1
    assert passes >= 98


def test_simulated_quantile_residuals_are_standard_normal():
    # spec oracle: KS statistic below the 1% critical value in >= 98/100 seeds
    crit = 1.63 / np.sqrt(10**4)  # asymptotic 1% critical value
    ds = gaussian_dataset(10**4, 0)
    passes = 0
    for seed in range(100):
        sims = simulate_residuals(ds, GAUSS, "quantile", 1, seed)
        stat = stats.kstest(sims.values[0], "norm").statistic
        passes += stat < crit
    assert passes >= 98


def test_simulation_deterministic_for_seed():
    ds = gaussian_dataset(500, 2)
    a = simulate_residuals(ds, GAUSS, "quantile", 3, 99)
    b = simulate_residuals(ds, GAUSS, "quantile", 3, 99)
    np.testing.assert_array_equal(a.values, b.values)


def test_simulation_identical_across_worker_counts():
    ds = gaussian_dataset(2000, 2)
    serial = simulate_residuals(ds, GAUSS, "pearson", 6, 5, workers=1)
    parallel = simulate_residuals(ds, GAUSS, "pearson", 6, 5, workers=3)
    np.testing.assert_array_equal(serial.values, parallel.values)


def test_presort_matches_sorted_serial():
    ds = gaussian_dataset(1000, 8)
    plain = simulate_residuals(ds, GAUSS, "quantile", 4, 3)
    pre = simulate_residuals(ds, GAUSS, "quantile", 4, 3, presort=True)
    assert not pre.aligned
    np.testing.assert_array_equal(pre.sorted_rows(), plain.sorted_rows())


def test_zero_replicates_rejected():
    ds = gaussian_dataset(10, 1)
    with pytest.raises(ConfigError):
        simulate_residuals(ds, GAUSS, "quantile", 0, 1)
