import numpy as np
import pytest
from scipy import integrate, stats

from gamdiag.distributions import get_family
from gamdiag.errors import DomainError, UnsupportedResidualError

GAUSS01 = {"mu": 0.0, "sigma": 1.0}
SHASH01 = {"mu": 0.0, "sigma": 1.0, "eps": 0.0, "delta": 1.0}


def test_gaussian_cdf_center():
    fam = get_family("gaussian")
    assert fam.cdf(0.0, GAUSS01) == pytest.approx(0.5)


def test_shash_center_is_half_for_any_sigma():
    fam = get_family("shash")
    for sigma in (0.1, 1.0, 7.5):
        theta = {"mu": 2.0, "sigma": sigma, "eps": 0.0, "delta": 1.0}
        assert fam.cdf(2.0, theta) == pytest.approx(0.5)


def test_shash_reduces_to_gaussian_on_grid():
    # oracle: with eps=0, delta=1 the transform is the identity, so the cdf
    # must match the gaussian cdf everywhere
    shash = get_family("shash")
    gauss = get_family("gaussian")
    y = np.linspace(-4, 4, 101)
    np.testing.assert_allclose(
        shash.cdf(y, SHASH01), gauss.cdf(y, GAUSS01), atol=1e-8
    )


def test_poisson_cdf_below_support():
    fam = get_family("poisson")
    assert fam.cdf(-1.0, {"mu": 3.0}) == 0.0


def test_gaussian_quantile_median():
    fam = get_family("gaussian")
    assert fam.quantile(0.5, {"mu": 2.0, "sigma": 1.0}) == pytest.approx(2.0)


def test_gamma_quantile_inverts_cdf():
    fam = get_family("gamma")
    theta = {"mu": 2.0, "k": 1.5}
    for y in (0.5, 1.0, 5.0):
        p = fam.cdf(y, theta)
        assert fam.quantile(p, theta) == pytest.approx(y, abs=1e-8)


def test_poisson_quantile_smallest_count():
    # oracle: P(Y = 0) = e^{-1} ~ 0.3679 >= 0.3, so the 0.3 quantile is 0
    fam = get_family("poisson")
    assert fam.quantile(0.3, {"mu": 1.0}) == 0.0


def test_quantile_domain_errors():
    fam = get_family("gaussian")
    for p in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(DomainError):
            fam.quantile(p, GAUSS01)


def test_mean_var_closed_forms():
    assert get_family("poisson").mean_var({"mu": 4.0}) == (4.0, 4.0)
    mu, var = get_family("gaussian").mean_var({"mu": 1.0, "sigma": 2.0})
    assert float(mu) == pytest.approx(1.0)
    assert float(var) == pytest.approx(4.0)
    mu, var = get_family("gamma").mean_var({"mu": 3.0, "k": 2.0})
    assert float(mu) == pytest.approx(3.0)
    assert float(var) == pytest.approx(4.5)


def test_shash_mean_var_gaussian_reduction():
    # oracle: quadrature of the density
    fam = get_family("shash")
    mean, var = fam.mean_var(SHASH01)
    assert mean == pytest.approx(0.0, abs=1e-6)
    assert var == pytest.approx(1.0, abs=1e-6)


def test_shash_mean_var_matches_quadrature_when_skewed():
    fam = get_family("shash")
    theta = {"mu": 0.5, "sigma": 1.3, "eps": 0.4, "delta": 0.8}
    pdf = lambda y: fam.pdf(y, theta)
    m1, _ = integrate.quad(lambda y: y * pdf(y), -60, 60, limit=200)
    m2, _ = integrate.quad(lambda y: y * y * pdf(y), -60, 60, limit=200)
    mean, var = fam.mean_var(theta)
    assert mean == pytest.approx(m1, abs=1e-6)
    assert var == pytest.approx(m2 - m1**2, abs=1e-5)


def test_deviance_components():
    pois = get_family("poisson")
    assert pois.deviance(3.0, {"mu": 3.0}) == pytest.approx(0.0)
    # d = 2{y log(y/mu) - (y-mu)} with y log y -> 0 at y=0
    assert pois.deviance(0.0, {"mu": 1.0}) == pytest.approx(2.0)
    gauss = get_family("gaussian")
    assert gauss.deviance(3.0, {"mu": 1.0, "sigma": 1.0}) == pytest.approx(4.0)


def test_deviance_zero_iff_mean():
    gamma = get_family("gamma")
    theta = {"mu": 2.0, "k": 1.0}
    assert gamma.deviance(2.0, theta) == pytest.approx(0.0)
    assert gamma.deviance(2.5, theta) > 0
    binom = get_family("binomial", trials=10)
    assert binom.deviance(4.0, {"p": 0.4}) == pytest.approx(0.0)
    assert binom.deviance(7.0, {"p": 0.4}) > 0


def test_shash_deviance_unsupported():
    with pytest.raises(UnsupportedResidualError):
        get_family("shash").deviance(0.0, SHASH01)


def test_invalid_theta_domain_errors():
    with pytest.raises(DomainError):
        get_family("gaussian").cdf(0.0, {"mu": 0.0, "sigma": -1.0})
    with pytest.raises(DomainError):
        get_family("poisson").cdf(0.0, {"mu": 0.0})
    with pytest.raises(DomainError):
        get_family("shash").cdf(0.0, {"mu": 0.0, "sigma": 1.0, "eps": 0.0, "delta": 0.0})


def test_sample_degenerate_gaussian():
    fam = get_family("gaussian")
    rng = np.random.default_rng(0)
    val = fam.sample({"mu": 5.0, "sigma": 1e-12}, rng)
    assert val == pytest.approx(5.0, abs=1e-9)


def test_sample_means_match_lln():
    rng = np.random.default_rng(42)
    shash = get_family("shash")
    draws = shash.sample({k: np.full(10**5, v) for k, v in SHASH01.items()}, rng)
    assert abs(draws.mean()) < 0.02
    pois = get_family("poisson")
    drawsp = pois.sample({"mu": np.full(10**5, 2.0)}, rng)
    assert abs(drawsp.mean() - 2.0) < 0.05


@pytest.mark.parametrize(
    "name,theta",
    [
        ("gaussian", {"mu": 0.7, "sigma": 1.4}),
        ("poisson", {"mu": 3.2}),
        ("binomial", {"p": 0.37}),
        ("gamma", {"mu": 2.5, "k": 1.8}),
        ("shash", {"mu": -0.3, "sigma": 1.2, "eps": 0.5, "delta": 0.8}),
    ],
)
def test_moment_match_and_cdf_monotone(name, theta):
    kwargs = {"trials": 8} if name == "binomial" else {}
    fam = get_family(name, **kwargs)
    n = 10**5
    rng = np.random.default_rng(7)
    draws = fam.sample({k: np.full(n, v) for k, v in theta.items()}, rng)
    mean, var = fam.mean_var(theta)
    mean, var = float(np.asarray(mean).ravel()[0]), float(np.asarray(var).ravel()[0])
    se_mean = np.sqrt(var / n)
    m4 = np.mean((draws - draws.mean()) ** 4)
    se_var = np.sqrt(max(m4 - var**2, 0.0) / n)
    assert abs(draws.mean() - mean) < 4 * se_mean
    assert abs(draws.var(ddof=1) - var) < 4 * se_var

    grid = np.linspace(draws.min(), draws.max(), 101)
    cdf = fam.cdf(grid, theta)
    assert np.all(np.diff(cdf) >= -1e-12)
    assert np.all((cdf >= 0) & (cdf <= 1))


@pytest.mark.parametrize(
    "name,theta",
    [
        ("gaussian", {"mu": 0.7, "sigma": 1.4}),
        ("gamma", {"mu": 2.5, "k": 1.8}),
        ("shash", {"mu": -0.3, "sigma": 1.2, "eps": 0.5, "delta": 0.8}),
    ],
)
def test_continuous_quantile_identity(name, theta):
    fam = get_family(name)
    p = np.linspace(0.01, 0.99, 33)
    y = fam.quantile(p, theta)
    np.testing.assert_allclose(fam.cdf(y, theta), p, atol=1e-8)


@pytest.mark.parametrize("name,theta", [("poisson", {"mu": 2.5}), ("binomial", {"p": 0.3})])
def test_discrete_quantile_right_inverse(name, theta):
    kwargs = {"trials": 12} if name == "binomial" else {}
    fam = get_family(name, **kwargs)
    for p in (0.05, 0.3, 0.62, 0.9):
        y = float(fam.quantile(p, theta))
        assert fam.cdf(y, theta) >= p
        if y >= 1:
            assert fam.cdf(y - 1, theta) < p


def test_shash_sampler_matches_cdf():
    # Kolmogorov-Smirnov against the family's own cdf
    fam = get_family("shash")
    theta = {"mu": 1.0, "sigma": 2.0, "eps": -0.4, "delta": 1.3}
    rng = np.random.default_rng(11)
    draws = fam.sample({k: np.full(20000, v) for k, v in theta.items()}, rng)
    stat = stats.kstest(draws, lambda y: fam.cdf(y, theta)).statistic
    assert stat < 1.63 / np.sqrt(len(draws))  # 1% critical value


def test_unknown_family():
    with pytest.raises(DomainError):
        get_family("cauchy")
