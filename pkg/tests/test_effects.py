import numpy as np
import pytest
from scipy import stats

from gamdiag.effects import (
    EffectSurface,
    load_surface_csv,
    opacity_field,
    perturb_field,
    significance_pvalues,
    t_transform,
    write_surface_csv,
)
from gamdiag.errors import DomainError, ParseError


def surface(fhat, vhat):
    fhat = np.asarray(fhat, dtype=float)
    return EffectSurface(
        x1=np.linspace(0, 1, fhat.shape[0]),
        x2=np.linspace(0, 1, fhat.shape[1]),
        fhat=fhat,
        vhat=np.asarray(vhat, dtype=float),
    )


# ------------------------------------------------------------ t transform


def test_fully_significant_is_opaque():
    assert t_transform(0.03, delta=0.05) == pytest.approx(1.0)
    assert t_transform(0.05, delta=0.05) == pytest.approx(1.0)


def test_floor_at_beta():
    # z = 0.95 -> (1-z)^3 = 1.25e-4 < beta
    assert t_transform(1.0, delta=0.05, gamma=3.0, beta=0.2) == pytest.approx(0.2)


def test_non_increasing():
    vals = t_transform(np.array([0.1, 0.5, 0.9]))
    assert vals[0] >= vals[1] >= vals[2]


def test_t_transform_domain_checks():
    with pytest.raises(DomainError):
        t_transform(0.5, beta=0.0)
    with pytest.raises(DomainError):
        t_transform(0.5, gamma=0.0)
    with pytest.raises(DomainError):
        t_transform(0.5, delta=1.0)
    with pytest.raises(DomainError):
        t_transform(1.5)


# ------------------------------------------------------------ opacity


def test_null_surface_fades_to_floor():
    surf = surface(np.zeros((4, 4)), np.ones((4, 4)))
    np.testing.assert_allclose(opacity_field(surf), 0.2)


def test_overwhelming_significance_opaque():
    surf = surface(np.full((3, 3), 10.0), np.ones((3, 3)))
    np.testing.assert_allclose(opacity_field(surf), 1.0)


def test_boundary_ratio_is_exactly_opaque():
    # |fhat|/sqrt(vhat) = Phi^{-1}(0.975) puts the p-value exactly at delta
    z = stats.norm.ppf(0.975)
    surf = surface([[z]], [[1.0]])
    assert significance_pvalues(surf)[0, 0] == pytest.approx(0.05, abs=1e-9)
    assert opacity_field(surf)[0, 0] == pytest.approx(1.0)


def test_zero_variance_cells():
    surf = surface([[0.0, 1.0]], [[0.0, 0.0]])
    p = significance_pvalues(surf)
    assert p[0, 0] == 1.0 and p[0, 1] == 0.0
    alpha = opacity_field(surf)
    assert alpha[0, 0] == pytest.approx(0.2)
    assert alpha[0, 1] == pytest.approx(1.0)


def test_negative_variance_rejected():
    with pytest.raises(DomainError):
        surface([[1.0]], [[-1.0]])


def test_opacity_scale_invariance():
    rng = np.random.default_rng(0)
    f = rng.standard_normal((6, 6))
    v = rng.uniform(0.5, 2.0, (6, 6))
    a1 = opacity_field(surface(f, v))
    a2 = opacity_field(surface(3.0 * f, 9.0 * v))
    np.testing.assert_allclose(a1, a2)


def test_opacity_range_and_attainment():
    rng = np.random.default_rng(1)
    f = rng.standard_normal((10, 10)) * 3
    v = rng.uniform(0.2, 1.0, (10, 10))
    alpha = opacity_field(surface(f, v))
    assert np.all((alpha >= 0.2) & (alpha <= 1.0))
    p = significance_pvalues(surface(f, v))
    np.testing.assert_allclose(alpha[p <= 0.05], 1.0)


# ------------------------------------------------------------ perturbation


def test_zero_variance_perturb_identity():
    surf = surface(np.arange(6.0).reshape(2, 3), np.zeros((2, 3)))
    np.testing.assert_array_equal(perturb_field(surf, 0), surf.fhat)


def test_perturb_seed_deterministic():
    surf = surface(np.zeros((5, 5)), np.ones((5, 5)))
    np.testing.assert_array_equal(perturb_field(surf, 42), perturb_field(surf, 42))
    assert not np.array_equal(perturb_field(surf, 42), perturb_field(surf, 43))


def test_perturbation_noise_is_standard_normal():
    # standardized noise passes KS normality at 1% in at least 98/100 seeds
    rng = np.random.default_rng(2)
    f = rng.standard_normal((100, 100))
    v = rng.uniform(0.5, 2.0, (100, 100))
    surf = surface(f, v)
    passes = 0
    for seed in range(100):
        g = perturb_field(surf, seed)
        z = ((g - f) / np.sqrt(v)).ravel()
        passes += stats.kstest(z, "norm").pvalue > 0.01
    assert passes >= 98


def test_perturbation_mean_converges_to_fhat():
    rng = np.random.default_rng(3)
    f = rng.standard_normal((20, 20))
    v = rng.uniform(0.1, 0.8, (20, 20))
    surf = surface(f, v)
    K = 1000
    acc = np.zeros_like(f)
    for seed in range(K):
        acc += perturb_field(surf, seed)
    err = np.max(np.abs(acc / K - f))
    assert err <= 4 * np.sqrt(v.max() / K)


# ------------------------------------------------------------ surface IO


def test_surface_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(4)
    surf = surface(rng.standard_normal((7, 5)), rng.uniform(0.1, 1.0, (7, 5)))
    path = tmp_path / "s.csv"
    write_surface_csv(surf, path)
    back = load_surface_csv(path)
    np.testing.assert_array_equal(back.fhat, surf.fhat)
    np.testing.assert_array_equal(back.vhat, surf.vhat)


def test_incomplete_grid_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x1,x2,fhat,vhat\n0,0,1,1\n0,1,1,1\n1,0,1,1\n")
    with pytest.raises(ParseError):
        load_surface_csv(path)


def test_shape_mismatch_rejected():
    with pytest.raises(DomainError):
        EffectSurface(
            x1=np.arange(3.0), x2=np.arange(2.0), fhat=np.zeros((2, 2)), vhat=np.zeros((2, 2))
        )
