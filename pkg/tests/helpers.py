"""Shared test utilities: quick dataset builders and the reference ridge
smoother used by the effect-uncertainty acceptance checks."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import BSpline

from gamdiag.dataset import from_arrays


def gaussian_dataset(n, seed, mu=0.0, sigma=1.0):
    """A well-specified gaussian dataset with constant fitted parameters."""
    rng = np.random.default_rng(seed)
    y = mu + sigma * rng.standard_normal(n)
    return from_arrays(
        {"y": y, "mu": np.full(n, mu), "sigma": np.full(n, sigma)},
        {"y": "response", "mu": "param", "sigma": "param"},
    )


def bspline_basis(x, k=5):
    """k cubic B-spline basis functions on [0, 1], clamped ends."""
    deg = 3
    t = np.concatenate([[0.0] * deg, np.linspace(0.0, 1.0, k - deg + 1), [1.0] * deg])
    B = np.empty((len(x), k))
    xc = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    for j in range(k):
        c = np.zeros(k)
        c[j] = 1.0
        B[:, j] = BSpline(t, c, deg, extrapolate=False)(xc)
    return np.nan_to_num(B)


def fit_ridge_surface(x, z, y, k=5, grid=40):
    """Tensor-product B-spline ridge smoother (the acceptance reference fit).

    The penalty is selected by maximizing the marginal likelihood of the
    Gaussian model y = X beta + e with beta ~ N(0, sigma^2 / lam), and the
    variance surface is the Bayesian posterior variance sigma^2 b' A^{-1} b,
    the standard uncertainty convention for penalized smooths.

    Returns (x1_grid, x2_grid, fhat, vhat) on a grid x grid lattice.
    """
    Bx, Bz = bspline_basis(x, k), bspline_basis(z, k)
    X = np.einsum("ij,ik->ijk", Bx, Bz).reshape(len(x), k * k)
    n, p = X.shape
    XtX = X.T @ X
    Xty = X.T @ y
    evals, V = np.linalg.eigh(XtX)
    w = V.T @ Xty
    yty = float(y @ y)

    best_ll, best_lam = -np.inf, 1.0
    for lam in np.logspace(-3, 7, 101):
        d = evals + lam
        rss = yty - 2.0 * np.sum(w * w / d) + np.sum(w * w * evals / d**2)
        quad = rss + lam * np.sum((w / d) ** 2)
        ll = -0.5 * (n * np.log(quad / n) + np.sum(np.log(d / lam)) + n)
        if ll > best_ll:
            best_ll, best_lam = ll, lam

    A = XtX + best_lam * np.eye(p)
    beta = np.linalg.solve(A, Xty)
    edf = float(np.trace(np.linalg.solve(A, XtX)))
    sigma2 = float(np.sum((y - X @ beta) ** 2)) / max(n - edf, 1.0)
    cov = sigma2 * np.linalg.inv(A)

    g = np.linspace(0.0, 1.0, grid)
    Bg = bspline_basis(g, k)
    Bgrid = np.einsum("ij,lk->iljk", Bg, Bg).reshape(grid * grid, k * k)
    fhat = (Bgrid @ beta).reshape(grid, grid)
    vhat = np.einsum("ij,jk,ik->i", Bgrid, cov, Bgrid).reshape(grid, grid)
    return g, g, fhat, np.maximum(vhat, 0.0)
