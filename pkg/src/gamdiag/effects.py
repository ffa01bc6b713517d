"""Uncertainty visuals for a fitted 2D smooth: opacity and noise perturbation.

The surface arrives as a gridded pair (fhat, vhat) of fitted values and their
pointwise variances; no basis evaluation happens here.  Two derived fields
are produced: an opacity map driven by the two-sided significance of the
fitted value against zero, and a Gaussian white-noise perturbation with the
cell's own variance, whose visual stability conveys estimation uncertainty.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ParseError

# opacity transform defaults: fully opaque up to p = delta, then a cubic
# fade-out with a visibility floor
DEFAULT_DELTA = 0.05
DEFAULT_GAMMA = 3.0
DEFAULT_BETA = 0.2


@dataclass
class EffectSurface:
    x1: np.ndarray
    x2: np.ndarray
    fhat: np.ndarray  # (len(x1), len(x2))
    vhat: np.ndarray

    def __post_init__(self):
        shape = (len(self.x1), len(self.x2))
        if self.fhat.shape != shape or self.vhat.shape != shape:
            raise DomainError(f"surface matrices must have shape {shape}")
        if np.any(self.vhat < 0):
            raise DomainError("variance surface must be non-negative")

    def to_payload(self, alpha=None, ghat=None) -> dict:
        payload = {
            "v": 1,
            "x1": self.x1.tolist(),
            "x2": self.x2.tolist(),
            "fhat": self.fhat.tolist(),
            "vhat": self.vhat.tolist(),
        }
        if alpha is not None:
            payload["alpha"] = alpha.tolist()
        if ghat is not None:
            payload["ghat"] = ghat.tolist()
        return payload


def t_transform(p, delta: float = DEFAULT_DELTA, gamma: float = DEFAULT_GAMMA, beta: float = DEFAULT_BETA):
    """Map p-values to opacities: t(p) = max((1 - z)^gamma, beta), z = max(0, p - delta).

    Non-increasing in p: anything at least as significant as ``delta`` is
    fully opaque, and opacity never falls below the floor ``beta``.
    """
    if not 0.0 < beta <= 1.0:
        raise DomainError("beta must be in (0, 1]")
    if gamma <= 0:
        raise DomainError("gamma must be > 0")
    if not 0.0 <= delta < 1.0:
        raise DomainError("delta must be in [0, 1)")
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0) or np.any(p > 1):
        raise DomainError("p-values must be in [0, 1]")
    z = np.maximum(0.0, p - delta)
    return np.maximum((1.0 - z) ** gamma, beta)


def significance_pvalues(surf: EffectSurface) -> np.ndarray:
    """Two-sided p-value of fhat against zero per cell: 2 (1 - Phi(|fhat|/sqrt(vhat))).

    Cells with zero variance resolve by sign of fhat: exactly-zero fits are
    maximally insignificant (p = 1), nonzero fits with no variance are
    maximally significant (p = 0).
    """
    fhat, vhat = surf.fhat, surf.vhat
    p = np.ones_like(fhat)
    pos = vhat > 0
    p[pos] = 2.0 * (1.0 - special.ndtr(np.abs(fhat[pos]) / np.sqrt(vhat[pos])))
    p[(~pos) & (fhat != 0)] = 0.0
    return p


def opacity_field(
    surf: EffectSurface,
    delta: float = DEFAULT_DELTA,
    gamma: float = DEFAULT_GAMMA,
    beta: float = DEFAULT_BETA,
) -> np.ndarray:
    """Opacity per cell from the significance of the fitted smooth."""
    return t_transform(significance_pvalues(surf), delta, gamma, beta)


def perturb_field(surf: EffectSurface, rng) -> np.ndarray:
    """fhat plus independent Gaussian noise with the cell's own variance."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    return surf.fhat + np.sqrt(surf.vhat) * rng.standard_normal(surf.fhat.shape)


def load_surface_csv(path) -> EffectSurface:
    """Read a long-format surface CSV with columns x1, x2, fhat, vhat.

    Rows must cover a complete rectangular grid (any order).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        needed = ["x1", "x2", "fhat", "vhat"]
        missing = [c for c in needed if c not in header]
        if missing:
            raise ParseError(f"{path}: surface file missing columns {missing}")
        pos = [header.index(c) for c in needed]
        rows = []
        for i, row in enumerate(reader):
            if not row:
                continue
            try:
                rows.append([float(row[p]) for p in pos])
            except (ValueError, IndexError):
                raise ParseError(f"{path}: bad surface row at data row {i + 1}", row=i + 1) from None
    if not rows:
        raise ParseError(f"{path}: surface file has no rows")
    arr = np.asarray(rows)
    x1 = np.unique(arr[:, 0])
    x2 = np.unique(arr[:, 1])
    if len(x1) * len(x2) != len(arr):
        raise ParseError(f"{path}: rows do not form a complete {len(x1)}x{len(x2)} grid")
    i1 = np.searchsorted(x1, arr[:, 0])
    i2 = np.searchsorted(x2, arr[:, 1])
    fhat = np.full((len(x1), len(x2)), np.nan)
    vhat = np.full((len(x1), len(x2)), np.nan)
    fhat[i1, i2] = arr[:, 2]
    vhat[i1, i2] = arr[:, 3]
    if np.any(~np.isfinite(fhat)) or np.any(~np.isfinite(vhat)):
        raise ParseError(f"{path}: grid has missing or duplicate cells")
    return EffectSurface(x1=x1, x2=x2, fhat=fhat, vhat=vhat)


def write_surface_csv(surf: EffectSurface, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "x2", "fhat", "vhat"])
        for i, a in enumerate(surf.x1):
            for j, b in enumerate(surf.x2):
                writer.writerow([repr(float(a)), repr(float(b)), repr(float(surf.fhat[i, j])), repr(float(surf.vhat[i, j]))])
