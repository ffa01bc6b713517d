"""Deterministic synthetic-data generators for misspecification studies.

Each scenario draws covariates and responses from a declared truth and stores
the *misspecified model's* per-row parameters in the dataset, so diagnostics
run directly with no fitting step.  Truth and model differ in exactly one
parameter channel per misspecification scenario; the well-specified scenario
uses identical truth and model.

All functional forms and coefficients below are declared constants of this
package, chosen so each scenario's intended diagnostic signature is clearly
visible at n around 10^4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DiagnosticDataset, from_arrays
from .distributions import get_family
from .errors import DomainError

SCENARIO_IDS = (
    "well_specified",
    "mean_miss",
    "var_miss",
    "skew_miss",
    "kurt_miss",
    "surface_demo",
)

X_LO, X_HI = -3.5, 3.5

# mean channel: quadratic truth against its best constant fit over U(X_LO, X_HI)
MEAN_CURV = 0.4
MEAN_BASE = -1.0
MEAN_MODEL_CONST = MEAN_CURV * X_HI**2 / 3.0 + MEAN_BASE

# scale channel: log sd grows linearly in |x|; model holds the x = 0 value, so
# residuals keep unit spread at the center and over-disperse toward both edges
VAR_RATE = 0.35

# skewness channel: linear through zero
SKEW_SLOPE = 0.5

# tail channel: weight dips below 1 (heavier than Gaussian) as |x| grows
KURT_SCALE = 0.6
KURT_KNEE = 2.0
KURT_FLOOR = 0.5

# 2D smooth demo: low signal-to-noise so n = 200 fits shrink to near-flat
# while n = 10^5 resolves the surface clearly
SURFACE_AMP = 0.5
SURFACE_NOISE_SD = 2.0


@dataclass
class Scenario:
    id: str
    n: int
    seed: int
    truth: dict[str, np.ndarray]
    model: dict[str, np.ndarray]
    description: str


def truth_tail_weight(x) -> np.ndarray:
    """Tail-weight function of the kurt_miss truth: 1 at the center, dipping
    toward KURT_FLOOR for large |x|."""
    raw = 1.0 / (1.0 + KURT_SCALE * np.exp(np.abs(x) - KURT_KNEE))
    return np.clip(raw, KURT_FLOOR, 1.0)


def surface_truth(x, z) -> np.ndarray:
    return SURFACE_AMP * np.sin(2.0 * np.pi * np.asarray(x)) * np.cos(2.0 * np.pi * np.asarray(z))


def _shash_channels(x, scenario_id):
    n = len(x)
    ones = np.ones(n)
    zeros = np.zeros(n)
    truth = {"mu": zeros.copy(), "sigma": ones.copy(), "eps": zeros.copy(), "delta": ones.copy()}
    model = {k: v.copy() for k, v in truth.items()}
    if scenario_id == "well_specified":
        pass
    elif scenario_id == "mean_miss":
        truth["mu"] = MEAN_CURV * x**2 + MEAN_BASE
        model["mu"] = np.full(n, MEAN_MODEL_CONST)
    elif scenario_id == "var_miss":
        truth["sigma"] = np.exp(VAR_RATE * np.abs(x))
        model["sigma"] = ones.copy()
    elif scenario_id == "skew_miss":
        truth["eps"] = SKEW_SLOPE * x
        model["eps"] = zeros.copy()
    elif scenario_id == "kurt_miss":
        truth["delta"] = truth_tail_weight(x)
        model["delta"] = ones.copy()
    else:
        raise DomainError(f"unknown scenario id {scenario_id!r}")
    return truth, model


def generate(scenario_id: str, n: int, seed: int) -> tuple[DiagnosticDataset, Scenario]:
    """Generate one scenario dataset plus its truth/model metadata.

    The dataset's parameter columns always hold the *model* (possibly
    misspecified) values; the returned Scenario carries both sides.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if scenario_id not in SCENARIO_IDS:
        raise DomainError(f"unknown scenario id {scenario_id!r}; expected one of {SCENARIO_IDS}")
    rng = np.random.default_rng(np.random.SeedSequence((0x6A3D, int(seed))))

    if scenario_id == "surface_demo":
        x = rng.uniform(0.0, 1.0, n)
        z = rng.uniform(0.0, 1.0, n)
        f = surface_truth(x, z)
        y = f + SURFACE_NOISE_SD * rng.standard_normal(n)
        ds = from_arrays(
            {"y": y, "x": x, "z": z},
            {"y": "response", "x": "covariate", "z": "covariate"},
        )
        scenario = Scenario(
            id=scenario_id,
            n=n,
            seed=seed,
            truth={"f": f, "sigma": np.full(n, SURFACE_NOISE_SD)},
            model={},
            description="y = f(x, z) + noise on the unit square; smooth fitting happens downstream",
        )
        return ds, scenario

    x = rng.uniform(X_LO, X_HI, n)
    truth, model = _shash_channels(x, scenario_id)
    shash = get_family("shash")
    y = shash.sample(truth, rng)
    ds = from_arrays(
        {"y": y, "x": x, **model},
        {
            "y": "response",
            "x": "covariate",
            "mu": "param",
            "sigma": "param",
            "eps": "param",
            "delta": "param",
        },
    )
    channel = {
        "well_specified": "none",
        "mean_miss": "mu",
        "var_miss": "sigma",
        "skew_miss": "eps",
        "kurt_miss": "delta",
    }[scenario_id]
    scenario = Scenario(
        id=scenario_id,
        n=n,
        seed=seed,
        truth=truth,
        model=model,
        description=f"sinh-arcsinh responses; misspecified channel: {channel}",
    )
    return ds, scenario
