"""Residual transforms and model-based replicate simulation.

Four transforms are supported: uniform (probability integral transform),
quantile (normal scores), pearson and deviance.  Replicate residual vectors
are simulated from the fitted per-row parameters with one derived random
stream per replicate, so results are identical for any worker count.
"""

from __future__ import annotations

import multiprocessing
import os
import tempfile
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .dataset import DiagnosticDataset
from .errors import ConfigError, DomainError

RESIDUAL_TYPES = ("uniform", "quantile", "pearson", "deviance")

# F values are clipped away from {0, 1} before the normal-score transform so
# extreme tail events stay finite; the clip count is surfaced to the caller.
CLIP_EPS = 1e-12


@dataclass
class ResidualVector:
    values: np.ndarray
    rtype: str
    reference: str  # "uniform" | "normal" | "simulation"
    clip_count: int = 0

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass
class SimulatedResiduals:
    """l replicate residual vectors drawn under the fitted parameters.

    ``aligned`` is False when rows were pre-sorted inside the simulation
    workers; such replicates serve order-statistic consumers (QQ envelopes)
    but can no longer be matched to dataset rows for covariate binning.
    """

    values: np.ndarray  # shape (l, n)
    rtype: str
    seed: int
    aligned: bool = True
    _sorted: np.ndarray | None = field(default=None, repr=False)

    @property
    def l(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def sorted_rows(self) -> np.ndarray:
        """Each replicate row sorted ascending; cached after first use."""
        if self._sorted is None:
            self._sorted = np.sort(self.values, axis=1)
        return self._sorted


def _reference_for(rtype: str) -> str:
    return {"uniform": "uniform", "quantile": "normal"}.get(rtype, "simulation")


def _transform_values(y, family, theta, rtype):
    """Apply one residual transform; returns (values, clip_count)."""
    if rtype == "uniform":
        if family.is_discrete:
            warnings.warn(
                f"uniform residuals of the discrete family {family.name!r} are "
                "hard to interpret when the response takes few distinct values",
                stacklevel=3,
            )
        return family.cdf(y, theta), 0
    if rtype == "quantile":
        if family.is_discrete:
            warnings.warn(
                f"quantile residuals of the discrete family {family.name!r} are "
                "hard to interpret when the response takes few distinct values",
                stacklevel=3,
            )
        u = family.cdf(y, theta)
        clipped = np.clip(u, CLIP_EPS, 1.0 - CLIP_EPS)
        n_clip = int(np.count_nonzero(u != clipped))
        return special.ndtri(clipped), n_clip
    if rtype == "pearson":
        mu, var = family.mean_var(theta)
        return (y - mu) / np.sqrt(var), 0
    if rtype == "deviance":
        d = family.deviance(y, theta)
        d = np.maximum(d, 0.0)
        mu, _ = family.mean_var(theta)
        return np.sign(y - mu) * np.sqrt(d), 0
    raise DomainError(f"unknown residual type {rtype!r}; expected one of {RESIDUAL_TYPES}")


def transform(ds: DiagnosticDataset, family, rtype: str) -> ResidualVector:
    """Residuals of the dataset's response under the fitted parameter columns."""
    theta = ds.params_for(family)
    values, clip_count = _transform_values(ds.response(), family, theta, rtype)
    return ResidualVector(
        values=np.asarray(values, dtype=np.float64),
        rtype=rtype,
        reference=_reference_for(rtype),
        clip_count=clip_count,
    )


def _replicate_rng(seed: int, v: int) -> np.random.Generator:
    # one independent child stream per replicate index, so replicate content
    # does not depend on how replicates are distributed over workers
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(v))))


def _simulate_block(family, theta, rtype, seed, indices, presort):
    rows = np.empty((len(indices), len(next(iter(theta.values())))), dtype=np.float64)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i, v in enumerate(indices):
            y_star = family.sample(theta, _replicate_rng(seed, v))
            vals, _ = _transform_values(y_star, family, theta, rtype)
            rows[i] = np.sort(vals) if presort else vals
    return rows


# Work description inherited by forked pool workers; avoids pickling the
# parameter columns into every task.  Output rows go into a memory-mapped
# scratch file, so finished replicates never travel through a pipe.
_FORK_JOB = None


def _fork_worker(bounds):
    family, theta, rtype, seed, presort, path, l, n = _FORK_JOB
    out = np.memmap(path, dtype=np.float64, mode="r+", shape=(l, n))
    lo, hi = bounds
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for v in range(lo, hi):
            y_star = family.sample(theta, _replicate_rng(seed, v))
            vals, _ = _transform_values(y_star, family, theta, rtype)
            out[v] = np.sort(vals) if presort else vals
    out.flush()
    return None


def _scratch_dir():
    return "/dev/shm" if os.path.isdir("/dev/shm") else tempfile.gettempdir()


def _simulate_parallel(family, theta, rtype, seed, l, n, presort, workers):
    global _FORK_JOB
    fd, path = tempfile.mkstemp(prefix="gamdiag-sims-", dir=_scratch_dir())
    os.close(fd)
    try:
        out = np.memmap(path, dtype=np.float64, mode="w+", shape=(l, n))
        del out  # workers reopen by path; parent reads back when they finish
        edges = np.linspace(0, l, min(workers * 2, l) + 1).astype(int)
        bounds = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
        ctx = multiprocessing.get_context("fork")
        _FORK_JOB = (family, theta, rtype, seed, presort, path, l, n)
        try:
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as ex:
                list(ex.map(_fork_worker, bounds))
        finally:
            _FORK_JOB = None
        return np.array(np.memmap(path, dtype=np.float64, mode="r", shape=(l, n)))
    finally:
        os.unlink(path)


def resolve_workers(workers=None) -> int:
    if workers is None:
        workers = os.environ.get("GAMDIAG_THREADS", "1")
    workers = int(workers)
    return max(1, workers)


def simulate_residuals(
    ds: DiagnosticDataset,
    family,
    rtype: str,
    l: int,
    seed: int,
    workers: int | None = None,
    presort: bool = False,
) -> SimulatedResiduals:
    """Simulate ``l`` replicate response vectors and transform each to residuals.

    Parameters are fixed at their per-row fitted values.  With ``presort`` the
    replicate rows are sorted inside the workers, which parallelizes envelope
    construction; row content is unchanged either way.
    """
    if l < 1:
        raise ConfigError(f"replicate count l must be >= 1, got {l}")
    theta = ds.params_for(family)
    # fail fast on domain errors before any worker is spawned
    family.mean_var({k: v[:1] for k, v in theta.items()})
    workers = resolve_workers(workers)

    n = len(next(iter(theta.values())))
    if workers == 1 or l == 1 or "fork" not in multiprocessing.get_all_start_methods():
        rows = _simulate_block(family, theta, rtype, seed, list(range(l)), presort)
    else:
        rows = _simulate_parallel(family, theta, rtype, seed, l, n, presort, workers)
    sims = SimulatedResiduals(values=rows, rtype=rtype, seed=int(seed), aligned=not presort)
    if presort:
        sims._sorted = rows
    return sims
