"""Seeded trajectory simulation of the (resetting) walk.

Every trial draws from its own Philox stream keyed by
``(master_seed, trial_index)``, and uniforms are handed to the kernels in a
fixed block schedule. Results are therefore identical for serial and
threaded execution and for the compiled and pure-Python kernels.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from . import _kernels
from .hypergraph import Hypergraph, build_generalized_adjacency, build_transition
from .spectral import ResetWalkSpec

__all__ = [
    "DEFAULT_SEED",
    "STEP_CAP",
    "TrialEnsemble",
    "SweepPoint",
    "trial_rng",
    "step_sampler",
    "walk_graph",
    "simulate_hitting_time",
    "simulate_occupation",
    "cover_time",
    "gamma_sweep_cover",
    "cover_gamma_grid",
    "highest_hyperdegree_node",
]

DEFAULT_SEED = 20240917
STEP_CAP = 10**8
_FIRST_BLOCK = 1024
_MAX_BLOCK = 1 << 20


@dataclass(frozen=True)
class TrialEnsemble:
    """Per-trial results plus the metadata needed to reproduce them."""

    master_seed: int
    values: np.ndarray
    capped: np.ndarray
    backend: str = "python"

    @property
    def trial_count(self) -> int:
        return int(self.values.shape[0])

    @property
    def capped_count(self) -> int:
        return int(np.count_nonzero(self.capped))

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def stderr(self) -> float:
        if self.trial_count < 2:
            return math.nan
        return float(np.std(self.values, ddof=1) / math.sqrt(self.trial_count))

    def summary(self) -> dict:
        return {
            "trials": self.trial_count,
            "seed": self.master_seed,
            "mean": self.mean,
            "stderr": self.stderr,
            "capped": self.capped_count,
        }


@dataclass(frozen=True)
class SweepPoint:
    gamma: float
    mean_cover: float
    stderr: float
    trials: int
    seed: int


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial_index),))
    return np.random.Generator(np.random.Philox(ss))


def step_sampler(row, rng: np.random.Generator) -> int:
    """Draw the next node from one stochastic row by inverse-CDF."""
    cdf = np.cumsum(np.asarray(row, dtype=float))
    pos = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(pos, cdf.shape[0] - 1)


def walk_graph(H: Hypergraph):
    """CSR rows of ``W`` with cumulative weights, in the kernel's own layout."""
    W = csr_matrix(build_transition(H))
    cdf = np.empty_like(W.data)
    for i in range(W.shape[0]):
        lo, hi = W.indptr[i], W.indptr[i + 1]
        cdf[lo:hi] = np.cumsum(W.data[lo:hi])
    return _kernels.prepare(
        W.indptr.astype(np.int64), W.indices.astype(np.int64), cdf
    )


def highest_hyperdegree_node(H: Hypergraph) -> int:
    """Index of the largest hyperdegree (first one on ties)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return int(np.argmax(build_generalized_adjacency(H).d))


def _reset_params(spec: ResetWalkSpec | None):
    if spec is None:
        return 0, 0.0
    return spec.r, float(spec.gamma)


def _run(trial_fn, trials: int, workers: int):
    if trials < 1:
        raise ValueError("need at least one trial")
    if workers <= 1:
        return [trial_fn(k) for k in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(trial_fn, range(trials)))


def _ensemble(results, master_seed, what):
    values = np.array([r[0] for r in results], dtype=np.int64)
    capped = np.array([r[1] for r in results], dtype=bool)
    if capped.any():
        warnings.warn(
            f"{int(capped.sum())} {what} trial(s) hit the step cap; values are censored",
            RuntimeWarning,
            stacklevel=3,
        )
    return TrialEnsemble(
        master_seed=int(master_seed), values=values, capped=capped, backend=_kernels.BACKEND
    )


def simulate_hitting_time(
    H: Hypergraph,
    spec: ResetWalkSpec | None,
    i: int,
    j: int,
    trials: int,
    master_seed: int = DEFAULT_SEED,
    step_cap: int = STEP_CAP,
    workers: int = 1,
    graph=None,
) -> TrialEnsemble:
    """Empirical first-passage (``i != j``) or first-return (``i == j``) times."""
    g = graph if graph is not None else walk_graph(H)
    reset, gamma = _reset_params(spec)

    def one(k):
        rng = trial_rng(master_seed, k)
        steps, state, block = 0, i, _FIRST_BLOCK
        while steps < step_cap:
            u = rng.random(min(block, step_cap - steps))
            used, state, hit = _kernels.hit_walk(g, reset, gamma, state, j, u)
            steps += used
            if hit:
                return steps, False
            block = min(2 * block, _MAX_BLOCK)
        return steps, True

    return _ensemble(_run(one, trials, workers), master_seed, "hitting")


def simulate_occupation(
    H: Hypergraph,
    spec: ResetWalkSpec | None,
    i: int,
    t: int,
    trials: int,
    master_seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> np.ndarray:
    """Counts of where ``trials`` walkers from ``i`` sit after ``t`` steps."""
    g = walk_graph(H)
    reset, gamma = _reset_params(spec)

    def one(k):
        u = trial_rng(master_seed, k).random(t)
        return _kernels.fixed_walk(g, reset, gamma, i, u)

    ends = _run(one, trials, workers)
    return np.bincount(np.asarray(ends, dtype=np.int64), minlength=H.node_count)


def cover_time(
    H: Hypergraph,
    spec: ResetWalkSpec,
    trials: int,
    master_seed: int = DEFAULT_SEED,
    step_cap: int = STEP_CAP,
    workers: int = 1,
    graph=None,
) -> TrialEnsemble:
    """Steps until every node has been visited, starting (and resetting) at ``spec.r``.

    The start node counts as visited at time zero.
    """
    g = graph if graph is not None else walk_graph(H)
    n = H.node_count
    reset, gamma = spec.r, float(spec.gamma)

    def one(k):
        rng = trial_rng(master_seed, k)
        visited = np.zeros(n, dtype=np.uint8)
        visited[reset] = 1
        remaining = n - 1
        steps, state, block = 0, reset, _FIRST_BLOCK
        while remaining and steps < step_cap:
            u = rng.random(min(block, step_cap - steps))
            used, state, remaining = _kernels.cover_walk(
                g, reset, gamma, state, visited, remaining, u
            )
            steps += used
            block = min(2 * block, _MAX_BLOCK)
        return steps, remaining > 0

    return _ensemble(_run(one, trials, workers), master_seed, "cover")


def cover_gamma_grid(gamma_max: float = 0.001, step: float = 0.00002) -> np.ndarray:
    """``0, step, 2 step, ..., gamma_max`` built from integer multiples (no drift)."""
    count = int(round(gamma_max / step))
    return np.arange(count + 1) * step


def gamma_sweep_cover(
    H: Hypergraph,
    r: int,
    gammas,
    trials: int,
    master_seed: int = DEFAULT_SEED,
    step_cap: int = STEP_CAP,
    workers: int = 1,
) -> list[SweepPoint]:
    """Mean cover time at each reset probability, same trial streams for every value."""
    g = walk_graph(H)
    out = []
    for gamma in gammas:
        ens = cover_time(
            H, ResetWalkSpec(r, float(gamma)), trials, master_seed, step_cap, workers, graph=g
        )
        out.append(SweepPoint(float(gamma), ens.mean, ens.stderr, trials, int(master_seed)))
    return out
