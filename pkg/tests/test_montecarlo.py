import math

import numpy as np
import pytest

from hyperwalk import _kernels
from hyperwalk.analytics import mfpt_matrix, reset_mfpt_matrix, reset_occupation
from hyperwalk.montecarlo import (
    DEFAULT_SEED,
    cover_time,
    gamma_sweep_cover,
    highest_hyperdegree_node,
    cover_gamma_grid,
    simulate_hitting_time,
    simulate_occupation,
    step_sampler,
    trial_rng,
)
from hyperwalk.spectral import ResetWalkSpec, decompose_hypergraph, reset_spectrum


def test_trial_streams_are_independent_and_stable():
    a = trial_rng(5, 0).random(4)
    assert np.array_equal(a, trial_rng(5, 0).random(4))
    assert not np.array_equal(a, trial_rng(5, 1).random(4))
    assert not np.array_equal(a, trial_rng(6, 0).random(4))


def test_step_sampler():
    rng = trial_rng(1, 0)
    draws = [step_sampler([0.0, 1.0, 0.0], rng) for _ in range(20)]
    assert set(draws) == {1}


def test_hitting_time_matches_mfpt(two_edges):
    dec = decompose_hypergraph(two_edges)
    T = mfpt_matrix(dec)
    ens = simulate_hitting_time(two_edges, None, 0, 3, 4000, master_seed=3)
    assert ens.trial_count == 4000 and ens.capped_count == 0
    assert abs(ens.mean - T[0, 3]) < 4 * ens.stderr
    ret = simulate_hitting_time(two_edges, None, 3, 3, 4000, master_seed=4)
    assert abs(ret.mean - 14.0) < 4 * ret.stderr


def test_reset_hitting_time(lollipop):
    spec = ResetWalkSpec(8, 0.3)
    rdec = reset_spectrum(decompose_hypergraph(lollipop), spec)
    T = reset_mfpt_matrix(rdec)[8, 9]
    ens = simulate_hitting_time(lollipop, spec, 8, 9, 4000, master_seed=9)
    assert abs(ens.mean - T) < 4 * ens.stderr


def test_occupation_histogram(two_edges):
    spec = ResetWalkSpec(0, 0.2)
    rdec = reset_spectrum(decompose_hypergraph(two_edges), spec)
    counts = simulate_occupation(two_edges, spec, 1, 5, 6000, master_seed=2)
    assert counts.sum() == 6000
    for j in range(4):
        p = reset_occupation(rdec, 1, j, 5)
        sd = math.sqrt(p * (1 - p) / 6000)
        assert abs(counts[j] / 6000 - p) < 4 * sd + 1e-12


def test_serial_and_threaded_identical(lollipop):
    a = simulate_hitting_time(lollipop, ResetWalkSpec(2, 0.1), 2, 9, 300, master_seed=7)
    b = simulate_hitting_time(lollipop, ResetWalkSpec(2, 0.1), 2, 9, 300, master_seed=7, workers=4)
    assert np.array_equal(a.values, b.values)
    c = cover_time(lollipop, ResetWalkSpec(0, 0.01), 60, master_seed=7, workers=3)
    d = cover_time(lollipop, ResetWalkSpec(0, 0.01), 60, master_seed=7)
    assert np.array_equal(c.values, d.values)


@pytest.mark.skipif("cython" not in _kernels.backends(), reason="compiled kernels not built")
def test_backends_identical_ensembles(lollipop, pure_python):
    py = cover_time(lollipop, ResetWalkSpec(0, 0.02), 40, master_seed=1)
    _kernels.use_backend("cython")
    cy = cover_time(lollipop, ResetWalkSpec(0, 0.02), 40, master_seed=1)
    assert py.backend == "python" and cy.backend == "cython"
    assert np.array_equal(py.values, cy.values)


def test_cover_time_on_k3(k3):
    # from a: one step covers a second node, then geometric(1/2) for the last
    ens = cover_time(k3, ResetWalkSpec(0, 0.0), 4000, master_seed=5)
    assert ens.values.min() >= 2
    assert abs(ens.mean - 3.0) < 4 * ens.stderr


def test_step_cap_censors(lollipop):
    with pytest.warns(RuntimeWarning, match="step cap"):
        ens = simulate_hitting_time(lollipop, None, 0, 9, 5, step_cap=3)
    assert ens.capped_count == 5 and np.all(ens.values == 3)


def test_sweep_and_grid(two_edges):
    g = cover_gamma_grid()
    assert g.size == 51 and g[0] == 0.0 and g[-1] == pytest.approx(0.001, abs=1e-18)
    assert g[1] == 0.00002
    pts = gamma_sweep_cover(two_edges, 2, [0.0, 0.3], 30)
    assert [p.gamma for p in pts] == [0.0, 0.3]
    assert all(p.trials == 30 and p.seed == DEFAULT_SEED for p in pts)
    again = gamma_sweep_cover(two_edges, 2, [0.0, 0.3], 30)
    assert pts == again


def test_highest_hyperdegree(two_edges, lollipop):
    assert highest_hyperdegree_node(two_edges) == 2
    assert lollipop.labels[highest_hyperdegree_node(lollipop)] == "c5"


def test_summary_fields(k3):
    ens = simulate_hitting_time(k3, None, 0, 1, 10)
    s = ens.summary()
    assert s["trials"] == 10 and s["seed"] == DEFAULT_SEED and s["capped"] == 0
    one = simulate_hitting_time(k3, None, 0, 1, 1)
    assert math.isnan(one.stderr)
    with pytest.raises(ValueError):
        simulate_hitting_time(k3, None, 0, 1, 0)
