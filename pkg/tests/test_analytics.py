import numpy as np
import pytest
from conftest import connected_hypergraphs, rel
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperwalk import analytics
from hyperwalk.analytics import (
    first_passage_distribution,
    deconvolution_moments,
    first_passage_series,
    mfpt,
    mfpt_linear_solve,
    mfpt_matrix,
    occupation_matrix,
    occupation_probability,
    occupation_series,
    passage_moments,
    passage_moments_linear_solve,
    reset_mfpt,
    reset_mfpt_matrix,
    reset_occupation,
    reset_stationary,
    reset_stationary_vector,
    stationary,
    transient_moment,
    transient_moment_matrix,
)
from hyperwalk.errors import ConnectivityError, NumericalError
from hyperwalk.hypergraph import build_transition, parse_hyperedge_list
from hyperwalk.spectral import ResetWalkSpec, assemble_pi, decompose_hypergraph, reset_spectrum


def test_two_edges_stationary_and_return(two_edges):
    np.testing.assert_array_equal(stationary(two_edges), np.array([4, 4, 5, 1]) / 14)
    dec = decompose_hypergraph(two_edges)
    assert mfpt(dec, 3, 3, H=two_edges) == 14.0
    assert mfpt(dec, 3, 3) == pytest.approx(14.0, rel=1e-14)


def test_stationary_requires_connectivity():
    with pytest.raises(ConnectivityError):
        stationary(parse_hyperedge_list("a b\nc d\n"))


def test_k3_first_passage(k3):
    dec = decompose_hypergraph(k3)
    assert mfpt(dec, 0, 1) == pytest.approx(2.0, abs=1e-14)
    # geometric first passage: F(t) = (1/2)^t
    F = first_passage_series(build_transition(k3), 0, 1, 80)
    np.testing.assert_allclose(F[1:6], 0.5 ** np.arange(1, 6), atol=1e-15)
    m1, m2, left = passage_moments(F)
    assert m1 == pytest.approx(2.0, abs=1e-12) and m2 == pytest.approx(6.0, abs=1e-12)
    assert left < 1e-20


def test_k3_reset_stationary(k3):
    rdec = reset_spectrum(decompose_hypergraph(k3), ResetWalkSpec(0, 0.2))
    np.testing.assert_allclose(reset_stationary_vector(rdec), [3 / 7, 2 / 7, 2 / 7], atol=1e-15)
    assert reset_stationary(rdec, 0) == pytest.approx(3 / 7, abs=1e-15)
    np.testing.assert_allclose(rdec.left[0], [3 / 7, 2 / 7, 2 / 7], atol=1e-15)


def test_occupation_at_time_zero(two_edges):
    dec = decompose_hypergraph(two_edges)
    np.testing.assert_allclose(occupation_matrix(dec, 0), np.eye(4), atol=1e-14)
    assert occupation_probability(dec, 0, 0, 0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        occupation_probability(dec, 0, 0, -1)
    with pytest.raises(ValueError):
        occupation_probability(dec, 0, 0, 1.5)


def test_clamping_and_negative_guard(two_edges):
    dec = decompose_hypergraph(two_edges)
    before = analytics.clamped_count()
    # a to d is impossible in one step; the spectral sum lands within roundoff of zero
    values = [occupation_probability(dec, 0, 3, 1), occupation_probability(dec, 1, 3, 1)]
    assert values == [0.0, 0.0] or min(values) >= 0.0
    assert analytics.clamped_count() >= before
    with pytest.raises(NumericalError):
        analytics._probability(-1e-6)


def test_transient_moments_against_fundamental_matrix(two_edges):
    dec = decompose_hypergraph(two_edges)
    W = build_transition(two_edges)
    # A = W - P^inf has the same transient modes and no unit eigenvalue
    Pinf = np.tile(dec.stationary, (4, 1))
    A = W - Pinf
    M = np.linalg.inv(np.eye(4) - A)
    np.testing.assert_allclose(transient_moment_matrix(dec, 0), M - Pinf, rtol=0, atol=1e-13)
    np.testing.assert_allclose(transient_moment_matrix(dec, 1), A @ M @ M, rtol=0, atol=1e-13)
    assert transient_moment(dec, 1, 2, 1) == pytest.approx(0.034620991253644325, abs=1e-15)
    with pytest.raises(ValueError):
        transient_moment_matrix(dec, 2)


def test_deconvolution_input_checks():
    with pytest.raises(ValueError):
        first_passage_distribution([0.0, 1.0], [1.0], False)
    with pytest.raises(NumericalError):
        # occupation of a nonsense series gives large negative mass
        first_passage_distribution([0.0, 0.9, 0.0], [1.0, 0.9, 0.9], False)


def test_linear_solve_detects_unreachable():
    P = np.array([[1.0, 0.0], [0.5, 0.5]])
    with pytest.raises(ConnectivityError):
        mfpt_linear_solve(P, 1)


def test_occupation_series_orientation(two_edges):
    W = build_transition(two_edges)
    S = occupation_series(W, 3, 4)
    np.testing.assert_allclose(S[4], np.linalg.matrix_power(W, 4)[:, 3], atol=1e-15)


def test_lollipop_mfpt_three_ways(lollipop):
    W = build_transition(lollipop)
    dec = decompose_hypergraph(lollipop)
    T = mfpt_matrix(dec)
    for i, j in [(8, 9), (9, 3), (0, 9)]:
        lin = mfpt_linear_solve(W, j)[i]
        dcv, _, _ = deconvolution_moments(W, i, j)
        assert rel(T[i, j], lin) < 1e-9 and rel(dcv, lin) < 1e-6
        assert mfpt(dec, i, j) == pytest.approx(T[i, j], rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(connected_hypergraphs(), st.integers(0, 10))
def test_occupation_matches_matrix_power(H, t):
    dec = decompose_hypergraph(H)
    Wt = np.linalg.matrix_power(build_transition(H), t)
    assert np.abs(occupation_matrix(dec, t) - Wt).max() < 1e-9


@settings(max_examples=40, deadline=None)
@given(connected_hypergraphs(), st.data())
def test_mfpt_matches_linear_solve(H, data):
    dec = decompose_hypergraph(H)
    T = mfpt_matrix(dec)
    W = build_transition(H)
    j = data.draw(st.integers(0, H.node_count - 1))
    lin = mfpt_linear_solve(W, j)
    np.testing.assert_allclose(T[:, j], lin, rtol=1e-8)
    # Kac
    np.testing.assert_allclose(np.diag(T) * dec.stationary, 1.0, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(connected_hypergraphs(max_nodes=15), st.data())
def test_reset_observables_match_dense_chain(H, data):
    n = H.node_count
    r = data.draw(st.integers(0, n - 1))
    g = data.draw(st.floats(0.0, 0.95))
    i, j = data.draw(st.integers(0, n - 1)), data.draw(st.integers(0, n - 1))
    t = data.draw(st.integers(0, 12))
    spec = ResetWalkSpec(r, g)
    rdec = reset_spectrum(decompose_hypergraph(H), spec)
    Pi = assemble_pi(build_transition(H), spec)
    brute = np.linalg.matrix_power(Pi, t)[i, j]
    assert abs(reset_occupation(rdec, i, j, t) - max(brute, 0.0)) < 1e-9
    assert abs(occupation_probability(rdec, i, j, t) - max(brute, 0.0)) < 1e-9
    lin = mfpt_linear_solve(Pi, j)
    assert rel(reset_mfpt(rdec, i, j), lin[i]) < 1e-8
    M = reset_mfpt_matrix(rdec)
    np.testing.assert_allclose(M[:, j], lin, rtol=1e-8)
    np.testing.assert_allclose(np.diag(M) * reset_stationary_vector(rdec), 1.0, rtol=1e-10)


@settings(max_examples=30, deadline=None)
@given(connected_hypergraphs(max_nodes=10))
def test_second_moment_oracles_agree(H):
    W = build_transition(H)
    j = H.node_count - 1
    m1, m2 = passage_moments_linear_solve(W, j)
    for i in (0, j):
        a1, a2, _ = deconvolution_moments(W, i, j)
        assert rel(a1, m1[i]) < 1e-6 and rel(a2, m2[i]) < 1e-6


def test_reset_stationary_stays_accurate_near_one(lollipop):
    # far from the reset node the stationary mass is ~ (1-g)^distance
    dec = decompose_hypergraph(lollipop)
    W = build_transition(lollipop)
    g = 0.999
    p = reset_stationary_vector(reset_spectrum(dec, ResetWalkSpec(9, g)))
    # renewal series: g sum_t (1-g)^t e_r W^t, all terms positive
    x = np.zeros(10)
    x[9] = 1.0
    ref = np.zeros(10)
    for t in range(12):
        ref += g * (1 - g) ** t * x
        x = x @ W
    assert np.abs(p - ref).max() < 1e-17
    big = ref > 1e-10
    np.testing.assert_allclose(p[big], ref[big], rtol=1e-7)


def test_unresolvable_reset_mfpt_raises(lollipop):
    # the clique sits ~1e-20 deep in the resetting stationary vector
    rdec = reset_spectrum(decompose_hypergraph(lollipop), ResetWalkSpec(9, 1 - 1e-4))
    with pytest.raises(NumericalError):
        reset_mfpt_matrix(rdec)
    with pytest.raises(NumericalError):
        reset_mfpt(rdec, 9, 0)
    # targets near the reset node are still fine
    Pi = assemble_pi(build_transition(lollipop), rdec.spec)
    assert rel(reset_mfpt(rdec, 0, 9), mfpt_linear_solve(Pi, 9)[0]) < 1e-9


def test_deconvolution_tail_extrapolation(lollipop):
    W = build_transition(lollipop)
    m1, m2 = passage_moments_linear_solve(W, 9)
    a1, a2, tail = deconvolution_moments(W, 0, 9, start=256)
    assert 0 < tail <= 0.05
    assert rel(a1, m1[0]) < 1e-9 and rel(a2, m2[0]) < 1e-9
    with pytest.raises(NumericalError):
        deconvolution_moments(W, 0, 9, start=64, limit=64)


def test_refined_solve_on_ill_conditioned_chain():
    from fractions import Fraction

    # two sticky states leaking into the target at rate ~1e-9
    q = 1e-9
    P = np.array([[1 - 2 * q, q, q], [q, 1 - 3 * q, 2 * q], [0.5, 0.5, 0.0]])
    a, b, c, d = (Fraction(1) - Fraction(P[0, 0]), -Fraction(P[0, 1]),
                  -Fraction(P[1, 0]), Fraction(1) - Fraction(P[1, 1]))
    det = a * d - b * c
    exact = [(d - b) / det, (a - c) / det]
    T = mfpt_linear_solve(P, 2)
    assert rel(T[0], float(exact[0])) < 1e-14 and rel(T[1], float(exact[1])) < 1e-14
