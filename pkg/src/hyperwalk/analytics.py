"""Closed-form walk observables and their time-domain oracles.

Everything here is evaluated from a spectral decomposition: occupation
probabilities, stationary vectors, transient moments and mean first
passage times, for the plain walk and for the walk with resetting. Two
independent oracles live alongside: first-passage deconvolution of the
occupation series, and the linear solve for hitting times.
"""
from __future__ import annotations

import threading
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from . import _kernels
from .errors import ConnectivityError, NumericalError
from .hypergraph import Hypergraph, build_generalized_adjacency, is_connected
from .spectral import (
    ResetSpectralDecomposition,
    SpectralDecomposition,
    reset_coefficients,
    reset_perron_left,
)

__all__ = [
    "occupation_probability",
    "occupation_matrix",
    "stationary",
    "transient_moment",
    "transient_moment_matrix",
    "mfpt",
    "mfpt_matrix",
    "reset_stationary",
    "reset_stationary_vector",
    "reset_occupation",
    "reset_mfpt",
    "reset_mfpt_matrix",
    "first_passage_distribution",
    "first_passage_series",
    "passage_moments",
    "deconvolution_moments",
    "occupation_series",
    "mfpt_linear_solve",
    "passage_moments_linear_solve",
    "clamped_count",
]

CLAMP_TOL = 1e-12

_clamp_lock = threading.Lock()
_clamped = 0


def clamped_count() -> int:
    """How many tiny negative probabilities have been clamped to zero so far."""
    return _clamped


def _probability(x: float) -> float:
    global _clamped
    if x < 0.0:
        if x < -CLAMP_TOL:
            raise NumericalError(f"probability evaluated to {x:.3e}")
        with _clamp_lock:
            _clamped += 1
        return 0.0
    return float(x)


def _check_time(t):
    if int(t) != t or t < 0:
        raise ValueError(f"time must be a non-negative integer, got {t}")
    return int(t)


# -- plain walk --------------------------------------------------------------


def occupation_matrix(dec: SpectralDecomposition, t: int) -> np.ndarray:
    """All ``P_ij(t)`` at once, unclamped."""
    return dec.reconstruct(_check_time(t))


def occupation_probability(dec: SpectralDecomposition, i: int, j: int, t: int) -> float:
    """``P_ij(t) = sum_l lambda_l^t <i|phi_l><phibar_l|j>``.

    Works for any decomposition, including a resetting one.
    """
    t = _check_time(t)
    val = np.sum(dec.eigenvalues**t * dec.right[i] * dec.left[:, j])
    return _probability(val)


def stationary(H: Hypergraph) -> np.ndarray:
    """Stationary vector ``d / N``, exact up to one division per entry."""
    if not is_connected(H):
        raise ConnectivityError(
            "stationary distribution needs a connected hypergraph; use --lcc"
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        adj = build_generalized_adjacency(H)
    return adj.d / adj.total_weight


def _mode_weights(lam: np.ndarray, order: int) -> np.ndarray:
    w = np.zeros_like(lam)
    rest = lam[1:]
    if order == 0:
        w[1:] = 1.0 / (1.0 - rest)
    elif order == 1:
        w[1:] = rest / (1.0 - rest) ** 2
    else:
        raise ValueError("only orders 0 and 1 are supported")
    return w


def transient_moment_matrix(dec: SpectralDecomposition, order: int) -> np.ndarray:
    """``R^(n)_ij = sum_t t^n (P_ij(t) - P_j^inf)`` for ``n`` in {0, 1}, all pairs."""
    return (dec.right * _mode_weights(dec.eigenvalues, order)) @ dec.left


def transient_moment(dec: SpectralDecomposition, i: int, j: int, order: int) -> float:
    """Single entry of :func:`transient_moment_matrix` (geometric sums, no truncation)."""
    w = _mode_weights(dec.eigenvalues, order)
    return float(np.sum(w * dec.right[i] * dec.left[:, j]))


def mfpt(dec: SpectralDecomposition, i: int, j: int, H: Hypergraph | None = None) -> float:
    """Mean first passage time ``i -> j`` (first return when ``i == j``).

    ``N / d_j`` for ``i == j`` and ``N / d_j (R_jj - R_ij)`` otherwise. When
    ``H`` is given, ``N / d_j`` is taken from its exact integer hyperdegrees.
    """
    if H is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            adj = build_generalized_adjacency(H)
        inv_p = adj.total_weight / adj.d[j]
    else:
        inv_p = 1.0 / dec.left[0, j]
    if i == j:
        return float(inv_p)
    w = _mode_weights(dec.eigenvalues, 0)
    diff = np.sum(w * (dec.right[j] - dec.right[i]) * dec.left[:, j])
    return float(inv_p * diff)


def mfpt_matrix(dec: SpectralDecomposition) -> np.ndarray:
    """``T[i, j]`` for all pairs; diagonal holds the return times."""
    R = transient_moment_matrix(dec, 0)
    p = dec.left[0]
    T = (np.diag(R)[None, :] - R) / p[None, :]
    T[np.diag_indices_from(T)] = 1.0 / p
    return T


# -- resetting walk ----------------------------------------------------------


def _base_and_spec(rdec):
    if not isinstance(rdec, ResetSpectralDecomposition):
        raise TypeError("expected a ResetSpectralDecomposition")
    return rdec.base, rdec.spec


def reset_stationary_vector(rdec: ResetSpectralDecomposition) -> np.ndarray:
    """``P^inf(r, g) = d/N + g sum_l <r|phi_l><phibar_l| / (1 - (1-g) lambda_l)``.

    Computed by :func:`~hyperwalk.spectral.reset_perron_left`, which
    rearranges the sum so that it stays accurate for ``g`` near one.
    """
    base, spec = _base_and_spec(rdec)
    return reset_perron_left(base, spec)


def reset_stationary(rdec: ResetSpectralDecomposition, j: int) -> float:
    return _probability(reset_stationary_vector(rdec)[j])


def reset_occupation(rdec: ResetSpectralDecomposition, i: int, j: int, t: int) -> float:
    """``P_ij(t; r, g)`` written through the eigen-system of ``W``.

    ``P_j^inf(r, g) + sum_l ((1-g) lambda_l)^t [<i|phi_l> - a_l] <phibar_l|j>``
    where ``a_l`` are the reset coefficients.
    """
    t = _check_time(t)
    base, spec = _base_and_spec(rdec)
    g = spec.gamma
    zeta = (1.0 - g) * base.eigenvalues[1:]
    a = reset_coefficients(base, spec)[1:]
    modes = zeta**t * (base.right[i, 1:] - a) * base.left[1:, j]
    return _probability(reset_stationary_vector(rdec)[j] + modes.sum())


def reset_mfpt(rdec: ResetSpectralDecomposition, i: int, j: int) -> float:
    """Mean first passage time of the resetting walk.

    ``[delta_ij + sum_l (<j|phi_l> - <i|phi_l>) <phibar_l|j> / (1 - (1-g) lambda_l)]
    / P_j^inf(r, g)``.

    Raises :class:`NumericalError` when ``P_j^inf(r, g)`` is below what the
    mode sum can resolve (it evaluates to zero or less).
    """
    base, spec = _base_and_spec(rdec)
    p = _resolved(reset_stationary_vector(rdec)[[j]], [j])[0]
    lam = base.eigenvalues[1:]
    terms = (base.right[j, 1:] - base.right[i, 1:]) * base.left[1:, j]
    s = np.sum(terms / (1.0 - (1.0 - spec.gamma) * lam))
    return float(((1.0 if i == j else 0.0) + s) / p)


def _resolved(p, nodes):
    bad = [k for k, v in zip(nodes, p) if not v > 0.0]
    if bad:
        raise NumericalError(
            f"resetting stationary probability of node {bad[0]} is below numerical "
            "resolution; its passage time cannot be evaluated spectrally"
        )
    return p


def reset_mfpt_matrix(rdec: ResetSpectralDecomposition) -> np.ndarray:
    base, spec = _base_and_spec(rdec)
    p = _resolved(reset_stationary_vector(rdec), range(base.n))
    w = np.zeros(base.n)
    w[1:] = 1.0 / (1.0 - (1.0 - spec.gamma) * base.eigenvalues[1:])
    R = (base.right * w) @ base.left
    return (np.diag(R)[None, :] - R + np.eye(base.n)) / p[None, :]


# -- oracles -----------------------------------------------------------------


def occupation_series(P: np.ndarray, j: int, t_max: int) -> np.ndarray:
    """``out[t, i] = (P^t)_ij`` for ``t = 0..t_max`` by repeated products."""
    P = np.asarray(P, dtype=float)
    out = np.empty((t_max + 1, P.shape[0]))
    x = np.zeros(P.shape[0])
    x[j] = 1.0
    out[0] = x
    for t in range(1, t_max + 1):
        x = P @ x
        out[t] = x
    return out


def first_passage_distribution(p_ij, p_jj, same_node: bool) -> np.ndarray:
    """Deconvolve ``P_ij(t) = delta_t0 delta_ij + sum_t' P_jj(t - t') F_ij(t')``.

    Parameters
    ----------
    p_ij, p_jj : array_like
        Occupation series for ``t = 0..t_max``. ``p_jj[0]`` must be 1.
    same_node : bool
        Whether ``i == j`` (first return rather than first passage).

    Returns
    -------
    ndarray
        ``F_ij(0..t_max)`` with ``F(0) = 0``.
    """
    p_ij = np.ascontiguousarray(p_ij, dtype=float)
    p_jj = np.ascontiguousarray(p_jj, dtype=float)
    if p_ij.shape != p_jj.shape:
        raise ValueError("occupation series must have equal length")
    F = _kernels.deconvolve(p_ij, p_jj, bool(same_node))
    low = F.min(initial=0.0)
    if low < -1e-9:
        raise NumericalError(f"deconvolution produced a negative mass {low:.3e}")
    return np.clip(F, 0.0, 1.0)


def first_passage_series(P: np.ndarray, i: int, j: int, t_max: int) -> np.ndarray:
    """``F_ij(0..t_max)`` for the chain ``P`` via deconvolution."""
    series = occupation_series(P, j, t_max)
    return first_passage_distribution(series[:, i], series[:, j], i == j)


def passage_moments(F: np.ndarray) -> tuple[float, float, float]:
    """Return ``(sum t F, sum t^2 F, 1 - sum F)`` for a first-passage series."""
    t = np.arange(F.shape[0], dtype=float)
    return float(t @ F), float((t * t) @ F), float(1.0 - F.sum())


def _geometric_tail(F: np.ndarray):
    """Moments carried by ``t > N`` when ``F(t) = F(N) rho^(t - N)`` there."""
    N = F.shape[0] - 1
    rho = F[N] / F[N - 1]
    mid = N // 2
    if not (0.0 < rho < 1.0 and F[mid - 1] > 0.0):
        return None
    if abs(F[mid] / F[mid - 1] - rho) > 1e-10:
        return None  # slowest mode not yet dominant
    q = 1.0 - rho
    mass = F[N] * rho / q
    mean = F[N] * (N * rho / q + rho / q**2)
    second = F[N] * (N * N * rho / q + 2 * N * rho / q**2 + rho * (1 + rho) / q**3)
    return mass, mean, second


def deconvolution_moments(
    P: np.ndarray,
    i: int,
    j: int,
    survival: float = 1e-12,
    start: int = 1024,
    limit: int = 1 << 17,
    max_extrapolated: float = 0.05,
) -> tuple[float, float, float]:
    """First two passage moments from the deconvolved series alone.

    The series is doubled until either the unabsorbed mass drops below
    ``survival`` or at most ``max_extrapolated`` of it is left and the tail
    has settled into a single geometric mode; that remainder is then summed
    in closed form. Returns ``(mean, second, extrapolated_mass)``.
    """
    t_max = start
    while True:
        F = first_passage_series(P, i, j, t_max)
        mean, second, left = passage_moments(F)
        if left < survival:
            return mean, second, 0.0
        tail = _geometric_tail(F) if left <= max_extrapolated else None
        if tail is not None:
            return mean + tail[1], second + tail[2], tail[0]
        if t_max >= limit:
            raise NumericalError(
                f"first-passage series for {i}->{j} did not settle within {limit} steps"
            )
        t_max *= 2


def _absorbing_system(P: np.ndarray, j: int):
    P = np.asarray(P, dtype=float)
    keep = np.delete(np.arange(P.shape[0]), j)
    Q = P[np.ix_(keep, keep)]
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            lu = lu_factor(np.eye(keep.size) - Q)
        except (LinAlgWarning, ValueError) as exc:
            raise ConnectivityError(f"target {j} is not reachable from every node") from exc
    return P, keep, Q, lu


def _solve(Q, lu, b, sweeps=3):
    """Solve ``(I - Q) x = b`` with residuals refined in extended precision.

    Hitting times of slowly absorbing chains make ``I - Q`` badly
    conditioned; a few refinement sweeps with long-double residuals bring
    the forward error back to a few ulps.
    """
    x = lu_solve(lu, b)
    Q_ext = Q.astype(np.longdouble)
    b_ext = np.asarray(b, dtype=np.longdouble)
    for _ in range(sweeps):
        x_ext = x.astype(np.longdouble)
        r = b_ext - x_ext + Q_ext @ x_ext
        x = x + lu_solve(lu, r.astype(float))
    return x


def _reachable(x, j):
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise ConnectivityError(f"target {j} is not reachable from every node")


def mfpt_linear_solve(P: np.ndarray, j: int) -> np.ndarray:
    """Hitting times to ``j`` from every node by solving ``(I - Q) x = 1``.

    Entry ``j`` is the return time ``1 + sum_k P_jk x_k``.
    """
    P, keep, Q, lu = _absorbing_system(P, j)
    x = _solve(Q, lu, np.ones(keep.size))
    _reachable(x, j)
    out = np.empty(P.shape[0])
    out[keep] = x
    out[j] = 1.0 + P[j, keep] @ x
    return out


def passage_moments_linear_solve(P: np.ndarray, j: int) -> tuple[np.ndarray, np.ndarray]:
    """First and second moments of the hitting time of ``j`` (entry ``j`` is the return)."""
    P, keep, Q, lu = _absorbing_system(P, j)
    m1 = _solve(Q, lu, np.ones(keep.size))
    _reachable(m1, j)
    m2 = _solve(Q, lu, np.ones(keep.size) + 2.0 * Q @ m1)
    first = np.empty(P.shape[0])
    second = np.empty(P.shape[0])
    first[keep], second[keep] = m1, m2
    row = P[j, keep]
    first[j] = 1.0 + row @ m1
    second[j] = 1.0 + row @ (2.0 * m1 + m2)
    return first, second
