"""Biorthonormal eigen-systems of the walk and of the resetting walk.

``W = D^{-1} K`` is similar to the symmetric ``S = D^{-1/2} K D^{-1/2}``, so the
spectrum is real and an orthonormal eigenbasis ``u_l`` of ``S`` yields
right vectors ``D^{-1/2} u_l`` and left vectors ``u_l^T D^{1/2}`` that are
biorthonormal by construction, even for repeated eigenvalues.

The resetting matrix ``Pi(r, g) = (1 - g) W + g Theta(r)`` is never
diagonalized; its eigen-system is assembled in closed form from the one of
``W`` (see :func:`reset_spectrum`).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from .errors import ConnectivityError, NumericalError

__all__ = [
    "SpectralDecomposition",
    "ResetWalkSpec",
    "ResetSpectralDecomposition",
    "decompose",
    "decompose_hypergraph",
    "reset_spectrum",
    "reset_perron_left",
    "assemble_pi",
    "power_iteration_left",
]

ALGEBRA_TOL = 1e-10
STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues with right vectors as columns and left vectors as rows.

    ``right[:, l]`` is ``|phi_l>``, ``left[l]`` is ``<phibar_l|`` and
    ``left @ right`` is the identity.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def stationary(self) -> np.ndarray:
        return self.left[0]

    def reconstruct(self, t: int = 1) -> np.ndarray:
        """``sum_l lambda_l^t |phi_l><phibar_l|``."""
        return (self.right * self.eigenvalues**t) @ self.left


@dataclass(frozen=True)
class ResetWalkSpec:
    r: int
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"reset probability must lie in [0, 1), got {self.gamma}")
        if self.r < 0:
            raise ValueError(f"invalid reset node {self.r}")


@dataclass(frozen=True)
class ResetSpectralDecomposition(SpectralDecomposition):
    """Eigen-system of ``Pi(r, gamma)`` together with the base system it came from."""

    base: SpectralDecomposition = field(default=None, repr=False)
    spec: ResetWalkSpec = None


def _check_connected(pattern: np.ndarray) -> None:
    ncomp, _ = csgraph.connected_components(csr_matrix(pattern), directed=False)
    if ncomp != 1:
        raise ConnectivityError(
            f"the walk splits into {ncomp} components; reduce to the largest one first"
        )


def decompose(W: np.ndarray, d: np.ndarray) -> SpectralDecomposition:
    """Spectral decomposition of the transition matrix ``W``.

    Parameters
    ----------
    W : (n, n) ndarray
        Row-stochastic transition matrix with ``d_i W_ij`` symmetric.
    d : (n,) array_like
        Hyperdegrees (any positive multiple works; only ratios matter).

    Returns
    -------
    SpectralDecomposition
        ``lambda_1 = 1`` first, the rest descending. ``right[:, 0]`` is all
        ones and ``left[0]`` is ``d / sum(d)``.

    Raises
    ------
    ConnectivityError
        If the walk is reducible (``lambda = 1`` not simple).
    """
    W = np.asarray(W, dtype=float)
    d = np.asarray(d, dtype=float)
    n = W.shape[0]
    if np.any(d <= 0):
        raise ConnectivityError("every node needs positive hyperdegree")
    _check_connected(W > 0)

    sq = np.sqrt(d)
    S = sq[:, None] * W / sq[None, :]
    S = 0.5 * (S + S.T)
    vals, U = np.linalg.eigh(S)
    if not np.all(np.isfinite(vals)):
        raise NumericalError("symmetric eigensolver returned non-finite values")

    top = int(np.argmax(vals))
    rest = np.delete(np.arange(n), top)
    rest = rest[np.argsort(-vals[rest], kind="stable")]
    order = np.concatenate(([top], rest))
    vals = vals[order]
    U = U[:, order]
    if n > 1 and vals[1] >= 1.0 - STOCHASTIC_TOL:
        raise ConnectivityError("eigenvalue 1 is not simple; the walk is reducible")

    # deterministic signs: largest-magnitude entry of each u_l positive
    pivots = np.argmax(np.abs(U), axis=0)
    U = U * np.sign(U[pivots, np.arange(n)])

    right = U / sq[:, None]
    left = U.T * sq[None, :]
    vals[0] = 1.0
    right[:, 0] = 1.0
    left[0] = d / d.sum()
    return SpectralDecomposition(_ro(vals), _ro(right), _ro(left))


def decompose_hypergraph(H) -> SpectralDecomposition:
    from .hypergraph import build_generalized_adjacency, build_transition, is_connected

    if not is_connected(H):
        raise ConnectivityError(
            "hypergraph is not connected; use its largest connected component (--lcc)"
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        adj = build_generalized_adjacency(H)
    return decompose(build_transition(H, adj), adj.d)


def _ro(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def reset_coefficients(base: SpectralDecomposition, spec: ResetWalkSpec) -> np.ndarray:
    """``gamma / (1 - (1 - gamma) lambda_l) * <r|phi_l> / <r|phi_1>`` for every ``l``.

    Entry 0 is unused and set to zero.
    """
    if not 0 <= spec.r < base.n:
        raise ValueError(f"reset node {spec.r} outside [0, {base.n})")
    g = spec.gamma
    lam = base.eigenvalues
    r_row = base.right[spec.r]
    if r_row[0] != 1.0:
        raise NumericalError("right Perron vector must be all ones")
    coef = np.zeros(base.n)
    coef[1:] = g / (1.0 - (1.0 - g) * lam[1:]) * r_row[1:]
    return coef


def reset_perron_left(base: SpectralDecomposition, spec: ResetWalkSpec) -> np.ndarray:
    """Stationary vector of ``Pi(r, g)``: ``<phibar_1| + sum_l a_l <phibar_l|``.

    Evaluated in the equivalent form (using completeness of the base system)

        (1 - g) d/N + g e_r + g (1 - g) sum_l lambda_l <r|phi_l><phibar_l| / den_l

    which avoids cancelling O(1) terms when ``g`` is close to one.
    """
    if not 0 <= spec.r < base.n:
        raise ValueError(f"reset node {spec.r} outside [0, {base.n})")
    g = spec.gamma
    lam = base.eigenvalues[1:]
    h = 1.0 - g
    w = g * h * lam * base.right[spec.r, 1:] / (1.0 - h * lam)
    out = h * base.left[0] + w @ base.left[1:]
    out[spec.r] += g
    return out


def reset_spectrum(
    base: SpectralDecomposition, spec: ResetWalkSpec, check: bool = False
) -> ResetSpectralDecomposition:
    """Closed-form eigen-system of ``Pi(r, gamma)`` from that of ``W``.

    The eigenvalues are ``1`` and ``(1 - gamma) lambda_l``. Left vectors for
    ``l >= 2`` and the right Perron vector are unchanged; the left Perron
    vector gains ``sum_m a_m <phibar_m|`` and each right vector ``l >= 2``
    loses ``a_l |phi_1>``, with ``a`` from :func:`reset_coefficients`.

    With ``check=True`` the biorthonormality of the result is measured and a
    ``RuntimeWarning`` is emitted when it exceeds ``1e-8``; a numerically
    singular right eigenvector matrix raises :class:`NumericalError`. The
    update is a unit-triangular change of basis, so neither should fire.
    """
    if spec.gamma == 0.0:
        return ResetSpectralDecomposition(
            base.eigenvalues, base.right, base.left, base=base, spec=spec
        )
    coef = reset_coefficients(base, spec)
    zeta = (1.0 - spec.gamma) * base.eigenvalues
    zeta[0] = 1.0
    left = np.array(base.left)
    left[0] = reset_perron_left(base, spec)
    right = base.right - np.outer(base.right[:, 0], coef)
    right[:, 0] = base.right[:, 0]
    if check:
        if np.linalg.cond(right) * np.finfo(float).eps > 1e-3:
            raise NumericalError("reset eigenvectors are numerically dependent")
        err = np.abs(left @ right - np.eye(base.n)).max()
        if err > 1e-8:
            warnings.warn(
                f"reset eigenvectors far from biorthonormal (max error {err:.3g})",
                RuntimeWarning,
                stacklevel=2,
            )
    return ResetSpectralDecomposition(_ro(zeta), _ro(right), _ro(left), base=base, spec=spec)


def assemble_pi(W: np.ndarray, spec: ResetWalkSpec) -> np.ndarray:
    """Dense ``Pi_ij = (1 - gamma) W_ij + gamma delta_rj``."""
    W = np.asarray(W, dtype=float)
    if not 0 <= spec.r < W.shape[0]:
        raise ValueError(f"reset node {spec.r} outside [0, {W.shape[0]})")
    Pi = (1.0 - spec.gamma) * W
    Pi[:, spec.r] += spec.gamma
    return Pi


def power_iteration_left(P: np.ndarray, tol: float = 1e-15, max_squarings: int = 80) -> np.ndarray:
    """Left Perron vector of a row-stochastic matrix by matrix powering.

    Uses the lazy chain ``(I + P) / 2`` (same stationary vector, aperiodic)
    and squares it until all rows agree to ``tol``; ``k`` squarings give the
    ``2^k``-th power, so slowly mixing chains still converge.
    """
    P = np.asarray(P, dtype=float)
    M = 0.5 * (P + np.eye(P.shape[0]))
    for _ in range(max_squarings):
        M = M @ M
        M /= M.sum(axis=1, keepdims=True)
        if np.ptp(M, axis=0).max() < tol:
            x = M.mean(axis=0)
            return x / x.sum()
    raise NumericalError("power iteration did not converge")
