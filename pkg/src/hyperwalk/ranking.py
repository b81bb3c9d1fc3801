"""Stationary-distribution node ranking on a hypergraph versus its clique graph."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import kendalltau, rankdata

from .errors import ConnectivityError
from .hypergraph import (
    Hypergraph,
    build_generalized_adjacency,
    clique_expansion,
    is_connected,
)

__all__ = ["RankRecord", "RankingReport", "rank_hypergraph", "rank_clique", "compare_rankings"]


def _require_connected(H):
    if not is_connected(H):
        raise ConnectivityError(
            "ranking needs a connected hypergraph; rerun with --lcc to keep the largest component"
        )


def _hyper_weights(H):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return build_generalized_adjacency(H).d


def _ordered(H, weights):
    total = weights.sum()
    order = sorted(range(H.node_count), key=lambda k: (-weights[k], H.labels[k]))
    return [(H.labels[k], float(weights[k] / total)) for k in order]


def rank_hypergraph(H: Hypergraph) -> list[tuple[str, float]]:
    """Labels by decreasing ``P^inf = d / N``; equal values listed by label."""
    _require_connected(H)
    return _ordered(H, _hyper_weights(H))


def rank_clique(H: Hypergraph) -> list[tuple[str, float]]:
    """Same as :func:`rank_hypergraph` but for the simple walk on the clique graph."""
    _require_connected(H)
    return _ordered(H, clique_expansion(H).degrees)


@dataclass(frozen=True)
class RankRecord:
    label: str
    P_inf: float
    Q_inf: float
    P_norm: float
    Q_norm: float
    rank_P: int
    rank_Q: int


@dataclass(frozen=True)
class RankingReport:
    records: tuple
    tau: float

    def rows(self):
        for r in self.records:
            yield (r.label, r.P_inf, r.Q_inf, r.P_norm, r.Q_norm, r.rank_P, r.rank_Q)


def _competition(weights):
    return rankdata(-np.asarray(weights), method="min").astype(int)


def compare_rankings(H: Hypergraph) -> RankingReport:
    """Side-by-side hypergraph and clique-graph ranking with Kendall's tau-b.

    Normalization divides by the largest integer weight, so each normalized
    column reaches exactly 1.0. Ranks are standard competition ranks; records
    are in node-index order. Tau is 1.0 when both orders coincide, including
    the case where every node is tied in both. If only one side is fully
    tied tau-b is undefined and is reported as NaN.
    """
    _require_connected(H)
    d = np.asarray(_hyper_weights(H))
    k = np.asarray(clique_expansion(H).degrees)
    rP, rQ = _competition(d), _competition(k)
    if np.array_equal(rP, rQ):
        tau = 1.0
    else:
        tau = float(kendalltau(d, k).statistic)
    records = tuple(
        RankRecord(
            label=H.labels[i],
            P_inf=float(d[i] / d.sum()),
            Q_inf=float(k[i] / k.sum()),
            P_norm=float(d[i] / d.max()),
            Q_norm=float(k[i] / k.max()),
            rank_P=int(rP[i]),
            rank_Q=int(rQ[i]),
        )
        for i in range(H.node_count)
    )
    return RankingReport(records=records, tau=tau)
