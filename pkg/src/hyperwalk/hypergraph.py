"""Native hypergraph representation and the matrices built from it.

A :class:`Hypergraph` is the single source of truth: the incidence matrix,
pairwise adjacency, hyperedge overlap matrix, generalized adjacency ``K``,
hyperdegrees ``d`` and the transition matrix ``W`` are all derived from it.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from .errors import IsolatedNodeError, ParseError

__all__ = [
    "Hypergraph",
    "GeneralizedAdjacency",
    "CliqueGraph",
    "parse_hyperedge_list",
    "read_hyperedge_list",
    "format_hyperedge_list",
    "build_generalized_adjacency",
    "build_transition",
    "clique_expansion",
    "largest_connected_component",
    "pairwise_adjacency",
    "hyperedge_matrix",
]


def _frozen(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Node labels plus a multiset of hyperedges over dense node indices.

    Parameters
    ----------
    labels : sequence of str
        ``labels[i]`` is the label of node ``i``. Must be unique.
    hyperedges : sequence of sequence of int
        Each hyperedge is a non-empty collection of distinct node indices.
        Repeated hyperedges are kept (they are distinct members of ``E``).
    """

    labels: tuple
    hyperedges: tuple

    def __init__(self, labels: Sequence[str], hyperedges: Iterable[Iterable[int]]):
        labels = tuple(str(x) for x in labels)
        edges = tuple(tuple(int(v) for v in e) for e in hyperedges)
        n = len(labels)
        if n == 0:
            raise ValueError("a hypergraph needs at least one node")
        if len(set(labels)) != n:
            raise ValueError("node labels must be unique")
        for a, e in enumerate(edges):
            if not e:
                raise ValueError(f"hyperedge {a} is empty")
            if len(set(e)) != len(e):
                raise ValueError(f"hyperedge {a} repeats a node")
            if min(e) < 0 or max(e) >= n:
                raise ValueError(f"hyperedge {a} references a node outside [0, {n})")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "hyperedges", edges)

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def hyperedge_count(self) -> int:
        return len(self.hyperedges)

    @cached_property
    def index(self) -> dict:
        """Mapping label -> node index."""
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def incidence(self) -> np.ndarray:
        """The ``n x m`` 0/1 incidence matrix ``e`` (int64)."""
        e = np.zeros((self.node_count, self.hyperedge_count), dtype=np.int64)
        for a, edge in enumerate(self.hyperedges):
            e[list(edge), a] = 1
        return _frozen(e)

    @property
    def hyperedge_sizes(self) -> np.ndarray:
        return np.array([len(e) for e in self.hyperedges], dtype=np.int64)

    def resolve(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.labels == other.labels and self.hyperedges == other.hyperedges

    def __hash__(self):
        return hash((self.labels, self.hyperedges))

    def __repr__(self):
        return f"Hypergraph(n={self.node_count}, m={self.hyperedge_count})"


@dataclass(frozen=True)
class GeneralizedAdjacency:
    """Generalized adjacency ``K`` (exact integers), hyperdegrees and their sum."""

    K: np.ndarray
    d: np.ndarray
    total_weight: int


@dataclass(frozen=True)
class CliqueGraph:
    """Two-section expansion: simple 0/1 graph with degrees."""

    adjacency: np.ndarray
    degrees: np.ndarray


def parse_hyperedge_list(text: str) -> Hypergraph:
    """Parse the hyperedge-list text format.

    One hyperedge per line, labels separated by whitespace. Blank lines and
    lines starting with ``#`` are skipped. Labels get indices in order of
    first appearance.
    """
    index: dict = {}
    labels: list = []
    edges: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(set(tokens)) != len(tokens):
            dup = next(t for t in tokens if tokens.count(t) > 1)
            raise ParseError(f"duplicate label {dup!r} in hyperedge", line=lineno)
        edge = []
        for tok in tokens:
            if tok not in index:
                index[tok] = len(labels)
                labels.append(tok)
            edge.append(index[tok])
        edges.append(edge)
    if not edges:
        raise ParseError("document contains no hyperedges")
    return Hypergraph(labels, edges)


def read_hyperedge_list(path) -> Hypergraph:
    with open(path, encoding="utf-8") as fh:
        return parse_hyperedge_list(fh.read())


def format_hyperedge_list(H: Hypergraph) -> str:
    """Serialize ``H`` back to the hyperedge-list format."""
    return "".join(" ".join(H.labels[v] for v in e) + "\n" for e in H.hyperedges)


def pairwise_adjacency(H: Hypergraph) -> np.ndarray:
    """``A = e e^T``; ``A_ij`` counts hyperedges shared by ``i`` and ``j``."""
    e = H.incidence
    return e @ e.T


def hyperedge_matrix(H: Hypergraph) -> np.ndarray:
    """``C = e^T e``; ``C_ab`` is the overlap size, ``C_aa`` the hyperedge size."""
    e = H.incidence
    return e.T @ e


def build_generalized_adjacency(H: Hypergraph) -> GeneralizedAdjacency:
    """Sum ``(|E_a| - 1)`` over every hyperedge containing both endpoints.

    Size-1 hyperedges contribute nothing and emit a ``UserWarning``.
    """
    sizes = H.hyperedge_sizes
    singles = int(np.count_nonzero(sizes == 1))
    if singles:
        warnings.warn(
            f"{singles} size-1 hyperedge(s) contribute nothing to the walk",
            UserWarning,
            stacklevel=2,
        )
    e = H.incidence
    K = (e * (sizes - 1)) @ e.T
    np.fill_diagonal(K, 0)
    d = K.sum(axis=1)
    return GeneralizedAdjacency(K=_frozen(K), d=_frozen(d), total_weight=int(d.sum()))


def build_transition(H: Hypergraph, adjacency: GeneralizedAdjacency | None = None) -> np.ndarray:
    """Row-stochastic ``W_ij = K_ij / d_i``.

    Raises
    ------
    IsolatedNodeError
        If any node has zero hyperdegree.
    """
    if adjacency is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            adjacency = build_generalized_adjacency(H)
    zero = np.flatnonzero(adjacency.d == 0)
    if zero.size:
        raise IsolatedNodeError(H.labels[zero[0]])
    W = adjacency.K / adjacency.d[:, None].astype(float)
    return _frozen(W)


def clique_expansion(H: Hypergraph) -> CliqueGraph:
    A = (pairwise_adjacency(H) > 0).astype(np.int64)
    np.fill_diagonal(A, 0)
    return CliqueGraph(adjacency=_frozen(A), degrees=_frozen(A.sum(axis=1)))


def _components(H: Hypergraph) -> np.ndarray:
    A = clique_expansion(H).adjacency
    _, comp = csgraph.connected_components(csr_matrix(A), directed=False)
    return comp


def is_connected(H: Hypergraph) -> bool:
    return bool(np.all(_components(H) == 0))


def largest_connected_component(H: Hypergraph) -> Hypergraph:
    """Sub-hypergraph on the largest component, indices compacted.

    Ties go to the component holding the smallest original node index.
    """
    comp = _components(H)
    counts = np.bincount(comp)
    # connected_components labels components in order of their smallest node,
    # so argmax's first-hit rule is the documented tie-break.
    keep_label = int(np.argmax(counts))
    keep = np.flatnonzero(comp == keep_label)
    remap = {int(old): new for new, old in enumerate(keep)}
    edges = [
        [remap[v] for v in e] for e in H.hyperedges if comp[e[0]] == keep_label
    ]
    return Hypergraph([H.labels[i] for i in keep], edges)
