"""Synthetic hypergraphs and the bundled test instances."""
from __future__ import annotations

from importlib import resources

import numpy as np

from .hypergraph import Hypergraph, parse_hyperedge_list

__all__ = [
    "random_connected_hypergraph",
    "lollipop",
    "cover_instance",
    "bundled_instances",
    "load_instance",
]


def random_connected_hypergraph(n_nodes: int, n_edges: int, seed=None, max_extra: int = 2) -> Hypergraph:
    """Connected hypergraph with exactly ``n_nodes`` nodes and ``n_edges`` hyperedges.

    Hyperedges are added one at a time; each one after the first is anchored
    on an already-present node, which keeps the whole thing connected. New
    nodes are spread over the hyperedges at random, and each hyperedge also
    picks up to ``max_extra`` further existing nodes.
    """
    if n_nodes < 2 or n_edges < 1:
        raise ValueError("need at least 2 nodes and 1 hyperedge")
    rng = np.random.default_rng(seed)
    # first hyperedge needs two fresh nodes; others may have none
    fresh = np.zeros(n_edges, dtype=int)
    fresh[0] = 2
    spare = n_nodes - 2
    if spare:
        fresh += np.bincount(rng.integers(0, n_edges, size=spare), minlength=n_edges)
    edges = []
    count = 0
    for a in range(n_edges):
        members: list = []
        if count:
            extra = int(rng.integers(0, max_extra + 1))
            k = min(count, 1 + extra)
            members.extend(int(v) for v in rng.choice(count, size=k, replace=False))
        members.extend(range(count, count + fresh[a]))
        count += fresh[a]
        if len(members) < 2:
            # anchor plus one more existing node (count >= 2 here)
            pool = [v for v in range(count) if v not in members]
            members.append(int(rng.choice(pool)))
        edges.append(members)
    # relabel so that indices follow first appearance in the text format
    order: dict = {}
    for e in edges:
        for v in e:
            order.setdefault(v, len(order))
    labels = [f"v{k}" for k in range(n_nodes)]
    return Hypergraph(labels, [[order[v] for v in e] for e in edges])


def lollipop(clique_size: int = 6, chain_length: int = 4) -> Hypergraph:
    """One large hyperedge with a path of size-2 hyperedges hanging off its last node."""
    text = " ".join(f"c{k}" for k in range(clique_size)) + "\n"
    prev = f"c{clique_size - 1}"
    for k in range(1, chain_length + 1):
        text += f"{prev} p{k}\n"
        prev = f"p{k}"
    return parse_hyperedge_list(text)


def cover_instance(seed: int = 2024) -> Hypergraph:
    """Synthetic stand-in for the 40-hyperedge, 171-node cover-time experiment."""
    return random_connected_hypergraph(171, 40, seed=seed)


def bundled_instances() -> list[str]:
    files = resources.files("hyperwalk") / "data"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".txt"))


def load_instance(name: str) -> Hypergraph:
    path = resources.files("hyperwalk") / "data" / f"{name}.txt"
    return parse_hyperedge_list(path.read_text(encoding="utf-8"))
