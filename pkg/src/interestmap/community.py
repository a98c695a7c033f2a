"""Louvain modularity optimization over the backbone graph.

Weighted by default (the pipeline runs detection on backbone weights);
`use_weights=False` is available for sensitivity checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import InputError, ParameterError
from .graphcore import WeightedGraph

#: A Louvain level must improve modularity by more than this to continue.
GAIN_THRESHOLD = 1e-7


@dataclass(frozen=True)
class CommunityAssignment:
    """Node to meta-community labeling with its modularity.

    Community ids are dense integers from 0 assigned by decreasing
    community size, so community 0 is always the largest. `q_history`
    records modularity on the original graph after each Louvain level.
    """

    labels: dict[str, int]
    q: float
    passes: int
    q_history: tuple[float, ...] = field(default=())
    seed: int = 0

    @property
    def community_count(self) -> int:
        return len(set(self.labels.values())) if self.labels else 0

    def members(self, community: int) -> list[str]:
        return sorted(node for node, c in self.labels.items() if c == community)

    def sizes(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.labels.values():
            out[c] = out.get(c, 0) + 1
        return out

    def to_csv(self) -> str:
        lines = ["forum,community"]
        for node in sorted(self.labels):
            lines.append(f"{node},{self.labels[node]}")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "q": self.q,
            "communities": self.community_count,
            "passes": self.passes,
            "seed": self.seed,
        }


def _modularity_from_arrays(g: WeightedGraph, labels: np.ndarray, use_weights: bool) -> float:
    w = g.weights if use_weights else np.ones(g.n_edges)
    total = float(w.sum())
    if total == 0.0:
        return 0.0
    _, compact = np.unique(labels, return_inverse=True)
    n_comm = int(compact.max()) + 1

    intra = compact[g.src] == compact[g.dst]
    d = np.zeros(n_comm)
    np.add.at(d, compact[g.src[intra]], 2.0 * w[intra])

    k = g.strengths() if use_weights else g.degrees().astype(np.float64)
    ktot = np.zeros(n_comm)
    np.add.at(ktot, compact, k)

    two_w = 2.0 * total
    return float(np.sum(d / two_w - (ktot / two_w) ** 2))


def modularity(g: WeightedGraph, labels: Mapping[str, int], *, use_weights: bool = True) -> float:
    """Weighted modularity of a total labeling.

    Q = sum over communities of [intra/(2W) - (total/(2W))^2]; an edgeless
    graph yields 0 under the 0/0 -> 0 convention. Partial labelings raise
    InputError.
    """
    missing = [node for node in g.ids if node not in labels]
    if missing:
        shown = ", ".join(repr(x) for x in missing[:5])
        raise InputError(f"{len(missing)} nodes without a community label (e.g. {shown})")
    if g.n_nodes == 0:
        return 0.0
    arr = np.fromiter((labels[node] for node in g.ids), dtype=np.int64, count=g.n_nodes)
    return _modularity_from_arrays(g, arr, use_weights)


def _local_move(adj: list[dict[int, float]], rng: random.Random, resolution: float):
    """One Louvain local-move phase; returns (community per node, move count).

    A node moves to the neighboring community with the highest insertion
    gain; exact ties among improving candidates go to the lowest community
    id, and a node stays put unless some candidate is strictly better.
    """
    nn = len(adj)
    k = [sum(d.values()) + d.get(v, 0.0) for v, d in enumerate(adj)]
    two_w = sum(k)
    com = list(range(nn))
    if two_w == 0.0:
        return com, 0
    sigma_tot = k.copy()

    order = list(range(nn))
    rng.shuffle(order)
    total_moves = 0
    improved = True
    while improved:
        improved = False
        for v in order:
            kv = k[v]
            if kv == 0.0:
                continue
            cv = com[v]
            links: dict[int, float] = {}
            for u, w in adj[v].items():
                if u != v:
                    cu = com[u]
                    links[cu] = links.get(cu, 0.0) + w

            sigma_tot[cv] -= kv
            stay_gain = links.get(cv, 0.0) - resolution * sigma_tot[cv] * kv / two_w
            best_c, best_gain = cv, stay_gain
            for c in sorted(links):
                if c == cv:
                    continue
                gain = links[c] - resolution * sigma_tot[c] * kv / two_w
                if gain > best_gain:
                    best_c, best_gain = c, gain
            sigma_tot[best_c] += kv
            if best_c != cv:
                com[v] = best_c
                total_moves += 1
                improved = True
    return com, total_moves


def _aggregate(adj: list[dict[int, float]], com: list[int]):
    """Collapse communities into super-nodes; intra weight becomes a self-loop."""
    comms = sorted(set(com))
    remap = {c: i for i, c in enumerate(comms)}
    new_adj: list[dict[int, float]] = [dict() for _ in comms]
    for v, d in enumerate(adj):
        cv = remap[com[v]]
        for u, w in d.items():
            if u == v:
                new_adj[cv][cv] = new_adj[cv].get(cv, 0.0) + w
            elif v < u:
                cu = remap[com[u]]
                if cu == cv:
                    new_adj[cv][cv] = new_adj[cv].get(cv, 0.0) + w
                else:
                    new_adj[cv][cu] = new_adj[cv].get(cu, 0.0) + w
                    new_adj[cu][cv] = new_adj[cu].get(cv, 0.0) + w
    mapping = np.fromiter((remap[c] for c in com), dtype=np.int64, count=len(com))
    return new_adj, mapping


def louvain(
    g: WeightedGraph,
    seed: int = 42,
    resolution: float = 1.0,
    *,
    use_weights: bool = True,
) -> CommunityAssignment:
    """Two-phase Louvain: seed-shuffled local moves, then aggregation,
    repeated until a level improves modularity by no more than 1e-7.

    The reported Q is recomputed for the final partition on the original
    graph and matches `modularity(g, labels)` exactly.
    """
    if g.n_nodes == 0:
        raise ParameterError("louvain needs a non-empty graph")
    if resolution <= 0:
        raise ParameterError("resolution must be positive")

    n = g.n_nodes
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    weights = g.weights if use_weights else np.ones(g.n_edges)
    for u, v, w in zip(g.src.tolist(), g.dst.tolist(), weights.tolist()):
        adj[u][v] = adj[u].get(v, 0.0) + w
        adj[v][u] = adj[v].get(u, 0.0) + w

    rng = random.Random(seed)
    orig_to_level = np.arange(n, dtype=np.int64)
    passes = 0
    q_history: list[float] = []

    while True:
        com, moved = _local_move(adj, rng, resolution)
        passes += 1
        com_arr = np.asarray(com, dtype=np.int64)
        flat = com_arr[orig_to_level]
        q = _modularity_from_arrays(g, flat, use_weights)
        q_history.append(q)
        if moved == 0:
            break
        if len(q_history) >= 2 and q - q_history[-2] <= GAIN_THRESHOLD:
            break
        # Any successful move creates a community of >= 2 members, so
        # aggregation strictly shrinks the level graph and the loop ends.
        adj, mapping = _aggregate(adj, com)
        orig_to_level = mapping[orig_to_level]

    # Relabel by decreasing size; ties by the smallest member node index.
    final = flat
    groups: dict[int, list[int]] = {}
    for idx, c in enumerate(final.tolist()):
        groups.setdefault(c, []).append(idx)
    ordered = sorted(groups.values(), key=lambda members: (-len(members), members[0]))
    labels: dict[str, int] = {}
    for new_id, members in enumerate(ordered):
        for idx in members:
            labels[g.ids[idx]] = new_id

    q_final = modularity(g, labels, use_weights=use_weights)
    return CommunityAssignment(
        labels=labels,
        q=q_final,
        passes=passes,
        q_history=tuple(q_history),
        seed=seed,
    )
