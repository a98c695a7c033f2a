"""Weighted-graph data model, bipartite projection, and structural utilities.

Nodes carry stable integer indices assigned in lexicographic id order, so
every downstream result is independent of input ordering.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from ._util import format_weight
from .errors import MissingEdgeError, ParameterError, ParseError, UnknownNodeError


@dataclass(frozen=True)
class NodeStats:
    """Degree and strength (sum of incident weights) of one node."""

    degree: int
    strength: float


class WeightedGraph:
    """Undirected weighted graph without self-loops or parallel edges.

    Each edge is stored once with src index < dst index; edges are kept
    sorted by (src, dst). Immutable after construction.
    """

    __slots__ = ("ids", "src", "dst", "weights", "_index", "_csr", "_adj_sets", "_fp")

    def __init__(self, ids, src, dst, weights):
        ids = tuple(ids)
        if sorted(ids) != list(ids):
            raise ParameterError("node ids must be given in sorted order")
        if len(set(ids)) != len(ids):
            raise ParameterError("duplicate node ids")
        n = len(ids)

        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        if not (src.shape == dst.shape == weights.shape):
            raise ParameterError("edge arrays must have equal length")
        if src.size:
            if src.min(initial=0) < 0 or max(src.max(initial=0), dst.max(initial=0)) >= n:
                raise ParameterError("edge endpoint out of range")
            if np.any(src == dst):
                raise ParameterError("self-loops are not allowed")
            if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
                raise ParameterError("edge weights must be positive and finite")
            lo = np.minimum(src, dst)
            hi = np.maximum(src, dst)
            order = np.lexsort((hi, lo))
            src, dst, weights = lo[order], hi[order], weights[order]
            if np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
                raise ParameterError("duplicate edges")

        self.ids = ids
        self.src = src
        self.dst = dst
        self.weights = weights
        self._index = {label: i for i, label in enumerate(ids)}
        self._csr = None
        self._adj_sets = None
        self._fp = None

    @classmethod
    def from_edges(cls, edges, nodes=None):
        """Build from (id_a, id_b, weight) triples; extra ids add isolated nodes."""
        edges = list(edges)
        labels = set(nodes) if nodes is not None else set()
        for a, b, _ in edges:
            labels.add(a)
            labels.add(b)
        ids = sorted(labels)
        index = {label: i for i, label in enumerate(ids)}
        src = [index[a] for a, _, _ in edges]
        dst = [index[b] for _, b, _ in edges]
        w = [float(w) for _, _, w in edges]
        return cls(ids, src, dst, w)

    # -- basic accessors ---------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    def index_of(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownNodeError(f"unknown node {label!r}") from None

    def __contains__(self, label) -> bool:
        return label in self._index

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric CSR adjacency with weights (cached)."""
        if self._csr is None:
            n = self.n_nodes
            row = np.concatenate([self.src, self.dst])
            col = np.concatenate([self.dst, self.src])
            data = np.concatenate([self.weights, self.weights])
            self._csr = sp.csr_matrix((data, (row, col)), shape=(n, n))
        return self._csr

    def adj_sets(self):
        """Neighbor index sets per node (cached); handy for triangle counting."""
        if self._adj_sets is None:
            sets = [set() for _ in range(self.n_nodes)]
            for u, v in zip(self.src.tolist(), self.dst.tolist()):
                sets[u].add(v)
                sets[v].add(u)
            self._adj_sets = sets
        return self._adj_sets

    def degrees(self) -> np.ndarray:
        n = self.n_nodes
        deg = np.zeros(n, dtype=np.int64)
        np.add.at(deg, self.src, 1)
        np.add.at(deg, self.dst, 1)
        return deg

    def strengths(self) -> np.ndarray:
        n = self.n_nodes
        s = np.zeros(n, dtype=np.float64)
        np.add.at(s, self.src, self.weights)
        np.add.at(s, self.dst, self.weights)
        return s

    def has_edge(self, a, b) -> bool:
        i, j = self.index_of(a), self.index_of(b)
        return j in self.adj_sets()[i]

    def weight_of(self, a, b) -> float:
        i, j = self.index_of(a), self.index_of(b)
        if i > j:
            i, j = j, i
        pos = np.searchsorted(self.src, i)
        while pos < self.src.size and self.src[pos] == i:
            if self.dst[pos] == j:
                return float(self.weights[pos])
            pos += 1
        raise MissingEdgeError(f"no edge between {a!r} and {b!r}")

    def edges_as_labels(self):
        """Edges as (id_a, id_b, weight) triples in canonical order."""
        return [
            (self.ids[u], self.ids[v], float(w))
            for u, v, w in zip(self.src.tolist(), self.dst.tolist(), self.weights.tolist())
        ]

    # -- structure ----------------------------------------------------------

    def subgraph(self, keep) -> "WeightedGraph":
        """Induced subgraph on the given node indices (original ids retained)."""
        keep = np.unique(np.asarray(keep, dtype=np.int64))
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[keep] = True
        emask = mask[self.src] & mask[self.dst]
        remap = np.full(self.n_nodes, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        ids = [self.ids[i] for i in keep.tolist()]
        return WeightedGraph(ids, remap[self.src[emask]], remap[self.dst[emask]], self.weights[emask])

    def component_labels(self) -> np.ndarray:
        if self.n_nodes == 0:
            return np.zeros(0, dtype=np.int64)
        _, labels = csgraph.connected_components(self.adjacency(), directed=False)
        return labels.astype(np.int64)

    def is_connected(self) -> bool:
        if self.n_nodes == 0:
            return False
        return int(self.component_labels().max()) == 0

    def fingerprint(self) -> str:
        """Content hash over node ids and canonical edge list."""
        if self._fp is None:
            h = hashlib.sha256()
            for label in self.ids:
                h.update(label.encode("utf-8"))
                h.update(b"\x00")
            h.update(b"\x01")
            for u, v, w in zip(self.src.tolist(), self.dst.tolist(), self.weights.tolist()):
                h.update(f"{u} {v} {format_weight(w)}\n".encode("ascii"))
            self._fp = h.hexdigest()
        return self._fp

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.ids == other.ids
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash(self.fingerprint())

    def __repr__(self):
        return f"WeightedGraph(nodes={self.n_nodes}, edges={self.n_edges})"


def project(bg) -> WeightedGraph:
    """Project a bipartite actor/forum graph onto forums.

    The weight of (i, j) is the number of actors active in both forums.
    The diagonal is dropped; forums with no co-participation stay isolated.
    """
    if bg.n_actors == 0 or bg.n_forums == 0:
        raise ParameterError("cannot project an empty bipartite graph")
    x = bg.incidence.astype(np.int64)
    y = (x.T @ x).tocoo()
    upper = y.row < y.col
    return WeightedGraph(
        bg.forums,
        y.row[upper].astype(np.int64),
        y.col[upper].astype(np.int64),
        y.data[upper].astype(np.float64),
    )


def largest_component(g: WeightedGraph) -> WeightedGraph:
    """Induced subgraph of the largest connected node set.

    Size ties go to the component containing the lexicographically smallest
    node id. The empty graph maps to itself.
    """
    if g.n_nodes == 0:
        return g
    labels = g.component_labels()
    sizes = np.bincount(labels)
    best_labels = np.flatnonzero(sizes == sizes.max())
    # First node (smallest index, hence smallest id) that lies in a max-size component.
    first = int(np.flatnonzero(np.isin(labels, best_labels))[0])
    return g.subgraph(np.flatnonzero(labels == labels[first]))


def node_stats(g: WeightedGraph, node) -> NodeStats:
    """Degree and strength for one node; unknown ids raise a lookup error."""
    i = g.index_of(node)
    return NodeStats(degree=int(g.degrees()[i]), strength=float(g.strengths()[i]))


def save_edgelist(g: WeightedGraph, path) -> Path:
    """Write `id_a \\t id_b \\t weight` rows in canonical edge order.

    Isolated nodes are not representable in this format and are dropped on
    reload; the pipeline only persists graphs where that is harmless.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b, w in g.edges_as_labels():
            fh.write(f"{a}\t{b}\t{format_weight(w)}\n")
    return path


def load_edgelist(path) -> WeightedGraph:
    """Read an edge-list TSV written by save_edgelist."""
    path = Path(path)
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError("expected 3 tab-separated fields", path=str(path), line=lineno)
            a, b, wtext = parts
            if not a or not b:
                raise ParseError("empty node id", path=str(path), line=lineno)
            try:
                w = float(wtext)
            except ValueError:
                raise ParseError(f"bad weight {wtext!r}", path=str(path), line=lineno) from None
            edges.append((a, b, w))
    return WeightedGraph.from_edges(edges)
