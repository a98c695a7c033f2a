"""Assemble the interest map: layout, community coloring, PageRank sizing,
same-community recommendations, and JSON / GEXF export."""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from ._util import format_weight
from .errors import InputError, ParameterError, ParseError, UnknownNodeError
from .graphcore import WeightedGraph, largest_component


@dataclass(frozen=True)
class MapNode:
    id: str
    label: str
    community: int
    pagerank: float
    x: float
    y: float
    degree: int


@dataclass(frozen=True)
class MapEdge:
    source: str
    target: str
    weight: float


class InterestMap:
    """The served artifact: positioned, ranked, community-labeled nodes.

    Immutable; node ids are unique, every edge endpoint exists, PageRank
    scores sum to 1 within 1e-6, and all coordinates are finite.
    """

    __slots__ = ("nodes", "edges", "alpha", "q", "communities", "built_at", "source", "_by_id", "_nbrs")

    def __init__(self, nodes, edges, *, alpha, q, communities, built_at, source):
        nodes = tuple(nodes)
        edges = tuple(edges)
        by_id = {n.id: n for n in nodes}
        if len(by_id) != len(nodes):
            raise InputError("duplicate node ids in map")
        for e in edges:
            if e.source not in by_id or e.target not in by_id:
                raise InputError(f"edge {e.source!r} -> {e.target!r} references a missing node")
        total_rank = sum(n.pagerank for n in nodes)
        if nodes and abs(total_rank - 1.0) > 1e-6:
            raise InputError(f"pagerank scores sum to {total_rank!r}, expected 1")
        for n in nodes:
            if not (math.isfinite(n.x) and math.isfinite(n.y)):
                raise InputError(f"non-finite coordinates on node {n.id!r}")
        self.nodes = nodes
        self.edges = edges
        self.alpha = float(alpha)
        self.q = float(q)
        self.communities = int(communities)
        self.built_at = str(built_at)
        self.source = str(source)
        self._by_id = by_id
        self._nbrs = None

    def __contains__(self, node_id) -> bool:
        return node_id in self._by_id

    def node(self, node_id) -> MapNode:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown forum {node_id!r}") from None

    def neighbors(self, node_id) -> frozenset:
        if self._nbrs is None:
            nbrs: dict[str, set[str]] = {n.id: set() for n in self.nodes}
            for e in self.edges:
                nbrs[e.source].add(e.target)
                nbrs[e.target].add(e.source)
            self._nbrs = {k: frozenset(v) for k, v in nbrs.items()}
        if node_id not in self._nbrs:
            raise UnknownNodeError(f"unknown forum {node_id!r}")
        return self._nbrs[node_id]

    def community_members(self, community: int) -> list[MapNode]:
        return [n for n in self.nodes if n.community == community]

    def __eq__(self, other):
        if not isinstance(other, InterestMap):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and (self.alpha, self.q, self.communities, self.built_at, self.source)
            == (other.alpha, other.q, other.communities, other.built_at, other.source)
        )

    def __repr__(self):
        return f"InterestMap(nodes={len(self.nodes)}, edges={len(self.edges)}, communities={self.communities})"


@dataclass(frozen=True)
class Recommendation:
    forum: str
    score: float
    relation: str  # "neighbor" or "same-community"


def layout(g: WeightedGraph, seed: int = 42, iterations: int = 500) -> dict[str, tuple[float, float]]:
    """Force-directed (spring/repulsion) positions with linear cooling.

    Deterministic for a fixed seed; a single node sits at the origin. The
    natural spring length is sqrt(1/n), so returned coordinates live on a
    unit-area scale (normalize before display).
    """
    n = g.n_nodes
    if n == 0:
        raise ParameterError("cannot lay out an empty graph")
    if n == 1:
        return {g.ids[0]: (0.0, 0.0)}
    if iterations < 1:
        raise ParameterError("iterations must be >= 1")

    rng = np.random.default_rng(seed)
    pos = rng.random((n, 2))
    k = math.sqrt(1.0 / n)
    if g.n_edges:
        w_norm = g.weights / g.weights.mean()
    src, dst = g.src, g.dst

    t0 = 0.1
    for step in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta**2).sum(axis=2))
        np.fill_diagonal(dist, 1.0)
        dist = np.maximum(dist, 1e-9)
        # Repulsion k^2/d between all pairs.
        force = (k * k) / (dist * dist)
        np.fill_diagonal(force, 0.0)
        disp = (delta * force[:, :, None]).sum(axis=1)
        # Attraction d^2/k along edges, scaled by normalized weight.
        if g.n_edges:
            evec = pos[src] - pos[dst]
            edist = np.maximum(np.sqrt((evec**2).sum(axis=1)), 1e-9)
            pull = (edist / k) * w_norm
            contrib = evec * pull[:, None]
            np.add.at(disp, src, -contrib)
            np.add.at(disp, dst, contrib)
        length = np.maximum(np.sqrt((disp**2).sum(axis=1)), 1e-9)
        temperature = t0 * (1.0 - step / iterations)
        pos += disp / length[:, None] * np.minimum(length, temperature)[:, None]
    return {g.ids[i]: (float(pos[i, 0]), float(pos[i, 1])) for i in range(n)}


def _normalize_positions(pos: dict[str, tuple[float, float]]) -> dict[str, tuple[float, float]]:
    """Min-max scale each axis into [-1, 1]; degenerate spans collapse to 0."""
    xs = np.array([p[0] for p in pos.values()])
    ys = np.array([p[1] for p in pos.values()])

    def scale(vals):
        span = vals.max() - vals.min()
        if span == 0:
            return np.zeros_like(vals)
        return (vals - vals.min()) / span * 2.0 - 1.0

    sx, sy = scale(xs), scale(ys)
    return {node: (float(sx[i]), float(sy[i])) for i, node in enumerate(pos)}


def build_map(
    backbone,
    communities,
    ranks,
    layout_seed: int = 42,
    *,
    iterations: int = 500,
    built_at: str | None = None,
) -> InterestMap:
    """Assemble the map over the backbone's largest connected component.

    `communities` and `ranks` must cover exactly the LCC's nodes, usually
    by running louvain and pagerank on largest_component(backbone.graph).
    Coordinates are normalized to [-1, 1]^2. Deterministic for fixed seeds
    when `built_at` is pinned (defaults to the current UTC time).
    """
    lcc = largest_component(backbone.graph)
    lcc_ids = set(lcc.ids)
    missing_c = sorted(lcc_ids - set(communities.labels))
    missing_r = sorted(lcc_ids - set(ranks))
    extra = sorted((set(communities.labels) | set(ranks)) - lcc_ids)
    if missing_c or missing_r or extra:
        parts = []
        if missing_c:
            parts.append(f"nodes without community: {missing_c[:5]}")
        if missing_r:
            parts.append(f"nodes without rank: {missing_r[:5]}")
        if extra:
            parts.append(f"labels outside the LCC: {extra[:5]}")
        raise InputError("communities and ranks must cover exactly the LCC; " + "; ".join(parts))

    pos = _normalize_positions(layout(lcc, seed=layout_seed, iterations=iterations))
    degrees = lcc.degrees()
    nodes = [
        MapNode(
            id=node,
            label=node,
            community=int(communities.labels[node]),
            pagerank=float(ranks[node]),
            x=pos[node][0],
            y=pos[node][1],
            degree=int(degrees[i]),
        )
        for i, node in enumerate(lcc.ids)
    ]
    edges = [MapEdge(a, b, w) for a, b, w in lcc.edges_as_labels()]
    if built_at is None:
        built_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return InterestMap(
        nodes,
        edges,
        alpha=backbone.alpha_cutoff,
        q=communities.q,
        communities=communities.community_count,
        built_at=built_at,
        source=backbone.source_fingerprint,
    )


def recommend(interest_map: InterestMap, forum: str, limit: int = 10) -> list[Recommendation]:
    """Up to `limit` forums from the query's meta-community, by PageRank.

    Direct neighbors are flagged "neighbor", the rest "same-community";
    the query forum itself is never returned. Ties break on forum id.
    """
    if limit < 0:
        raise ParameterError("limit must be >= 0")
    query = interest_map.node(forum)
    nbrs = interest_map.neighbors(forum)
    candidates = [
        n for n in interest_map.community_members(query.community) if n.id != forum
    ]
    candidates.sort(key=lambda n: (-n.pagerank, n.id))
    return [
        Recommendation(
            forum=n.id,
            score=n.pagerank,
            relation="neighbor" if n.id in nbrs else "same-community",
        )
        for n in candidates[:limit]
    ]


# -- serialization ----------------------------------------------------------

GEXF_NS = "http://www.gexf.net/1.2draft"


def map_to_dict(interest_map: InterestMap) -> dict:
    """Plain-dict form of the map, with stable key order."""
    return {
        "meta": {
            "alpha": interest_map.alpha,
            "q": interest_map.q,
            "communities": interest_map.communities,
            "built_at": interest_map.built_at,
            "source": interest_map.source,
        },
        "nodes": [
            {
                "id": n.id,
                "label": n.label,
                "community": n.community,
                "pagerank": n.pagerank,
                "x": n.x,
                "y": n.y,
                "degree": n.degree,
            }
            for n in interest_map.nodes
        ],
        "edges": [
            {"source": e.source, "target": e.target, "weight": e.weight}
            for e in interest_map.edges
        ],
    }


def _map_to_gexf(interest_map: InterestMap) -> bytes:
    ET.register_namespace("", GEXF_NS)
    root = ET.Element(f"{{{GEXF_NS}}}gexf", {"version": "1.2"})
    graph = ET.SubElement(root, f"{{{GEXF_NS}}}graph", {"defaultedgetype": "undirected"})
    attrs = ET.SubElement(graph, f"{{{GEXF_NS}}}attributes", {"class": "node"})
    for attr_id, title, atype in (
        ("0", "community", "integer"),
        ("1", "pagerank", "double"),
        ("2", "x", "double"),
        ("3", "y", "double"),
    ):
        ET.SubElement(attrs, f"{{{GEXF_NS}}}attribute", {"id": attr_id, "title": title, "type": atype})
    nodes_el = ET.SubElement(graph, f"{{{GEXF_NS}}}nodes")
    for n in interest_map.nodes:
        node_el = ET.SubElement(nodes_el, f"{{{GEXF_NS}}}node", {"id": n.id, "label": n.label})
        values = ET.SubElement(node_el, f"{{{GEXF_NS}}}attvalues")
        for attr_id, value in (
            ("0", str(n.community)),
            ("1", repr(n.pagerank)),
            ("2", repr(n.x)),
            ("3", repr(n.y)),
        ):
            ET.SubElement(values, f"{{{GEXF_NS}}}attvalue", {"for": attr_id, "value": value})
    edges_el = ET.SubElement(graph, f"{{{GEXF_NS}}}edges")
    for i, e in enumerate(interest_map.edges):
        ET.SubElement(
            edges_el,
            f"{{{GEXF_NS}}}edge",
            {"id": str(i), "source": e.source, "target": e.target, "weight": format_weight(e.weight)},
        )
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def export_map(interest_map: InterestMap, format: str = "json") -> bytes:
    """Serialize to JSON (the explorer's wire format) or GEXF 1.2 XML."""
    if format == "json":
        return (json.dumps(map_to_dict(interest_map), ensure_ascii=False) + "\n").encode("utf-8")
    if format == "gexf":
        return _map_to_gexf(interest_map)
    raise ParameterError(f"unknown export format {format!r} (expected 'json' or 'gexf')")


def import_map(data: bytes | str) -> InterestMap:
    """Parse map JSON produced by export_map; schema violations raise ParseError."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid map JSON: {exc.msg}") from None
    try:
        meta = obj["meta"]
        nodes = [
            MapNode(
                id=str(n["id"]),
                label=str(n["label"]),
                community=int(n["community"]),
                pagerank=float(n["pagerank"]),
                x=float(n["x"]),
                y=float(n["y"]),
                degree=int(n["degree"]),
            )
            for n in obj["nodes"]
        ]
        edges = [
            MapEdge(source=str(e["source"]), target=str(e["target"]), weight=float(e["weight"]))
            for e in obj["edges"]
        ]
        return InterestMap(
            nodes,
            edges,
            alpha=float(meta["alpha"]),
            q=float(meta["q"]),
            communities=int(meta["communities"]),
            built_at=str(meta.get("built_at", "")),
            source=str(meta.get("source", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"map JSON does not match the schema: {exc!r}") from None
