"""Disparity-filter backbone extraction and the alpha-sweep driver.

Each directed edge (i, j) gets a significance score against a null model in
which node i's strength is split uniformly at random among its k_i edges:

    alpha_ij = (1 - p_ij) ** (k_i - 1),   p_ij = w_ij / s_i

An undirected edge survives cutoff `alpha` only when significant from both
endpoints; the surviving weight is the average of the two normalized
directed weights. Endpoints with k = 1 get alpha_ij = 1, so leaves can
never certify an edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import derive_seed, parallel_map
from .errors import ParameterError
from .graphcore import WeightedGraph, largest_component


@dataclass(frozen=True)
class EdgeSignificance:
    """Normalized weight and null-model significance from one endpoint."""

    p_ij: float
    alpha_ij: float


@dataclass(frozen=True)
class BackboneGraph:
    """Significance-filtered graph with averaged normalized weights."""

    graph: WeightedGraph
    alpha_cutoff: float
    source_fingerprint: str


def significance_score(p: float, k: int) -> float:
    """Closed-form alpha for one directed edge; k = 1 is defined as 1."""
    if k < 2:
        return 1.0
    return (1.0 - p) ** (k - 1)


def edge_significance(g: WeightedGraph, i, j) -> EdgeSignificance:
    """Significance of edge (i, j) from i's perspective.

    Missing nodes or edges raise lookup errors.
    """
    w = g.weight_of(i, j)
    idx = g.index_of(i)
    k = int(g.degrees()[idx])
    s = float(g.strengths()[idx])
    p = w / s
    return EdgeSignificance(p_ij=p, alpha_ij=significance_score(p, k))


def extract_backbone(g: WeightedGraph, alpha: float) -> BackboneGraph:
    """Keep edges significant at level `alpha` from both endpoints.

    Retained weight is (p_ij + p_ji) / 2; nodes left without any retained
    edge are dropped. Comparison against the cutoff is strict.
    """
    if not (0.0 < alpha < 1.0) or math.isnan(alpha):
        raise ParameterError(f"alpha must be in (0, 1), got {alpha!r}")
    deg = g.degrees()
    strength = g.strengths()

    src, dst, w = g.src, g.dst, g.weights
    if src.size == 0:
        empty = WeightedGraph((), [], [], [])
        return BackboneGraph(empty, alpha, g.fingerprint())

    p_fwd = w / strength[src]
    p_bwd = w / strength[dst]
    k_src = deg[src]
    k_dst = deg[dst]
    a_fwd = np.where(k_src >= 2, (1.0 - p_fwd) ** np.maximum(k_src - 1, 1), 1.0)
    a_bwd = np.where(k_dst >= 2, (1.0 - p_bwd) ** np.maximum(k_dst - 1, 1), 1.0)
    keep = (a_fwd < alpha) & (a_bwd < alpha)

    kept_src = src[keep]
    kept_dst = dst[keep]
    kept_w = (p_fwd[keep] + p_bwd[keep]) / 2.0
    used = np.union1d(kept_src, kept_dst)
    remap = np.full(g.n_nodes, -1, dtype=np.int64)
    remap[used] = np.arange(used.size)
    ids = [g.ids[i] for i in used.tolist()]
    graph = WeightedGraph(ids, remap[kept_src], remap[kept_dst], kept_w)
    return BackboneGraph(graph, alpha, g.fingerprint())


@dataclass(frozen=True)
class SweepRow:
    """Statistics of the backbone extracted at one alpha cutoff."""

    alpha: float
    nodes: int
    edges: int
    lcc_nodes: int
    clustering: float
    clustering_er_mean: float
    clustering_er_sd: float
    path_length: float
    path_length_er_mean: float
    path_length_er_sd: float
    communities: int
    modularity: float
    r_squared: float


@dataclass(frozen=True)
class SweepResult:
    """Per-alpha backbone statistics plus matched ER baselines."""

    rows: tuple[SweepRow, ...]

    CSV_HEADER = "alpha,nodes,edges,lcc_nodes,C,C_er_mean,C_er_sd,L,L_er_mean,L_er_sd,communities,Q,r2"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                ",".join(
                    [
                        repr(float(r.alpha)),
                        str(r.nodes),
                        str(r.edges),
                        str(r.lcc_nodes),
                        repr(float(r.clustering)),
                        repr(float(r.clustering_er_mean)),
                        repr(float(r.clustering_er_sd)),
                        repr(float(r.path_length)),
                        repr(float(r.path_length_er_mean)),
                        repr(float(r.path_length_er_sd)),
                        str(r.communities),
                        repr(float(r.modularity)),
                        repr(float(r.r_squared)),
                    ]
                )
            )
        return "\n".join(lines) + "\n"


def default_alpha_grid(points_per_decade: int = 5, lo: float = 1e-4, hi: float = 1.0) -> list[float]:
    """Logarithmic alpha grid; values at or above 1 are clamped to 0.999999
    because the cutoff must stay inside (0, 1)."""
    if points_per_decade < 1 or not (0 < lo <= hi):
        raise ParameterError("invalid alpha grid parameters")
    lo_e, hi_e = math.log10(lo), math.log10(hi)
    n = int(round((hi_e - lo_e) * points_per_decade)) + 1
    vals = [10.0 ** (lo_e + i * (hi_e - lo_e) / (n - 1)) if n > 1 else lo for i in range(n)]
    vals = [min(v, 0.999999) for v in vals]
    out: list[float] = []
    for v in vals:
        if not out or v > out[-1]:
            out.append(v)
    return out


def _sweep_row(g, alpha, replicates, seed, k_min, resolution) -> SweepRow:
    # Imported here to keep module import order acyclic.
    from .community import louvain
    from .errors import FitError, StatisticError
    from .metrics import avg_shortest_path, clustering, er_random, power_law_fit

    alpha_key = repr(float(alpha))
    bb = extract_backbone(g, alpha)
    lcc = largest_component(bb.graph)

    nan = float("nan")
    c = l = q = r2 = nan
    n_comm = 0
    if lcc.n_nodes >= 2:
        c = clustering(lcc)
        l = avg_shortest_path(lcc)
        part = louvain(lcc, seed=derive_seed(seed, "louvain", alpha_key), resolution=resolution)
        n_comm = part.community_count
        q = part.q
        try:
            r2 = power_law_fit(lcc, k_min=k_min).r_squared
        except FitError:
            pass
    elif lcc.n_nodes == 1:
        n_comm = 1
        q = 0.0

    c_samples: list[float] = []
    l_samples: list[float] = []
    if lcc.n_nodes >= 2:
        for rep in range(replicates):
            er = er_random(lcc.n_nodes, lcc.n_edges, derive_seed(seed, "er", alpha_key, rep))
            try:
                c_samples.append(clustering(er))
            except StatisticError:
                continue
            er_lcc = largest_component(er)
            if er_lcc.n_nodes >= 2:
                l_samples.append(avg_shortest_path(er_lcc))

    def _mean_sd(xs):
        if not xs:
            return nan, nan
        arr = np.asarray(xs, dtype=float)
        return float(arr.mean()), float(arr.std())

    c_mean, c_sd = _mean_sd(c_samples)
    l_mean, l_sd = _mean_sd(l_samples)
    return SweepRow(
        alpha=float(alpha),
        nodes=bb.graph.n_nodes,
        edges=bb.graph.n_edges,
        lcc_nodes=lcc.n_nodes,
        clustering=c,
        clustering_er_mean=c_mean,
        clustering_er_sd=c_sd,
        path_length=l,
        path_length_er_mean=l_mean,
        path_length_er_sd=l_sd,
        communities=n_comm,
        modularity=q,
        r_squared=r2,
    )


def sweep(
    g: WeightedGraph,
    alphas,
    replicates: int = 30,
    seed: int = 42,
    *,
    k_min: int = 50,
    resolution: float = 1.0,
    threads: int = 1,
) -> SweepResult:
    """Extract the backbone at each alpha and measure it.

    For every cutoff: retained node/edge counts, LCC size, clustering,
    mean shortest path, Louvain community count and modularity, power-law
    fit quality, plus mean and SD of clustering and path length over
    `replicates` Erdos-Renyi graphs matched on the LCC's node and edge
    counts. Statistics that are undefined on a degenerate backbone are
    reported as NaN. ER and Louvain seeds are derived from (seed, alpha),
    so a single-alpha sweep reproduces the matching row of a full sweep.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ParameterError("alphas must be non-empty")
    for a in alphas:
        if not (0.0 < a < 1.0):
            raise ParameterError(f"alpha must be in (0, 1), got {a!r}")
    if len(set(alphas)) != len(alphas):
        raise ParameterError("alphas must be distinct")
    if replicates < 1:
        raise ParameterError("replicates must be >= 1")
    alphas = sorted(alphas)
    rows = parallel_map(
        lambda a: _sweep_row(g, a, replicates, seed, k_min, resolution),
        alphas,
        threads=threads,
    )
    return SweepResult(rows=tuple(rows))
