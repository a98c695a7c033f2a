"""Network statistics: weighted PageRank, clustering, shortest paths,
Erdos-Renyi null models, small-worldness, and power-law degree fits.

Clustering and path length ignore edge weights (both are hop-based);
weights feed only PageRank and modularity.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np
from scipy.sparse import csgraph

from ._util import derive_seed, parallel_map
from .errors import (
    ConnectivityError,
    ConvergenceError,
    FitError,
    ParameterError,
    StatisticError,
)
from .graphcore import WeightedGraph, largest_component

#: Above this many nodes, path length is estimated from sampled sources.
EXACT_PATH_LIMIT = 10_000
PATH_SAMPLE_SOURCES = 1_000


def pagerank(
    g: WeightedGraph,
    damping: float = 0.85,
    tolerance: float = 1e-8,
    max_iter: int = 200,
) -> dict[str, float]:
    """Weighted PageRank via power iteration.

    The transition probability from i to j is proportional to the edge
    weight; isolated nodes spread their mass uniformly. Converged when the
    max per-node change drops below `tolerance`, else ConvergenceError.
    """
    if g.n_nodes == 0:
        raise StatisticError("pagerank is undefined on an empty graph")
    if not (0.0 < damping < 1.0):
        raise ParameterError(f"damping must be in (0, 1), got {damping!r}")
    n = g.n_nodes
    a = g.adjacency()
    s = g.strengths()
    dangling = s == 0
    inv_s = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, s))

    v = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        spread = a @ (v * inv_s)
        shared = v[dangling].sum()
        nxt = (1.0 - damping) / n + damping * (spread + shared / n)
        residual = float(np.abs(nxt - v).max())
        v = nxt
        if residual < tolerance:
            return {label: float(score) for label, score in zip(g.ids, v)}
    raise ConvergenceError(
        f"pagerank did not converge within {max_iter} iterations (residual {residual:.3g})",
        residual=residual,
    )


def clustering(g: WeightedGraph) -> float:
    """Mean local clustering coefficient, unweighted.

    Local coefficient is 2 * triangles / (k * (k - 1)); nodes with degree
    below 2 contribute zero. Undefined on the empty graph.
    """
    if g.n_nodes == 0:
        raise StatisticError("clustering is undefined on an empty graph")
    adj = g.adj_sets()
    acc = np.zeros(g.n_nodes, dtype=np.float64)
    for u, v in zip(g.src.tolist(), g.dst.tolist()):
        common = len(adj[u] & adj[v])
        if common:
            acc[u] += common
            acc[v] += common
    k = g.degrees().astype(np.float64)
    denom = k * (k - 1.0)
    local = np.divide(acc, denom, out=np.zeros_like(acc), where=denom > 0)
    return float(local.mean())


@dataclass(frozen=True)
class PathLengthResult:
    """Mean hop distance plus whether it was estimated from sampled sources."""

    value: float
    sampled: bool
    sources: int


def path_length(
    g: WeightedGraph,
    *,
    exact_limit: int = EXACT_PATH_LIMIT,
    sample_sources: int = PATH_SAMPLE_SOURCES,
    seed: int = 42,
) -> PathLengthResult:
    """Mean hop count over node pairs via breadth-first search.

    Exact over all pairs up to `exact_limit` nodes; above that, estimated
    from `sample_sources` uniformly sampled BFS sources and flagged as
    sampled. The graph must be connected and have at least two nodes.
    """
    n = g.n_nodes
    if n < 2:
        raise StatisticError("path length needs at least two nodes")
    if n <= exact_limit:
        sources = np.arange(n)
        sampled = False
    else:
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(n, size=min(sample_sources, n), replace=False))
        sampled = True

    a = g.adjacency()
    total = 0.0
    for start in range(0, sources.size, 256):
        batch = sources[start : start + 256]
        dist = csgraph.dijkstra(a, directed=False, unweighted=True, indices=batch)
        if np.isinf(dist).any():
            raise ConnectivityError("graph is not connected")
        total += float(dist.sum())
    mean = total / (sources.size * (n - 1))
    return PathLengthResult(value=mean, sampled=sampled, sources=int(sources.size))


def avg_shortest_path(g: WeightedGraph) -> float:
    """Mean BFS hop count over all unordered node pairs."""
    return path_length(g).value


def er_random(n: int, m: int, seed: int) -> WeightedGraph:
    """Erdos-Renyi G(n, m): exactly m distinct edges, uniform, weight 1.

    Node ids are zero-padded so lexicographic order matches numeric order;
    deterministic for a fixed seed.
    """
    if n < 0 or m < 0:
        raise ParameterError("n and m must be non-negative")
    total = n * (n - 1) // 2
    if m > total:
        raise ParameterError(f"m={m} exceeds the {total} possible edges on {n} nodes")
    width = max(len(str(n - 1)), 1) if n else 1
    ids = [f"v{i:0{width}d}" for i in range(n)]
    if m == 0:
        return WeightedGraph(ids, [], [], [])

    # Floyd's sampling: m distinct pair codes, uniform without replacement.
    rng = np.random.default_rng(seed)
    chosen: set[int] = set()
    for j in range(total - m, total):
        t = int(rng.integers(0, j + 1))
        chosen.add(j if t in chosen else t)
    codes = np.fromiter(chosen, dtype=np.int64, count=len(chosen))
    codes.sort()

    # Decode pair code t into (i, j), i < j: row i holds n-1-i codes.
    row_ends = np.cumsum(np.arange(n - 1, 0, -1))
    src = np.searchsorted(row_ends, codes, side="right")
    row_starts = row_ends - np.arange(n - 1, 0, -1)
    dst = codes - row_starts[src] + src + 1
    return WeightedGraph(ids, src, dst, np.ones(m, dtype=np.float64))


@dataclass(frozen=True)
class ErBaseline:
    """Clustering / path-length ensemble statistics over ER replicates."""

    replicates: int
    used: int
    skipped: int
    c_mean: float
    c_sd: float
    l_mean: float
    l_sd: float


@dataclass(frozen=True)
class SmallWorldResult:
    s_g: float
    p_value: float
    c_g: float
    l_g: float
    baseline: ErBaseline


def small_worldness(
    g: WeightedGraph,
    replicates: int = 30,
    seed: int = 42,
    *,
    threads: int = 1,
) -> SmallWorldResult:
    """Small-worldness S_G = (C_G / C_rand) / (L_G / L_rand).

    C_rand and L_rand are means over `replicates` ER graphs matched on node
    and edge count; each replicate's path length is measured on its own
    largest component. Replicates whose largest component has fewer than
    two nodes are skipped and counted. The reported p-value is the fraction
    of usable replicates whose own score exceeds S_G, an empirical proxy.
    """
    if replicates < 1:
        raise ParameterError("replicates must be >= 1")
    if not g.is_connected():
        raise ConnectivityError("small-worldness needs a connected graph")
    c_g = clustering(g)
    l_g = avg_shortest_path(g)
    n, m = g.n_nodes, g.n_edges

    def one(rep: int):
        er = er_random(n, m, derive_seed(seed, "er", rep))
        lcc = largest_component(er)
        if lcc.n_nodes < 2:
            return None
        return clustering(er), avg_shortest_path(lcc)

    samples = [r for r in parallel_map(one, range(replicates), threads=threads) if r is not None]
    skipped = replicates - len(samples)
    if not samples:
        raise StatisticError("all ER replicates were degenerate")
    c_vals = np.array([c for c, _ in samples])
    l_vals = np.array([l for _, l in samples])
    c_rand = float(c_vals.mean())
    l_rand = float(l_vals.mean())
    if c_rand == 0.0:
        raise StatisticError("ER baseline clustering is zero; S_G undefined")

    s_g = (c_g / c_rand) / (l_g / l_rand)
    rep_scores = (c_vals / c_rand) / (l_vals / l_rand)
    p_value = float(np.count_nonzero(rep_scores > s_g) / len(samples))
    baseline = ErBaseline(
        replicates=replicates,
        used=len(samples),
        skipped=skipped,
        c_mean=c_rand,
        c_sd=float(c_vals.std()),
        l_mean=l_rand,
        l_sd=float(l_vals.std()),
    )
    return SmallWorldResult(s_g=float(s_g), p_value=p_value, c_g=c_g, l_g=l_g, baseline=baseline)


class PowerLawFit(NamedTuple):
    gamma: float
    r_squared: float


def fit_power_law(
    frequency: Mapping[int, float],
    k_min: int = 50,
    bins_per_decade: int = 10,
) -> PowerLawFit:
    """Least-squares line on log10(degree) vs log10(frequency) over
    logarithmically binned degrees at or above k_min.

    Within a bin the abscissa is the count-weighted mean log-degree and the
    ordinate is the mean count per distinct degree, so data lying exactly on
    a power law is recovered exactly. gamma is the negated slope.
    """
    if k_min < 1:
        raise ParameterError("k_min must be >= 1")
    if bins_per_decade < 1:
        raise ParameterError("bins_per_decade must be >= 1")
    points = sorted(
        (int(k), float(c)) for k, c in frequency.items() if k >= k_min and c > 0
    )
    if len(points) < 3:
        raise FitError(
            f"need at least 3 distinct degrees >= {k_min}, got {len(points)}"
        )

    bins: dict[int, list[tuple[int, float]]] = {}
    for k, c in points:
        b = math.floor(bins_per_decade * math.log10(k))
        bins.setdefault(b, []).append((k, c))

    xs, ys = [], []
    for b in sorted(bins):
        members = bins[b]
        total = sum(c for _, c in members)
        x = sum(c * math.log10(k) for k, c in members) / total
        y = math.log10(total / len(members))
        xs.append(x)
        ys.append(y)
    if len(xs) < 2:
        raise FitError("degrees collapse into fewer than 2 log bins")

    x_arr = np.asarray(xs)
    y_arr = np.asarray(ys)
    slope, intercept = np.polyfit(x_arr, y_arr, 1)
    predicted = slope * x_arr + intercept
    ss_res = float(np.sum((y_arr - predicted) ** 2))
    ss_tot = float(np.sum((y_arr - y_arr.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-24 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return PowerLawFit(gamma=float(-slope), r_squared=float(r2))


def power_law_fit(g: WeightedGraph, k_min: int = 50, bins_per_decade: int = 10) -> PowerLawFit:
    """Fit the graph's degree distribution; FitError when there are fewer
    than 3 distinct degrees at or above k_min."""
    freq = Counter(int(d) for d in g.degrees() if d >= 1)
    return fit_power_law(freq, k_min=k_min, bins_per_decade=bins_per_decade)


def degree_histogram(g: WeightedGraph) -> list[tuple[int, int]]:
    """Raw (degree, count) pairs sorted by degree."""
    freq = Counter(int(d) for d in g.degrees())
    return sorted(freq.items())


@dataclass(frozen=True)
class NetworkStats:
    """Headline statistics of one connected graph."""

    n: int
    m: int
    clustering: float
    path_length: float
    path_sampled: bool
    gamma: float | None
    r_squared: float | None
    small_world: float
    small_world_p: float

    def to_json_dict(self) -> dict:
        return {
            "N": self.n,
            "M": self.m,
            "C": self.clustering,
            "L": self.path_length,
            "L_sampled": self.path_sampled,
            "gamma": self.gamma,
            "r_squared": self.r_squared,
            "S_G": self.small_world,
            "S_G_p": self.small_world_p,
        }


def network_stats(
    g: WeightedGraph,
    *,
    replicates: int = 30,
    seed: int = 42,
    k_min: int = 50,
    threads: int = 1,
) -> NetworkStats:
    """All headline statistics of a connected graph in one pass.

    The power-law fit is optional: graphs without 3 distinct degrees at or
    above k_min report gamma and r_squared as None.
    """
    pl = path_length(g)
    sw = small_worldness(g, replicates=replicates, seed=seed, threads=threads)
    try:
        fit = power_law_fit(g, k_min=k_min)
        gamma, r2 = fit.gamma, fit.r_squared
    except FitError:
        gamma, r2 = None, None
    return NetworkStats(
        n=g.n_nodes,
        m=g.n_edges,
        clustering=sw.c_g,
        path_length=pl.value,
        path_sampled=pl.sampled,
        gamma=gamma,
        r_squared=r2,
        small_world=sw.s_g,
        small_world_p=sw.p_value,
    )
