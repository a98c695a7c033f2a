"""Shared fixtures and seeded generators for the test suite."""

from __future__ import annotations

import random

import pytest
from hypothesis import settings

from interestmap import WeightedGraph

settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")


def random_weighted_graph(seed: int, n_max: int = 60, heavy_tail: bool = False) -> WeightedGraph:
    """Random connected-ish weighted graph for property tests."""
    rng = random.Random(seed)
    n = rng.randint(4, n_max)
    ids = [f"n{i:03d}" for i in range(n)]
    edges = {}
    m_target = rng.randint(n - 1, min(3 * n, n * (n - 1) // 2))
    while len(edges) < m_target:
        a, b = rng.sample(range(n), 2)
        if a > b:
            a, b = b, a
        if (a, b) in edges:
            continue
        w = rng.paretovariate(1.5) if heavy_tail else rng.uniform(0.1, 10.0)
        edges[(a, b)] = w
    return WeightedGraph(ids, [a for a, _ in edges], [b for _, b in edges], list(edges.values()))


def ring_lattice_rewired(n: int, k: int, p: float, seed: int) -> WeightedGraph:
    """Ring lattice with k neighbors per node, each edge rewired with
    probability p (no self-loops, no duplicates): a small-world testbed."""
    assert k % 2 == 0 and k < n
    rng = random.Random(seed)
    edges = set()
    for i in range(n):
        for d in range(1, k // 2 + 1):
            j = (i + d) % n
            edges.add((min(i, j), max(i, j)))
    rewired = set()
    for a, b in sorted(edges):
        if rng.random() < p:
            while True:
                c = rng.randrange(n)
                if c == a:
                    continue
                e = (min(a, c), max(a, c))
                if e in edges or e in rewired:
                    continue
                rewired.add(e)
                break
        else:
            rewired.add((a, b))
    ids = [f"n{i:04d}" for i in range(n)]
    src = [a for a, _ in sorted(rewired)]
    dst = [b for _, b in sorted(rewired)]
    return WeightedGraph(ids, src, dst, [1.0] * len(src))


def preferential_attachment_graph(n: int, m: int, seed: int) -> WeightedGraph:
    """Preferential-attachment generator via the repeated-endpoint trick."""
    rng = random.Random(seed)
    targets = list(range(m))
    repeated = []
    edges = set()
    for v in range(m, n):
        for t in set(targets):
            edges.add((t, v))
        repeated.extend(targets)
        repeated.extend([v] * m)
        targets = [rng.choice(repeated) for _ in range(m)]
    ids = [f"n{i:05d}" for i in range(n)]
    src = [a for a, _ in sorted(edges)]
    dst = [b for _, b in sorted(edges)]
    return WeightedGraph(ids, src, dst, [1.0] * len(src))


@pytest.fixture
def tiny_activity_tsv(tmp_path):
    """Small deterministic activity file with two planted interest groups."""
    rng = random.Random(99)
    groups = {
        "alpha": [f"forum_a{i}" for i in range(8)],
        "beta": [f"forum_b{i}" for i in range(8)],
    }
    rows = []
    for group, forums in groups.items():
        for a in range(40):
            actor = f"{group}_user{a:02d}"
            for forum in rng.sample(forums, rng.randint(3, 6)):
                rows.append((actor, forum, rng.randint(10, 40)))
    # A couple of cross-group actors keep the projection connected.
    for a in range(4):
        actor = f"bridge_user{a}"
        rows.append((actor, groups["alpha"][a], 15))
        rows.append((actor, groups["beta"][a], 15))
    rows.sort()
    path = tmp_path / "activity.tsv"
    path.write_text("".join(f"{a}\t{f}\t{c}\n" for a, f, c in rows), encoding="utf-8")
    return path
