#!/usr/bin/env python3
"""Build the explorer's test fixture: a 200-node, 4-community map produced
by the real pipeline (backbone -> louvain -> pagerank -> build_map).

Run from the frontend directory:  python3 scripts/generate_fixture.py
"""

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "src"))

from interestmap import (  # noqa: E402
    WeightedGraph,
    build_map,
    export_map,
    extract_backbone,
    largest_component,
    louvain,
    pagerank,
)

BLOCKS = ("arts", "games", "science", "sports")
BLOCK_SIZE = 50
ALPHA = 0.9
BUILT_AT = "2014-01-01T00:00:00Z"


def planted_graph() -> WeightedGraph:
    rng = random.Random(2024)
    edges = {}

    def add(a, b, w):
        if a == b:
            return
        key = (min(a, b), max(a, b))
        edges.setdefault(key, w)

    names = {}
    for block in BLOCKS:
        names[block] = [f"{block}{i:02d}" for i in range(BLOCK_SIZE)]
        members = names[block]
        # Ring plus chords keeps each block connected and clustered.
        for i in range(BLOCK_SIZE):
            add(members[i], members[(i + 1) % BLOCK_SIZE], rng.uniform(30, 80))
            add(members[i], members[(i + 2) % BLOCK_SIZE], rng.uniform(20, 60))
        for _ in range(140):
            a, b = rng.sample(members, 2)
            add(a, b, rng.uniform(15, 70))

    # Sparse weak bridges so the LCC spans all four blocks.
    for i, left in enumerate(BLOCKS):
        for right in BLOCKS[i + 1 :]:
            for _ in range(3):
                add(rng.choice(names[left]), rng.choice(names[right]), rng.uniform(25, 40))

    return WeightedGraph.from_edges([(a, b, w) for (a, b), w in edges.items()])


def main() -> None:
    g = planted_graph()
    bb = extract_backbone(g, ALPHA)
    lcc = largest_component(bb.graph)
    part = louvain(lcc, seed=5)
    ranks = pagerank(lcc)
    fixture = build_map(bb, part, ranks, layout_seed=9, iterations=300, built_at=BUILT_AT)

    assert len(fixture.nodes) == 200, f"expected 200 nodes, got {len(fixture.nodes)}"
    assert fixture.communities == 4, f"expected 4 communities, got {fixture.communities}"

    out = Path(__file__).resolve().parents[1] / "fixtures" / "map.json"
    out.write_bytes(export_map(fixture, "json"))
    doc = json.loads(out.read_text())
    sizes = {}
    for node in doc["nodes"]:
        sizes[node["community"]] = sizes.get(node["community"], 0) + 1
    print(f"wrote {out} ({len(doc['nodes'])} nodes, {len(doc['edges'])} edges, sizes {sizes})")


if __name__ == "__main__":
    main()
