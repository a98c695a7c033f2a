"""Command-line pipeline: ingest -> project -> backbone -> analyze ->
communities -> map -> serve, plus the alpha sweep.

Every subcommand accepts --config <file> with flat `key = value` lines;
explicit flags override config values, which override built-in defaults.
All randomness flows from explicit seeds so identical config plus seeds
reproduce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import atlas, backbone, community, graphcore, ingest, metrics, server
from .errors import AtlasError, ParameterError

log = logging.getLogger("atlas")

DEFAULTS = {
    "format": "tsv",
    "min_posts": 10,
    "min_forum_actors": 1,
    "alpha": 0.05,
    "alphas": "0.0001:1.0:log",
    "replicates": 30,
    "seed": 42,
    "layout_seed": None,
    "community_seed": None,
    "er_seed": None,
    "k_min": 50,
    "resolution": 1.0,
    "iterations": 500,
    "damping": 0.85,
    "tolerance": 1e-8,
    "threads": os.cpu_count() or 1,
    "port": 8080,
    "host": "127.0.0.1",
    "limit": 10,
    "build_time": None,
    "out": None,
    "input": None,
    "edges": None,
    "map": None,
    "assets": None,
}

_INT_KEYS = {
    "min_posts", "min_forum_actors", "replicates", "seed", "layout_seed",
    "community_seed", "er_seed", "k_min", "iterations", "threads", "port", "limit",
}
_FLOAT_KEYS = {"alpha", "resolution", "damping", "tolerance"}


class UsageError(Exception):
    pass


def _alpha_arg(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"alpha must be a number, got {text!r}") from None
    if not (0.0 < value < 1.0):
        raise argparse.ArgumentTypeError(f"alpha must be in (0, 1), got {text}")
    return value


def parse_alpha_grid(text: str) -> list[float]:
    """`start:stop:log[:points_per_decade]` or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4) or parts[2] != "log":
            raise UsageError(f"bad alpha grid {text!r}; expected start:stop:log[:points_per_decade]")
        try:
            lo, hi = float(parts[0]), float(parts[1])
            per_decade = int(parts[3]) if len(parts) == 4 else 5
        except ValueError:
            raise UsageError(f"bad alpha grid {text!r}") from None
        try:
            return backbone.default_alpha_grid(points_per_decade=per_decade, lo=lo, hi=hi)
        except ParameterError as exc:
            raise UsageError(str(exc)) from None
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad alpha list {text!r}") from None
    if not values:
        raise UsageError("alpha list is empty")
    return values


def load_config(path) -> dict:
    """Flat `key = value` file; `#` starts a comment, blank lines ignored."""
    cfg = {}
    path = Path(path)
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        cfg[key] = value.strip()
    return cfg


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError:
            raise UsageError(f"config key {key!r} must be an integer, got {value!r}") from None
    if key in _FLOAT_KEYS:
        try:
            return float(value)
        except ValueError:
            raise UsageError(f"config key {key!r} must be a number, got {value!r}") from None
    return value


class Settings:
    """Resolved option values: defaults < config file < explicit flags."""

    def __init__(self, args: argparse.Namespace):
        cfg = load_config(args.config) if getattr(args, "config", None) else {}
        self._values = {}
        for key, default in DEFAULTS.items():
            value = getattr(args, key, None)
            if value is None:
                value = _coerce(key, cfg.get(key, default))
            self._values[key] = value
        if self._values["out"] is None:
            self._values["out"] = os.environ.get("ATLAS_OUT", "atlas_out")
        if self._values["build_time"] is None:
            self._values["build_time"] = os.environ.get("ATLAS_BUILD_TIME")
        alpha = self._values["alpha"]
        if alpha is not None and not (0.0 < float(alpha) < 1.0):
            raise UsageError(f"alpha must be in (0, 1), got {alpha}")

    def __getattr__(self, key):
        try:
            return self._values[key]
        except KeyError:
            raise AttributeError(key) from None

    @property
    def layout_seed_value(self) -> int:
        return self.layout_seed if self.layout_seed is not None else self.seed

    @property
    def community_seed_value(self) -> int:
        return self.community_seed if self.community_seed is not None else self.seed

    @property
    def er_seed_value(self) -> int:
        return self.er_seed if self.er_seed is not None else self.seed

    def out_dir(self, kind: str) -> Path:
        path = Path(self.out) / kind
        path.mkdir(parents=True, exist_ok=True)
        return path


def _require(settings: Settings, *keys):
    for key in keys:
        if getattr(settings, key) is None:
            raise UsageError(f"missing required option --{key.replace('_', '-')}")


def _load_records(settings: Settings):
    _require(settings, "input")
    records = ingest.load_activity(settings.input, format=settings.format)
    log.info("loaded %d activity records from %s", len(records), settings.input)
    return records


def _load_projection(settings: Settings) -> graphcore.WeightedGraph:
    """Projected forum graph, either recomputed from raw activity or read
    from a previously saved edge list (--edges)."""
    if settings.edges:
        g = graphcore.load_edgelist(settings.edges)
        log.info("loaded projected graph: %d nodes, %d edges", g.n_nodes, g.n_edges)
        return g
    records = _load_records(settings)
    cfg = ingest.IngestConfig(min_posts=settings.min_posts, min_forum_actors=settings.min_forum_actors)
    bg = ingest.build_bipartite(records, cfg)
    log.info(
        "bipartite graph: %d actors, %d forums, %d memberships",
        bg.n_actors, bg.n_forums, bg.n_memberships,
    )
    g = graphcore.project(bg)
    log.info("projected graph: %d nodes, %d edges", g.n_nodes, g.n_edges)
    return g


def _write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(path)
    return path


def _write_text(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    print(path)
    return path


def _weight_summary(g: graphcore.WeightedGraph) -> dict:
    if g.n_edges == 0:
        return {"mean": None, "min": None, "max": None}
    return {
        "mean": float(g.weights.mean()),
        "min": float(g.weights.min()),
        "max": float(g.weights.max()),
    }


# -- subcommand implementations ----------------------------------------------


def cmd_ingest(settings: Settings) -> int:
    records = _load_records(settings)
    cfg = ingest.IngestConfig(min_posts=settings.min_posts, min_forum_actors=settings.min_forum_actors)
    bg = ingest.build_bipartite(records, cfg)
    out = settings.out_dir("graphs") / "bipartite.tsv"
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for actor, forum in bg.memberships():
            fh.write(f"{actor}\t{forum}\n")
    print(out)
    summary = {
        "actors": bg.n_actors,
        "forums": bg.n_forums,
        "memberships": bg.n_memberships,
        "mean_forums_per_actor": bg.mean_forums_per_actor(),
        "min_posts": settings.min_posts,
        "min_forum_actors": settings.min_forum_actors,
    }
    _write_json(settings.out_dir("stats") / "ingest.json", summary)
    return 0


def cmd_project(settings: Settings) -> int:
    g = _load_projection(settings)
    out = settings.out_dir("graphs") / "projection.tsv"
    graphcore.save_edgelist(g, out)
    print(out)
    summary = {"nodes": g.n_nodes, "edges": g.n_edges, "weights": _weight_summary(g)}
    _write_json(settings.out_dir("stats") / "projection.json", summary)
    return 0


def cmd_backbone(settings: Settings) -> int:
    g = _load_projection(settings)
    bb = backbone.extract_backbone(g, settings.alpha)
    log.info("backbone at alpha=%g: %d nodes, %d edges", settings.alpha, bb.graph.n_nodes, bb.graph.n_edges)
    out = settings.out_dir("graphs") / "backbone.tsv"
    graphcore.save_edgelist(bb.graph, out)
    print(out)
    summary = {
        "alpha": settings.alpha,
        "nodes": bb.graph.n_nodes,
        "edges": bb.graph.n_edges,
        "weights": _weight_summary(bb.graph),
        "source": bb.source_fingerprint,
    }
    _write_json(settings.out_dir("stats") / "backbone.json", summary)
    return 0


def cmd_analyze(settings: Settings) -> int:
    g = _load_projection(settings)
    bb = backbone.extract_backbone(g, settings.alpha)
    lcc = graphcore.largest_component(bb.graph)
    log.info("backbone LCC: %d nodes, %d edges", lcc.n_nodes, lcc.n_edges)
    if lcc.n_nodes < 2:
        raise AtlasError("backbone LCC has fewer than 2 nodes; nothing to analyze")
    stats = metrics.network_stats(
        lcc,
        replicates=settings.replicates,
        seed=settings.er_seed_value,
        k_min=settings.k_min,
        threads=settings.threads,
    )
    part = community.louvain(lcc, seed=settings.community_seed_value, resolution=settings.resolution)
    payload = stats.to_json_dict()
    payload.update(
        {
            "Q": part.q,
            "communities": part.community_count,
            "alpha": settings.alpha,
            "replicates": settings.replicates,
            "er_seed": settings.er_seed_value,
            "community_seed": settings.community_seed_value,
            "k_min": settings.k_min,
        }
    )
    _write_json(settings.out_dir("stats") / "stats.json", payload)
    return 0


def cmd_sweep(settings: Settings) -> int:
    g = _load_projection(settings)
    alphas = parse_alpha_grid(settings.alphas)
    log.info("sweeping %d alpha values with %d replicates", len(alphas), settings.replicates)
    result = backbone.sweep(
        g,
        alphas,
        replicates=settings.replicates,
        seed=settings.er_seed_value,
        k_min=settings.k_min,
        resolution=settings.resolution,
        threads=settings.threads,
    )
    _write_text(settings.out_dir("stats") / "sweep.csv", result.to_csv())
    _write_json(
        settings.out_dir("stats") / "sweep.json",
        {
            "alphas": alphas,
            "replicates": settings.replicates,
            "er_seed": settings.er_seed_value,
            "k_min": settings.k_min,
            "resolution": settings.resolution,
        },
    )
    return 0


def cmd_communities(settings: Settings) -> int:
    g = _load_projection(settings)
    bb = backbone.extract_backbone(g, settings.alpha)
    lcc = graphcore.largest_component(bb.graph)
    if lcc.n_nodes == 0:
        raise AtlasError("backbone LCC is empty; no communities to detect")
    part = community.louvain(lcc, seed=settings.community_seed_value, resolution=settings.resolution)
    log.info("louvain: %d communities, Q=%.4f, %d passes", part.community_count, part.q, part.passes)
    _write_text(settings.out_dir("stats") / "communities.csv", part.to_csv())
    _write_json(settings.out_dir("stats") / "communities.json", part.summary())
    return 0


def cmd_map(settings: Settings) -> int:
    g = _load_projection(settings)
    bb = backbone.extract_backbone(g, settings.alpha)
    lcc = graphcore.largest_component(bb.graph)
    if lcc.n_nodes == 0:
        raise AtlasError("backbone LCC is empty; nothing to map")
    part = community.louvain(lcc, seed=settings.community_seed_value, resolution=settings.resolution)
    ranks = metrics.pagerank(lcc, damping=settings.damping, tolerance=settings.tolerance)
    interest_map = atlas.build_map(
        bb,
        part,
        ranks,
        layout_seed=settings.layout_seed_value,
        iterations=settings.iterations,
        built_at=settings.build_time,
    )
    log.info("map: %d nodes, %d edges, %d communities", len(interest_map.nodes), len(interest_map.edges), interest_map.communities)
    maps_dir = settings.out_dir("maps")
    (maps_dir / "map.json").write_bytes(atlas.export_map(interest_map, "json"))
    print(maps_dir / "map.json")
    (maps_dir / "map.gexf").write_bytes(atlas.export_map(interest_map, "gexf"))
    print(maps_dir / "map.gexf")
    _write_json(
        maps_dir / "build.json",
        {
            "alpha": settings.alpha,
            "layout_seed": settings.layout_seed_value,
            "community_seed": settings.community_seed_value,
            "iterations": settings.iterations,
            "built_at": interest_map.built_at,
            "source": interest_map.source,
        },
    )
    return 0


def cmd_serve(settings: Settings) -> int:
    _require(settings, "map")
    interest_map = atlas.import_map(Path(settings.map).read_bytes())
    state = server.ServerState(interest_map, assets_dir=settings.assets)
    log.info("loaded map with %d nodes from %s", len(interest_map.nodes), settings.map)
    server.run_server(state, host=settings.host, port=settings.port)
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "project": cmd_project,
    "backbone": cmd_backbone,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "communities": cmd_communities,
    "map": cmd_map,
    "serve": cmd_serve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atlas",
        description="Turn actor/forum activity logs into a navigable interest map.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help="output directory (env ATLAS_OUT as fallback)")
        p.add_argument("--threads", type=int, help="worker threads; 1 forces sequential")
        return p

    def add_input(p: argparse.ArgumentParser, edges: bool = True):
        p.add_argument("--input", help="raw activity file (actor, forum, count)")
        p.add_argument("--format", choices=["tsv", "jsonlines"], help="input format (default tsv)")
        p.add_argument("--min-posts", dest="min_posts", type=int, help="activity threshold (default 10)")
        p.add_argument(
            "--min-forum-actors", dest="min_forum_actors", type=int,
            help="drop forums with fewer qualifying actors (default 1)",
        )
        if edges:
            p.add_argument("--edges", help="skip ingest/projection and load this edge-list TSV")

    p = add("ingest", "threshold raw activity into a bipartite graph")
    add_input(p, edges=False)

    p = add("project", "project the bipartite graph onto forums")
    add_input(p)

    p = add("backbone", "extract the disparity-filter backbone")
    add_input(p)
    p.add_argument("--alpha", type=_alpha_arg, help="significance cutoff in (0, 1), default 0.05")

    p = add("analyze", "full network statistics of the backbone LCC")
    add_input(p)
    p.add_argument("--alpha", type=_alpha_arg, help="significance cutoff in (0, 1), default 0.05")
    p.add_argument("--replicates", type=int, help="ER replicates (default 30)")
    p.add_argument("--k-min", dest="k_min", type=int, help="min degree for the power-law fit (default 50)")
    p.add_argument("--seed", type=int, help="master random seed (default 42)")
    p.add_argument("--er-seed", dest="er_seed", type=int, help="seed for ER replicates")
    p.add_argument("--community-seed", dest="community_seed", type=int, help="seed for louvain")

    p = add("sweep", "backbone statistics across a grid of alpha cutoffs")
    add_input(p)
    p.add_argument("--alphas", help="start:stop:log[:per_decade] or comma list (default 0.0001:1.0:log)")
    p.add_argument("--replicates", type=int, help="ER replicates per alpha (default 30)")
    p.add_argument("--k-min", dest="k_min", type=int, help="min degree for the power-law fit")
    p.add_argument("--seed", type=int, help="master random seed (default 42)")
    p.add_argument("--er-seed", dest="er_seed", type=int, help="seed for ER replicates")

    p = add("communities", "Louvain meta-communities of the backbone LCC")
    add_input(p)
    p.add_argument("--alpha", type=_alpha_arg, help="significance cutoff in (0, 1), default 0.05")
    p.add_argument("--seed", type=int, help="master random seed (default 42)")
    p.add_argument("--community-seed", dest="community_seed", type=int, help="seed for louvain")
    p.add_argument("--resolution", type=float, help="modularity resolution (default 1.0)")

    p = add("map", "build the interest map (JSON + GEXF)")
    add_input(p)
    p.add_argument("--alpha", type=_alpha_arg, help="significance cutoff in (0, 1), default 0.05")
    p.add_argument("--seed", type=int, help="master random seed (default 42)")
    p.add_argument("--layout-seed", dest="layout_seed", type=int, help="seed for the layout")
    p.add_argument("--community-seed", dest="community_seed", type=int, help="seed for louvain")
    p.add_argument("--iterations", type=int, help="layout iterations (default 500)")
    p.add_argument("--build-time", dest="build_time", help="pin the map's built_at timestamp")

    p = add("serve", "serve a built map over HTTP")
    p.add_argument("--map", help="map JSON produced by the map subcommand")
    p.add_argument("--assets", help="static asset root (the web explorer build)")
    p.add_argument("--port", type=int, help="listen port (default 8080, 0 picks a free port)")
    p.add_argument("--host", help="bind address (default 127.0.0.1)")

    return parser


def run_command(argv) -> int:
    """Parse argv and run one subcommand; returns the process exit code."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        settings = Settings(args)
        return _COMMANDS[args.command](settings)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (AtlasError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
