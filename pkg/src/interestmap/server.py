"""Read-only HTTP service exposing a built interest map to the explorer.

Routes: GET /api/map, /api/recommend, /api/search, /api/health; anything
else is served from the static asset root when one is configured. The map
is immutable after load, so concurrent reads need no locking; rebuilds
happen offline and require a restart.
"""

from __future__ import annotations

import json
import logging
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .atlas import InterestMap, map_to_dict, recommend
from .errors import ParameterError, UnknownNodeError

log = logging.getLogger("atlas.server")

DEFAULT_LIMIT = 10


class ServerState:
    """Loaded map plus precomputed per-community and search indexes."""

    def __init__(self, interest_map: InterestMap | None, assets_dir=None):
        self.map = interest_map
        self.assets_dir = str(assets_dir) if assets_dir else None
        self._communities: dict[int, list] = {}
        self._search_order: list = []
        if interest_map is not None:
            for node in interest_map.nodes:
                self._communities.setdefault(node.community, []).append(node)
            for members in self._communities.values():
                members.sort(key=lambda n: (-n.pagerank, n.id))
            self._search_order = sorted(interest_map.nodes, key=lambda n: (-n.pagerank, n.id))

    @property
    def loaded(self) -> bool:
        return self.map is not None


class MapNotLoaded(Exception):
    pass


def _require_map(state: ServerState) -> InterestMap:
    if state.map is None:
        raise MapNotLoaded()
    return state.map


def get_map(state: ServerState, detail: str = "full") -> dict:
    """`full`: the complete map JSON. `summary`: metadata plus per-community
    size and top-10 nodes by PageRank."""
    m = _require_map(state)
    if detail == "full":
        return map_to_dict(m)
    if detail == "summary":
        communities = [
            {
                "id": cid,
                "size": len(members),
                "top": [{"id": n.id, "pagerank": n.pagerank} for n in members[:10]],
            }
            for cid, members in sorted(state._communities.items())
        ]
        return {
            "meta": map_to_dict(m)["meta"],
            "node_count": len(m.nodes),
            "edge_count": len(m.edges),
            "communities": communities,
        }
    raise ParameterError(f"unknown detail {detail!r} (expected 'full' or 'summary')")


def get_recommendations(state: ServerState, forum: str, limit: int = DEFAULT_LIMIT) -> dict:
    """Transport wrapper mirroring atlas.recommend output exactly."""
    m = _require_map(state)
    recs = recommend(m, forum, limit)
    return {
        "forum": forum,
        "community": m.node(forum).community,
        "recommendations": [
            {"forum": r.forum, "score": r.score, "relation": r.relation} for r in recs
        ],
    }


def search(state: ServerState, prefix: str = "", limit: int = DEFAULT_LIMIT) -> list[dict]:
    """Case-insensitive label-prefix matches ordered by PageRank descending."""
    _require_map(state)
    if limit < 0:
        raise ParameterError("limit must be >= 0")
    needle = prefix.lower()
    out = []
    for node in state._search_order:
        if len(out) >= limit:
            break
        if node.label.lower().startswith(needle):
            out.append({"id": node.id, "label": node.label, "community": node.community})
    return out


class AtlasRequestHandler(SimpleHTTPRequestHandler):
    """Dispatches /api/* to the pure handlers; everything else is static."""

    server_version = "atlas"

    def __init__(self, *args, state: ServerState, **kwargs):
        self.state = state
        directory = state.assets_dir
        super().__init__(*args, directory=directory, **kwargs)

    def end_headers(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        super().end_headers()

    def log_message(self, fmt, *args):
        log.debug("%s %s", self.address_string(), fmt % args)

    def _send_json(self, code: int, payload) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _query(self) -> dict:
        return parse_qs(urlsplit(self.path).query)

    def _int_param(self, params, name, default):
        raw = params.get(name, [None])[0]
        if raw is None:
            return default
        try:
            value = int(raw)
        except ValueError:
            raise ParameterError(f"{name} must be an integer") from None
        if value < 0:
            raise ParameterError(f"{name} must be >= 0")
        return value

    def do_GET(self):
        route = urlsplit(self.path).path
        if not route.startswith("/api/"):
            if self.state.assets_dir is None:
                self._send_json(404, {"error": "not_found"})
                return
            super().do_GET()
            return
        try:
            params = self._query()
            if route == "/api/health":
                self._send_json(
                    200,
                    {
                        "status": "ok",
                        "map_loaded": self.state.loaded,
                        "nodes": len(self.state.map.nodes) if self.state.loaded else 0,
                    },
                )
            elif route == "/api/map":
                detail = params.get("detail", ["full"])[0]
                self._send_json(200, get_map(self.state, detail))
            elif route == "/api/recommend":
                forum = params.get("forum", [None])[0]
                if forum is None:
                    raise ParameterError("missing required parameter 'forum'")
                limit = self._int_param(params, "limit", DEFAULT_LIMIT)
                self._send_json(200, get_recommendations(self.state, forum, limit))
            elif route == "/api/search":
                prefix = params.get("prefix", [""])[0]
                limit = self._int_param(params, "limit", DEFAULT_LIMIT)
                self._send_json(200, search(self.state, prefix, limit))
            else:
                self._send_json(404, {"error": "not_found"})
        except MapNotLoaded:
            self._send_json(503, {"error": "map_not_loaded"})
        except UnknownNodeError:
            self._send_json(404, {"error": "unknown_forum"})
        except ParameterError as exc:
            self._send_json(400, {"error": "bad_request", "detail": str(exc)})


def make_server(state: ServerState, host: str = "127.0.0.1", port: int = 8080) -> ThreadingHTTPServer:
    """Bind (but do not start) the HTTP server; port 0 picks a free port."""
    handler = partial(AtlasRequestHandler, state=state)
    return ThreadingHTTPServer((host, port), handler)


def run_server(state: ServerState, host: str = "127.0.0.1", port: int = 8080) -> None:
    """Serve until interrupted, announcing the bound address on stdout."""
    httpd = make_server(state, host, port)
    bound_host, bound_port = httpd.server_address[:2]
    print(f"serving on http://{bound_host}:{bound_port}", flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
