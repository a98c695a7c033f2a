"""Pure endpoint handlers plus a live HTTP round-trip."""

import json
import threading
import urllib.error
import urllib.request

import pytest

from interestmap import WeightedGraph, recommend
from interestmap.atlas import map_to_dict
from interestmap.errors import ParameterError, UnknownNodeError
from interestmap.server import (
    ServerState,
    get_map,
    get_recommendations,
    make_server,
    search,
)
from tests.test_atlas import clique_edges, pipeline_map


@pytest.fixture(scope="module")
def demo_map():
    left = [f"alpha{i}" for i in range(5)]
    right = [f"beta{i}" for i in range(5)]
    g = WeightedGraph.from_edges(
        clique_edges(left, 3.0) + clique_edges(right, 3.0) + [(left[0], right[0], 3.0)]
    )
    return pipeline_map(g, alpha=0.99)


@pytest.fixture(scope="module")
def state(demo_map):
    return ServerState(demo_map)


class TestHandlers:
    def test_full_map(self, state, demo_map):
        assert get_map(state, "full") == map_to_dict(demo_map)

    def test_summary_has_one_record_per_community(self, state, demo_map):
        summary = get_map(state, "summary")
        communities = {n.community for n in demo_map.nodes}
        assert {c["id"] for c in summary["communities"]} == communities
        assert summary["node_count"] == len(demo_map.nodes)
        for c in summary["communities"]:
            assert len(c["top"]) <= 10
            ranks = [t["pagerank"] for t in c["top"]]
            assert ranks == sorted(ranks, reverse=True)

    def test_unknown_detail(self, state):
        with pytest.raises(ParameterError):
            get_map(state, "everything")

    def test_not_loaded(self):
        empty = ServerState(None)
        from interestmap.server import MapNotLoaded

        with pytest.raises(MapNotLoaded):
            get_map(empty, "full")

    def test_recommendations_mirror_atlas(self, state, demo_map):
        body = get_recommendations(state, "alpha0", limit=5)
        direct = recommend(demo_map, "alpha0", 5)
        assert body["recommendations"] == [
            {"forum": r.forum, "score": r.score, "relation": r.relation} for r in direct
        ]

    def test_unknown_forum(self, state):
        with pytest.raises(UnknownNodeError):
            get_recommendations(state, "ghost", 5)

    def test_search_empty_prefix_is_top_by_rank(self, state, demo_map):
        hits = search(state, "", limit=3)
        ranked = sorted(demo_map.nodes, key=lambda n: (-n.pagerank, n.id))[:3]
        assert [h["id"] for h in hits] == [n.id for n in ranked]

    def test_search_prefix_case_insensitive(self, state):
        hits = search(state, "ALPHA", limit=10)
        assert hits
        assert all(h["id"].startswith("alpha") for h in hits)

    def test_search_no_match(self, state):
        assert search(state, "zz", limit=10) == []

    def test_search_limit_zero(self, state):
        assert search(state, "", limit=0) == []


@pytest.fixture(scope="module")
def live_server(demo_map, tmp_path_factory):
    assets = tmp_path_factory.mktemp("assets")
    (assets / "index.html").write_text("<html><body>explorer</body></html>", encoding="utf-8")
    httpd = make_server(ServerState(demo_map, assets_dir=assets), host="127.0.0.1", port=0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()
    httpd.server_close()


def _get(url):
    with urllib.request.urlopen(url) as resp:
        return resp.status, dict(resp.headers), resp.read()


class TestHttp:
    def test_health(self, live_server):
        status, headers, body = _get(f"{live_server}/api/health")
        assert status == 200
        payload = json.loads(body)
        assert payload["status"] == "ok"
        assert payload["map_loaded"] is True
        assert headers["Access-Control-Allow-Origin"] == "*"

    def test_map_full_parses_against_schema(self, live_server, demo_map):
        status, _, body = _get(f"{live_server}/api/map")
        assert status == 200
        assert json.loads(body) == map_to_dict(demo_map)

    def test_map_summary(self, live_server, demo_map):
        status, _, body = _get(f"{live_server}/api/map?detail=summary")
        assert status == 200
        assert {c["id"] for c in json.loads(body)["communities"]} == {
            n.community for n in demo_map.nodes
        }

    def test_recommend_order_matches_direct_call(self, live_server, demo_map):
        status, _, body = _get(f"{live_server}/api/recommend?forum=alpha0&limit=4")
        assert status == 200
        got = json.loads(body)["recommendations"]
        direct = recommend(demo_map, "alpha0", 4)
        assert got == [
            {"forum": r.forum, "score": r.score, "relation": r.relation} for r in direct
        ]

    def test_recommend_unknown_forum_404(self, live_server):
        with pytest.raises(urllib.error.HTTPError) as err:
            _get(f"{live_server}/api/recommend?forum=ghost")
        assert err.value.code == 404
        assert json.loads(err.value.read()) == {"error": "unknown_forum"}

    def test_recommend_missing_param_400(self, live_server):
        with pytest.raises(urllib.error.HTTPError) as err:
            _get(f"{live_server}/api/recommend")
        assert err.value.code == 400

    def test_bad_limit_400(self, live_server):
        with pytest.raises(urllib.error.HTTPError) as err:
            _get(f"{live_server}/api/search?prefix=a&limit=many")
        assert err.value.code == 400

    def test_search_over_http(self, live_server):
        status, _, body = _get(f"{live_server}/api/search?prefix=beta&limit=2")
        assert status == 200
        hits = json.loads(body)
        assert len(hits) == 2
        assert all(h["id"].startswith("beta") for h in hits)

    def test_static_assets_served(self, live_server):
        status, _, body = _get(f"{live_server}/index.html")
        assert status == 200
        assert b"explorer" in body

    def test_unknown_api_route_404(self, live_server):
        with pytest.raises(urllib.error.HTTPError) as err:
            _get(f"{live_server}/api/nope")
        assert err.value.code == 404

    def test_requests_leave_state_unchanged(self, live_server, demo_map):
        before = _get(f"{live_server}/api/map")[2]
        _get(f"{live_server}/api/recommend?forum=beta1")
        _get(f"{live_server}/api/search?prefix=")
        after = _get(f"{live_server}/api/map")[2]
        assert before == after

    def test_503_when_map_missing(self):
        httpd = make_server(ServerState(None), host="127.0.0.1", port=0)
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
        try:
            base = f"http://127.0.0.1:{httpd.server_address[1]}"
            with pytest.raises(urllib.error.HTTPError) as err:
                _get(f"{base}/api/map")
            assert err.value.code == 503
            assert json.loads(err.value.read()) == {"error": "map_not_loaded"}
        finally:
            httpd.shutdown()
            httpd.server_close()
