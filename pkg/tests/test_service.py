import json

import pytest
from fastapi.testclient import TestClient

from horse.config import EngineConfig
from horse.index import build
from horse.ingest import export_annotations, load_annotations
from horse.priors import fit
from horse.scene import BBox, SceneObject, build_scene_graph
from horse.service import create_app

from helpers import ball_on_table_objects


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    blue_ball = [
        SceneObject(0, "ball", BBox(0.45, 0.30, 0.55, 0.50), colors=frozenset({"blue"}), shape="round"),
        SceneObject(1, "table", BBox(0.30, 0.50, 0.70, 0.80), shape="rectangular"),
    ]
    image_file = tmp_path_factory.mktemp("media") / "pic.png"
    image_file.write_bytes(b"\x89PNG\r\n\x1a\nstub")
    graphs = [
        build_scene_graph("svc-red", ball_on_table_objects(), image_uri=str(image_file)),
        build_scene_graph("svc-blue", blue_ball),
        build_scene_graph(
            "svc-uri-dangling",
            [SceneObject(0, "lamp", BBox(0.1, 0.1, 0.3, 0.4))],
            image_uri="/nonexistent/path.png",
        ),
    ]
    return graphs


@pytest.fixture(scope="module")
def client(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("idx-svc")
    handle = build(corpus, fit(corpus), str(out))
    return TestClient(create_app(handle, EngineConfig()))


class TestSearchEndpoint:
    def test_search_with_parsed_echo(self, client):
        r = client.get("/api/search", params={"q": "a red ball"})
        assert r.status_code == 200
        body = r.json()
        assert body["parsed"]["raw_text"] == "a red ball"
        assert body["parsed"]["nodes"] == [{"node_id": 0, "label": "ball", "color": "red"}]
        assert body["results"][0]["image_id"] == "svc-red"

    def test_worked_example_score(self, client):
        r = client.get("/api/search", params={"q": "a blue ball on a table"})
        rows = [(row["image_id"], row["score"]) for row in r.json()["results"]]
        assert rows == [("svc-blue", 1.0), ("svc-red", 0.5)]

    def test_strict_mode(self, client):
        r = client.get("/api/search", params={"q": "a blue ball on a table", "mode": "strict"})
        rows = r.json()["results"]
        assert [row["image_id"] for row in rows] == ["svc-blue"]
        assert rows[0]["violated"] == []

    def test_k_truncates(self, client):
        r = client.get("/api/search", params={"q": "a ball", "k": "1"})
        assert len(r.json()["results"]) == 1

    def test_parse_error_shape(self, client):
        r = client.get("/api/search", params={"q": "ball on"})
        assert r.status_code == 400
        body = r.json()
        assert body["error"] == "parse_error"
        assert body["position"] == 7
        assert "after 'on'" in body["message"]

    def test_missing_q_is_empty_query(self, client):
        r = client.get("/api/search")
        assert r.status_code == 400
        assert r.json()["error"] == "parse_error"
        assert r.json()["position"] == 0

    def test_bad_mode_rejected(self, client):
        r = client.get("/api/search", params={"q": "a ball", "mode": "fuzzy"})
        assert r.status_code == 400
        assert r.json()["error"] == "bad_request"

    @pytest.mark.parametrize("k", ["0", "-3", "many"])
    def test_bad_k_rejected(self, client, k):
        r = client.get("/api/search", params={"q": "a ball", "k": k})
        assert r.status_code == 400
        assert r.json()["error"] == "bad_request"

    def test_oversize_query_shape(self, client):
        q = " and ".join(f"a thing{i}" for i in range(9))
        r = client.get("/api/search", params={"q": q})
        assert r.status_code == 400
        assert r.json()["error"] == "query_too_large"


class TestExplainEndpoint:
    def test_worked_example_violations(self, client):
        r = client.get("/api/explain", params={"image": "svc-red", "q": "a blue ball on a table"})
        assert r.status_code == 200
        body = r.json()
        assert body["score"] == 0.5
        assert [c["description"] for c in body["violated"]] == ["ball.color=blue"]
        edge = next(c for c in body["satisfied"] if c["kind"] == "edge")
        assert edge["evidence"]["holds"] is True
        assert "edge_gap" in edge["evidence"]

    def test_missing_image_param(self, client):
        r = client.get("/api/explain", params={"q": "a ball"})
        assert r.status_code == 400
        assert r.json()["error"] == "bad_request"

    def test_unknown_image_404(self, client):
        r = client.get("/api/explain", params={"image": "nope", "q": "a ball"})
        assert r.status_code == 404
        assert r.json()["error"] == "not_found"

    def test_empty_query_positioned(self, client):
        r = client.get("/api/explain", params={"image": "svc-red", "q": "  "})
        assert r.status_code == 400
        assert r.json()["position"] == 0


class TestImageEndpoints:
    def test_graph_json(self, client):
        r = client.get("/api/images/svc-red")
        assert r.status_code == 200
        body = r.json()
        assert body["image_id"] == "svc-red"
        labels = {o["label"] for o in body["objects"]}
        assert labels == {"ball", "table"}
        assert any(t["predicate"] == "on" for t in body["relations"])

    def test_unknown_image_404(self, client):
        r = client.get("/api/images/nope")
        assert r.status_code == 404

    def test_file_served_when_uri_exists(self, client):
        r = client.get("/api/images/svc-red/file")
        assert r.status_code == 200
        assert r.headers["content-type"] == "image/png"
        assert r.content.startswith(b"\x89PNG")

    def test_dangling_uri_404(self, client):
        r = client.get("/api/images/svc-uri-dangling/file")
        assert r.status_code == 404

    def test_no_uri_404(self, client):
        r = client.get("/api/images/svc-blue/file")
        assert r.status_code == 404


class TestAnomaliesEndpoint:
    def test_reports_sorted_and_cached(self, client):
        first = client.get("/api/anomalies", params={"k": "3"}).json()["reports"]
        second = client.get("/api/anomalies", params={"k": "3"}).json()["reports"]
        assert first == second
        values = [r["uniqueness"] for r in first]
        assert values == sorted(values, reverse=True)

    def test_k_validation(self, client):
        r = client.get("/api/anomalies", params={"k": "zero"})
        assert r.status_code == 400


class TestStatsEndpoint:
    def test_counts_and_no_warnings(self, client):
        body = client.get("/api/stats").json()
        assert body["images"] == 3
        assert body["config_warnings"] == []
        assert {"objects", "triples", "terms"} <= set(body)

    def test_config_mismatch_reported(self, corpus, tmp_path):
        from horse.config import config_to_json
        from horse.scene import RelationConfig

        built_cfg = EngineConfig()
        handle = build(corpus, fit(corpus), str(tmp_path / "idx"), config_to_json(built_cfg))
        serving_cfg = EngineConfig(relations=RelationConfig(tau_v=0.1))
        app = create_app(handle, serving_cfg)
        body = TestClient(app).get("/api/stats").json()
        assert len(body["config_warnings"]) == 1
        assert "relations.tau_v" in body["config_warnings"][0]


class TestPriorsEndpoint:
    def test_pair_probabilities(self, client):
        r = client.get("/api/priors", params={"subject": "ball", "object": "table"})
        assert r.status_code == 200
        body = r.json()
        assert body["pair_total"] == 2
        assert body["probabilities"]["on"] == pytest.approx(3 / 4)
        assert body["probabilities"]["inside"] == pytest.approx(1 / 4)

    def test_unseen_pair_is_half(self, client):
        r = client.get("/api/priors", params={"subject": "yeti", "object": "igloo"})
        assert r.json()["pair_total"] == 0
        assert all(v == 0.5 for v in r.json()["probabilities"].values())

    def test_missing_params(self, client):
        r = client.get("/api/priors", params={"subject": "ball"})
        assert r.status_code == 400


class TestUnavailable:
    def test_unopenable_dir_gives_503(self, tmp_path):
        empty = tmp_path / "nothing"
        empty.mkdir()
        app = create_app(index_dir=str(empty))
        client = TestClient(app)
        for path in ("/api/search?q=a+ball", "/api/stats", "/api/anomalies"):
            r = client.get(path)
            assert r.status_code == 503
            assert r.json()["error"] == "index_unavailable"

    def test_no_index_configured(self):
        client = TestClient(create_app())
        r = client.get("/api/stats")
        assert r.status_code == 503


class TestCliHttpEquivalence:
    def test_search_results_identical(self, corpus, tmp_path):
        from click.testing import CliRunner

        from horse.cli import cli

        ann = tmp_path / "ann.json"
        ann.write_text(json.dumps(export_annotations(corpus)))
        # rebuild through the CLI path, then compare outputs for one query
        out = tmp_path / "idx"
        runner = CliRunner()
        assert runner.invoke(
            cli, ["ingest", "--annotations", str(ann), "--out", str(out)]
        ).exit_code == 0
        cli_payload = json.loads(
            runner.invoke(
                cli, ["search", "a blue ball on a table", "--index", str(out), "--json"]
            ).stdout
        )
        graphs = load_annotations(ann.read_text()).graphs
        handle = build(graphs, fit(graphs), str(tmp_path / "idx2"))
        http_payload = TestClient(create_app(handle, EngineConfig())).get(
            "/api/search", params={"q": "a blue ball on a table"}
        ).json()
        assert cli_payload["results"] == http_payload["results"]
        assert cli_payload["parsed"] == http_payload["parsed"]
