import json

import pytest

from horse.config import (
    EngineConfig,
    config_from_json,
    config_to_json,
    load_config,
    snapshot_mismatches,
)
from horse.errors import ConfigError
from horse.scene import RelationConfig


class TestEngineConfig:
    def test_defaults_are_documented_values(self):
        cfg = EngineConfig()
        assert cfg.relations.tau_v == 0.05
        assert cfg.relations.delta_near == 0.2
        assert cfg.relations.kappa == 0.9
        assert cfg.relations.sigma == 1.5
        assert cfg.min_confidence == 0.5
        assert cfg.alpha == 1.0
        assert cfg.theta == 0.05
        assert cfg.uniqueness_top_k == 3
        assert cfg.salience_area_weight == 0.7
        assert cfg.salience_center_weight == 0.3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"min_confidence": 1.5},
            {"alpha": 0.0},
            {"theta": 0.0},
            {"theta": 1.0},
            {"uniqueness_top_k": 0},
            {"salience_area_weight": -0.1},
            {"salience_area_weight": 0.0, "salience_center_weight": 0.0},
            {"port": 0},
            {"port": 70000},
        ],
    )
    def test_out_of_range_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            EngineConfig(**kwargs)


class TestJsonRoundTrip:
    def test_default_round_trip(self):
        cfg = EngineConfig()
        assert config_from_json(config_to_json(cfg)) == cfg

    def test_custom_round_trip(self):
        cfg = EngineConfig(
            relations=RelationConfig(tau_v=0.1, kappa=0.5),
            alpha=2.0,
            theta=0.01,
            port=9000,
        )
        clone = config_from_json(config_to_json(cfg))
        assert clone == cfg

    def test_partial_document_fills_defaults(self):
        cfg = config_from_json({"alpha": 3.0})
        assert cfg.alpha == 3.0
        assert cfg.theta == EngineConfig().theta

    @pytest.mark.parametrize(
        "data",
        [
            {"bogus": 1},
            {"relations": {"tau_q": 0.1}},
            {"salience": {"weight": 0.5}},
            [],
        ],
    )
    def test_unknown_keys_rejected(self, data):
        with pytest.raises(ConfigError):
            config_from_json(data)

    def test_load_config_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"theta": 0.1}))
        assert load_config(str(path)).theta == 0.1

    def test_load_config_bad_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{nope")
        with pytest.raises(ConfigError):
            load_config(str(path))


class TestSnapshotMismatches:
    def test_no_snapshot_no_warnings(self):
        assert snapshot_mismatches(EngineConfig(), None) == []

    def test_identical_no_warnings(self):
        cfg = EngineConfig()
        assert snapshot_mismatches(cfg, config_to_json(cfg)) == []

    def test_threshold_change_reported_with_both_values(self):
        stored = config_to_json(EngineConfig())
        running = EngineConfig(relations=RelationConfig(tau_v=0.1))
        diffs = snapshot_mismatches(running, stored)
        assert len(diffs) == 1
        assert "relations.tau_v" in diffs[0]
        assert "0.1" in diffs[0] and "0.05" in diffs[0]

    def test_host_port_and_paths_ignored(self):
        stored = config_to_json(EngineConfig())
        running = EngineConfig(host="0.0.0.0", port=9999, index_dir="elsewhere", vocab_path="v.json")
        assert snapshot_mismatches(running, stored) == []

    def test_scoring_keys_reported(self):
        stored = config_to_json(EngineConfig())
        running = EngineConfig(alpha=2.0, theta=0.1)
        diffs = snapshot_mismatches(running, stored)
        assert {d.split(":")[0] for d in diffs} == {"alpha", "theta"}
