import numpy as np
import pytest
from support import make_baseline_model, random_architecture

from qrlnas.checkpoint import (
    genome_from_json,
    genome_to_json,
    load_checkpoint,
    save_checkpoint,
)
from qrlnas.errors import ConfigurationError
from qrlnas.qnet import HeadMode, QNetwork, chunked_layout, default_head


def test_genome_round_trip():
    rng = np.random.default_rng(0)
    arch, _ = random_architecture(rng, 4, 12)
    doc = genome_to_json(arch)
    back = genome_from_json(4, doc)
    assert back == arch


def test_checkpoint_round_trip_is_byte_identical(tmp_path):
    model = make_baseline_model(5, 2, seed=0)
    model.params.values[:] = np.random.default_rng(1).uniform(-np.pi, np.pi, model.params.values.size)
    path_a = tmp_path / "a.json"
    path_b = tmp_path / "b.json"
    save_checkpoint(path_a, model, {"algo": "qrl-dqn", "seed": 3}, seed=3)
    loaded, data = load_checkpoint(path_a)
    save_checkpoint(path_b, loaded, data["config_echo"], data["seed"])
    assert path_a.read_bytes() == path_b.read_bytes()


def test_loaded_model_behaves_identically(tmp_path):
    model = make_baseline_model(5, 2, seed=2)
    path = tmp_path / "c.json"
    save_checkpoint(path, model, {}, seed=0)
    loaded, _ = load_checkpoint(path)
    x = np.array([0.1, -0.4, 2.0, 0.0, 1.0])
    np.testing.assert_array_equal(loaded.q_values(x), model.q_values(x))


def test_policy_head_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    arch, params = random_architecture(rng, 4, 6)
    model = QNetwork(
        arch,
        params,
        default_head(HeadMode.POLICY_PROBS, 3),
        chunked_layout(4, 4),
    )
    path = tmp_path / "d.json"
    save_checkpoint(path, model, {}, seed=0)
    loaded, _ = load_checkpoint(path)
    assert loaded.head.mode is HeadMode.POLICY_PROBS
    x = rng.normal(size=4)
    np.testing.assert_array_equal(loaded.policy_probs(x), model.policy_probs(x))


def test_bad_files_rejected(tmp_path):
    with pytest.raises(ConfigurationError):
        load_checkpoint(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_checkpoint(bad)
    wrong_version = tmp_path / "v9.json"
    wrong_version.write_text('{"version": 9}')
    with pytest.raises(ConfigurationError):
        load_checkpoint(wrong_version)


def test_bad_genome_entry_rejected():
    with pytest.raises(ConfigurationError):
        genome_from_json(4, [{"kind": "WARP", "wires": [0], "param_offset": 0}])
