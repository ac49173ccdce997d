import json

import numpy as np
import pytest

from neuralest.artifact import load_model, load_state, save_model
from utils.errors import DataIntegrityError


def test_model_round_trip(tmp_path, tiny_net):
    save_model(tmp_path / "model", tiny_net.spec, tiny_net.state_dict(), metadata={"seed": 3})
    loaded = load_model(tmp_path / "model", device="cpu")
    assert loaded.spec == tiny_net.spec
    x = np.random.default_rng(0).standard_normal((2, 4, 8, 2)).astype(np.float32)
    assert np.allclose(loaded.estimate(x), tiny_net.estimate(x), atol=1e-6)
    document = json.loads((tmp_path / "model" / "netspec.json").read_text())
    assert document["metadata"]["seed"] == 3


def test_best_weights_are_kept_separately(tmp_path, tiny_net, make_net):
    other = make_net("sf", seed=9)
    save_model(tmp_path / "m", tiny_net.spec, tiny_net.state_dict(), best_state=other.state_dict())
    _, best = load_state(tmp_path / "m", best=True)
    assert np.allclose(best["body.0.weight"].numpy(), other.state_dict()["body.0.weight"].numpy())


def test_tampered_weights_fail_checksum(tmp_path, tiny_net):
    model_dir = save_model(tmp_path / "m", tiny_net.spec, tiny_net.state_dict())
    weights = model_dir / "weights.bin"
    raw = bytearray(weights.read_bytes())
    raw[-1] ^= 0xFF
    weights.write_bytes(bytes(raw))
    with pytest.raises(DataIntegrityError):
        load_model(model_dir)


def test_missing_model_directory(tmp_path):
    with pytest.raises(DataIntegrityError):
        load_model(tmp_path / "nowhere")
