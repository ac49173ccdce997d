"""
Model artifacts: a directory holding the network description and its weights.

Layout:
- netspec.json: NetSpec, training metadata, seed and sha256 of every weights file
- weights.bin: final weights; weights_best.bin: best-validation weights
  Each weights file is: 8-byte magic, little-endian uint64 header length, UTF-8 JSON header
  listing (name, dtype, shape, offset, nbytes) per tensor, then the raw little-endian data.
  Floating tensors are stored as float32, integer buffers as int64.
"""

import json
import logging
from pathlib import Path

import numpy as np
import torch

from neuralest.netspec import NetSpec
from neuralest.network import ChannelCNN, TrainedEstimator
from utils.binio import LE_FLOAT32, LE_INT64, LE_UINT64, sha256_file
from utils.errors import DataIntegrityError

logger = logging.getLogger(__name__)

MODEL_SCHEMA = "model/1"
WEIGHTS_MAGIC = b"MMWNET1\x00"
SPEC_FILE = "netspec.json"
WEIGHTS_FILE = "weights.bin"
BEST_WEIGHTS_FILE = "weights_best.bin"


def write_weights(state: dict, path) -> None:
    entries, blobs, offset = [], [], 0
    for name, tensor in state.items():
        array = tensor.detach().cpu().numpy()
        if np.issubdtype(array.dtype, np.floating):
            raw, dtype = array.astype(LE_FLOAT32).tobytes(), "float32"
        else:
            raw, dtype = array.astype(LE_INT64).tobytes(), "int64"
        entries.append(
            {
                "name": name,
                "dtype": dtype,
                "shape": list(array.shape),
                "offset": offset,
                "nbytes": len(raw),
            }
        )
        blobs.append(raw)
        offset += len(raw)
    header = json.dumps({"tensors": entries}).encode("utf-8")
    with Path(path).open("wb") as fh:
        fh.write(WEIGHTS_MAGIC)
        fh.write(np.array([len(header)], dtype=LE_UINT64).tobytes())
        fh.write(header)
        for raw in blobs:
            fh.write(raw)


def read_weights(path) -> dict:
    raw = Path(path).read_bytes()
    if raw[: len(WEIGHTS_MAGIC)] != WEIGHTS_MAGIC:
        raise DataIntegrityError(f"{path} is not a weights file")
    start = len(WEIGHTS_MAGIC)
    try:
        header_len = int(np.frombuffer(raw[start : start + 8], dtype=LE_UINT64)[0])
        header = json.loads(raw[start + 8 : start + 8 + header_len].decode("utf-8"))
        data = raw[start + 8 + header_len :]
        state = {}
        for entry in header["tensors"]:
            chunk = data[entry["offset"] : entry["offset"] + entry["nbytes"]]
            dtype = LE_FLOAT32 if entry["dtype"] == "float32" else LE_INT64
            array = np.frombuffer(chunk, dtype=dtype).reshape(entry["shape"])
            state[entry["name"]] = torch.from_numpy(array.astype(dtype.newbyteorder("=")))
    except (IndexError, KeyError, ValueError, TypeError) as e:
        raise DataIntegrityError(f"Weights file {path} is corrupt: {e}") from e
    return state


def save_model(
    out_dir,
    spec: NetSpec,
    state: dict,
    best_state: dict | None = None,
    metadata: dict | None = None,
) -> Path:
    """
    Write a model directory.
    Args:
        out_dir (str | Path): Target directory (created if missing).
        spec (NetSpec): Architecture.
        state (dict): Final state dict.
        best_state (dict, optional): Best-validation state dict.
        metadata (dict, optional): Training config, dataset manifest hash, history summary.
    Returns:
        Path: The model directory.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_weights(state, out_dir / WEIGHTS_FILE)
    checksums = {WEIGHTS_FILE: sha256_file(out_dir / WEIGHTS_FILE)}
    if best_state is not None:
        write_weights(best_state, out_dir / BEST_WEIGHTS_FILE)
        checksums[BEST_WEIGHTS_FILE] = sha256_file(out_dir / BEST_WEIGHTS_FILE)
    document = {
        "schema": MODEL_SCHEMA,
        "netspec": spec.to_dict(),
        "metadata": metadata or {},
        "checksums": checksums,
    }
    (out_dir / SPEC_FILE).write_text(json.dumps(document, indent=2), encoding="utf-8")
    logger.info(f"    ✓ Saved model {spec.name} to {out_dir}")
    return out_dir


def read_model_document(model_dir) -> dict:
    path = Path(model_dir) / SPEC_FILE
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DataIntegrityError(f"Cannot read model description {path}: {e}") from e
    if document.get("schema") != MODEL_SCHEMA:
        raise DataIntegrityError(f"{path} has schema {document.get('schema')!r}, expected {MODEL_SCHEMA!r}")
    return document


def load_state(model_dir, best: bool = False) -> tuple[NetSpec, dict]:
    """
    Read the spec and a verified state dict from a model directory.
    Raises:
        DataIntegrityError: Missing files, checksum mismatch or malformed weights.
    """
    model_dir = Path(model_dir)
    document = read_model_document(model_dir)
    spec = NetSpec.from_dict(document["netspec"])
    name = BEST_WEIGHTS_FILE if best else WEIGHTS_FILE
    path = model_dir / name
    expected = document.get("checksums", {}).get(name)
    if not path.is_file() or expected is None:
        raise DataIntegrityError(f"Model {model_dir} has no {name}")
    if sha256_file(path) != expected:
        raise DataIntegrityError(f"Checksum mismatch for {path}")
    return spec, read_weights(path)


def load_model(model_dir, best: bool = False, device: str | None = None) -> TrainedEstimator:
    spec, state = load_state(model_dir, best=best)
    module = ChannelCNN(spec)
    try:
        module.load_state_dict(state)
    except RuntimeError as e:
        raise DataIntegrityError(f"Weights in {model_dir} do not fit {spec.name}: {e}") from e
    logger.info(f"    ✓ Loaded model {spec.name} from {model_dir}")
    return TrainedEstimator(spec, module, device=device)
