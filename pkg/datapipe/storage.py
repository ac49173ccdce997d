"""
On-disk dataset format and the in-memory Dataset.

Responsibilities:
- Dataset: manifest plus channel-last input/target tensors and per-sample metadata
- Writes manifest.json, samples.bin and checksums.txt into a dataset directory
- Verifies checksums and sizes before returning any tensor (no partial datasets)
- Reads the manifest alone without touching the sample file

samples.bin layout (little-endian):
    8-byte magic
    int64 header: count, N_R, N_T, input maps, output maps
    per sample: int64 k0, int64 n0, int64 index, float32 inputs (N_R, N_T, maps_in),
    float32 targets (N_R, N_T, maps_out), both row-major with interleaved (re, im) planes
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from datapipe.manifest import DatasetManifest
from utils.binio import LE_INT64, sha256_file
from utils.errors import DataIntegrityError, InvalidArgumentError

logger = logging.getLogger(__name__)

SAMPLES_MAGIC = b"MMWDS1\x00\x00"
MANIFEST_FILE = "manifest.json"
SAMPLES_FILE = "samples.bin"
CHECKSUMS_FILE = "checksums.txt"
HEADER_FIELDS = 5


def record_dtype(n_rx: int, n_tx: int, maps_in: int, maps_out: int) -> np.dtype:
    return np.dtype(
        [
            ("k0", "<i8"),
            ("n0", "<i8"),
            ("index", "<i8"),
            ("inputs", "<f4", (n_rx, n_tx, maps_in)),
            ("targets", "<f4", (n_rx, n_tx, maps_out)),
        ]
    )


@dataclass(eq=False)
class Dataset:
    """
    inputs: float32 (count, N_R, N_T, 2 * input matrices), TE planes.
    targets: float32 (count, N_R, N_T, 2Q), true channel planes divided by c.
    meta: int64 (count, 3) with columns k0, n0, sample index.
    """

    manifest: DatasetManifest
    inputs: np.ndarray
    targets: np.ndarray
    meta: np.ndarray

    def __post_init__(self):
        count = len(self.inputs)
        if len(self.targets) != count or len(self.meta) != count:
            raise InvalidArgumentError(
                f"inputs/targets/meta lengths differ: {count}, {len(self.targets)}, {len(self.meta)}"
            )

    def __len__(self) -> int:
        return len(self.inputs)

    def subset(self, indices, split: str | None = None) -> "Dataset":
        """Dataset of the selected rows, with the manifest count updated."""
        indices = np.asarray(indices, dtype=np.int64)
        manifest = self.manifest.with_updates(
            count=len(indices),
            split=split,
            parent=self.manifest.digest(),
        )
        return Dataset(
            manifest=manifest,
            inputs=self.inputs[indices],
            targets=self.targets[indices],
            meta=self.meta[indices],
        )


def _write_manifest(manifest: DatasetManifest, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def save_dataset(dataset: Dataset, out_dir) -> Path:
    """
    Write a dataset directory; rewriting identical content produces identical bytes.
    Args:
        dataset (Dataset): Samples and manifest.
        out_dir (str | Path): Target directory (created if missing).
    Returns:
        Path: The dataset directory.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    count = len(dataset)
    _, n_rx, n_tx, maps_in = dataset.inputs.shape
    maps_out = dataset.targets.shape[-1]

    records = np.zeros(count, dtype=record_dtype(n_rx, n_tx, maps_in, maps_out))
    records["k0"] = dataset.meta[:, 0]
    records["n0"] = dataset.meta[:, 1]
    records["index"] = dataset.meta[:, 2]
    records["inputs"] = dataset.inputs
    records["targets"] = dataset.targets
    header = np.array([count, n_rx, n_tx, maps_in, maps_out], dtype=LE_INT64)

    with open(out_dir / SAMPLES_FILE, "wb") as f:
        f.write(SAMPLES_MAGIC)
        f.write(header.tobytes())
        f.write(records.tobytes())
    _write_manifest(dataset.manifest, out_dir / MANIFEST_FILE)

    lines = [f"{sha256_file(out_dir / name)}  {name}" for name in (MANIFEST_FILE, SAMPLES_FILE)]
    (out_dir / CHECKSUMS_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"    ✓ Wrote {count} samples to {out_dir}")
    return out_dir


def verify_checksums(path) -> None:
    """
    Raises:
        DataIntegrityError: Missing checksum file or any digest mismatch.
    """
    path = Path(path)
    try:
        lines = (path / CHECKSUMS_FILE).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataIntegrityError(f"Cannot read checksums of {path}: {e}") from e
    expected = {}
    for line in lines:
        if line.strip():
            digest, name = line.split(maxsplit=1)
            expected[name.strip()] = digest
    for name in (MANIFEST_FILE, SAMPLES_FILE):
        if name not in expected:
            raise DataIntegrityError(f"{path}: no checksum recorded for {name}")
        try:
            actual = sha256_file(path / name)
        except OSError as e:
            raise DataIntegrityError(f"Cannot read {path / name}: {e}") from e
        if actual != expected[name]:
            raise DataIntegrityError(f"{path / name}: checksum mismatch")


def read_manifest(path) -> DatasetManifest:
    """
    Read only manifest.json of a dataset directory.
    Raises:
        DataIntegrityError: Missing, malformed or wrong-schema manifest.
    """
    path = Path(path)
    try:
        with open(path / MANIFEST_FILE, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataIntegrityError(f"Cannot read dataset manifest in {path}: {e}") from e
    try:
        return DatasetManifest.from_dict(data)
    except (InvalidArgumentError, KeyError, TypeError) as e:
        raise DataIntegrityError(f"Invalid dataset manifest in {path}: {e}") from e


def load_dataset(path) -> Dataset:
    """
    Load a dataset directory after checksum verification.
    Args:
        path (str | Path): Directory written by save_dataset.
    Returns:
        Dataset: Tensors bitwise-equal to what was saved.
    Raises:
        DataIntegrityError: Checksum failure, truncation or schema mismatch.
    """
    path = Path(path)
    verify_checksums(path)
    manifest = read_manifest(path)
    raw = (path / SAMPLES_FILE).read_bytes()
    header_end = len(SAMPLES_MAGIC) + HEADER_FIELDS * LE_INT64.itemsize
    if len(raw) < header_end or raw[: len(SAMPLES_MAGIC)] != SAMPLES_MAGIC:
        raise DataIntegrityError(f"{path / SAMPLES_FILE}: not a dataset sample file")
    count, n_rx, n_tx, maps_in, maps_out = (
        int(v) for v in np.frombuffer(raw[len(SAMPLES_MAGIC) : header_end], dtype=LE_INT64)
    )
    dtype = record_dtype(n_rx, n_tx, maps_in, maps_out)
    if len(raw) - header_end != count * dtype.itemsize:
        raise DataIntegrityError(
            f"{path / SAMPLES_FILE}: expected {count} records of {dtype.itemsize} bytes, "
            f"found {len(raw) - header_end} bytes"
        )
    if count != manifest.count:
        raise DataIntegrityError(f"{path}: manifest count {manifest.count} != {count} records")
    if (maps_in, maps_out) != (manifest.input_maps, manifest.output_maps):
        raise DataIntegrityError(
            f"{path}: sample maps {(maps_in, maps_out)} disagree with the manifest "
            f"{(manifest.input_maps, manifest.output_maps)}"
        )
    records = (
        np.frombuffer(raw, dtype=dtype, offset=header_end, count=count)
        if count
        else np.zeros(0, dtype=dtype)
    )
    meta = np.stack([records["k0"], records["n0"], records["index"]], axis=1).astype(np.int64)
    logger.info(f"  ↳ Loaded {count} samples ({manifest.net_kind}, Q={manifest.q}) from {path}")
    return Dataset(
        manifest=manifest,
        inputs=records["inputs"].astype(np.float32),
        targets=records["targets"].astype(np.float32),
        meta=meta,
    )
