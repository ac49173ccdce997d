"""
On-disk cache of ensemble covariance matrices.

Responsibilities:
- Binary format: 8-byte magic, little-endian uint64 header length, UTF-8 JSON header,
  then the matrix as little-endian float32 interleaved (re, im), row-major
- Cache keys built from the profile hash, system config, Q, S, n_mc, seed, rho and temporal model
- Load-or-compute wrapper around ensemble_covariance
"""

import json
import logging
from pathlib import Path

import numpy as np

from chanmodel.scenario import ScenarioProfile, profile_hash
from chanmodel.system_config import SystemConfig
from classical.covariance import CovarianceModel, ensemble_covariance, hermitize
from classical.joint_vector import JointLayout
from utils.binio import LE_UINT64, canonical_json_hash, complex_from_bytes, complex_to_bytes
from utils.errors import DataIntegrityError
from utils.settings import COVARIANCE_CACHE_DIR

logger = logging.getLogger(__name__)

MAGIC = b"MMWCOV1\x00"
HEADER_SCHEMA = "covariance/1"


def save_covariance(model: CovarianceModel, path) -> None:
    header = {
        "schema": HEADER_SCHEMA,
        "dim": model.dim,
        "layout": {
            "q": model.layout.q,
            "s": model.layout.s,
            "n_rx": model.layout.n_rx,
            "n_tx": model.layout.n_tx,
        },
        **model.describe(),
    }
    raw_header = json.dumps(header, sort_keys=True).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(np.array([len(raw_header)], dtype=LE_UINT64).tobytes())
        fh.write(raw_header)
        fh.write(complex_to_bytes(model.matrix))


def load_covariance(path) -> CovarianceModel:
    """
    Read a cached covariance.
    Raises:
        DataIntegrityError: Bad magic, truncated payload or malformed header.
    """
    raw = Path(path).read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise DataIntegrityError(f"{path} is not a covariance cache file")
    offset = len(MAGIC)
    try:
        header_len = int(np.frombuffer(raw[offset : offset + 8], dtype=LE_UINT64)[0])
        header = json.loads(raw[offset + 8 : offset + 8 + header_len].decode("utf-8"))
        layout = JointLayout(**header["layout"])
        matrix = complex_from_bytes(raw[offset + 8 + header_len :], (layout.dim, layout.dim))
    except (IndexError, KeyError, ValueError, TypeError) as e:
        raise DataIntegrityError(f"Covariance cache {path} is corrupt: {e}") from e
    if header.get("schema") != HEADER_SCHEMA:
        raise DataIntegrityError(f"Covariance cache {path} has schema {header.get('schema')!r}")
    return CovarianceModel(
        matrix=hermitize(matrix),
        source=header["source"],
        layout=layout,
        loading=header.get("loading", 0.0),
        n_mc=header.get("n_mc"),
        seed=header.get("seed"),
        profile_hash=header.get("profile_hash"),
    )


def cache_key(
    profile: ScenarioProfile, cfg: SystemConfig, q, s, n_mc, seed, rho=None, temporal_model="gauss-markov"
) -> str:
    return canonical_json_hash(
        {
            "profile": profile_hash(profile),
            "cfg": cfg.to_dict(),
            "q": q,
            "s": s,
            "n_mc": n_mc,
            "seed": seed,
            "rho": rho,
            "temporal_model": temporal_model,
        }
    )


def cached_ensemble_covariance(
    profile: ScenarioProfile,
    cfg: SystemConfig,
    q: int,
    s: int,
    n_mc: int,
    seed: int,
    rho: float | None = None,
    temporal_model: str = "gauss-markov",
    workers: int | None = None,
    cache_dir=None,
) -> CovarianceModel:
    """
    ensemble_covariance, reading from and writing to the cache directory.
    cache_dir=False disables caching.
    """
    if cache_dir is False:
        return ensemble_covariance(
            profile, cfg, q, s, n_mc, seed, rho=rho, temporal_model=temporal_model, workers=workers
        )
    cache_dir = Path(cache_dir or COVARIANCE_CACHE_DIR)
    path = cache_dir / f"{profile.name}-{cache_key(profile, cfg, q, s, n_mc, seed, rho, temporal_model)}.cov"
    if path.is_file():
        try:
            model = load_covariance(path)
            logger.info(f"    ✓ Loaded cached covariance {path.name}")
            return model
        except DataIntegrityError as e:
            logger.warning(f"    ⚠ Ignoring corrupt cache entry {path.name}: {e}")
    model = ensemble_covariance(
        profile, cfg, q, s, n_mc, seed, rho=rho, temporal_model=temporal_model, workers=workers
    )
    save_covariance(model, path)
    logger.info(f"    ✓ Cached covariance as {path.name}")
    return model
