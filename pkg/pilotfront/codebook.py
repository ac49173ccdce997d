"""
Beamforming / combining codebooks.

Responsibilities:
- Leading columns of the unitary DFT matrix (the default analog codebook)
- Loading and saving codebook matrices in the 'codebook/1' JSON format
  (base64 little-endian float32 interleaved re/im, row-major)
"""

import json
import logging
from pathlib import Path

import numpy as np
from scipy.linalg import dft

from utils.binio import complex_from_base64, complex_to_base64
from utils.errors import DataIntegrityError, InvalidArgumentError

logger = logging.getLogger(__name__)

CODEBOOK_SCHEMA = "codebook/1"


def dft_codebook(n_antennas: int, n_cols: int) -> np.ndarray:
    """
    First n_cols columns of the n x n unitary DFT matrix, entries exp(-j*2*pi*a*b/n)/sqrt(n).
    Args:
        n_antennas (int): Array size n.
        n_cols (int): Number of beams, 1 <= n_cols <= n_antennas.
    Returns:
        np.ndarray: complex128 matrix of shape (n_antennas, n_cols).
    Raises:
        InvalidArgumentError: n_cols outside [1, n_antennas].
    """
    if n_antennas < 1:
        raise InvalidArgumentError(f"n_antennas must be >= 1, got {n_antennas}")
    if not (1 <= n_cols <= n_antennas):
        raise InvalidArgumentError(
            f"n_cols must be in [1, {n_antennas}], got {n_cols}"
        )
    return dft(n_antennas, scale="sqrtn")[:, :n_cols].astype(np.complex128)


def save_codebook(matrix: np.ndarray, path, name: str = "") -> None:
    """
    Write a codebook matrix as a 'codebook/1' JSON document.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise InvalidArgumentError(f"codebook must be 2-D, got shape {matrix.shape}")
    payload = {
        "schema": CODEBOOK_SCHEMA,
        "name": name,
        "shape": list(matrix.shape),
        "data": complex_to_base64(matrix),
    }
    Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")


def load_codebook(path) -> np.ndarray:
    """
    Read a 'codebook/1' JSON document.
    Args:
        path (str | Path): Codebook file.
    Returns:
        np.ndarray: complex128 matrix (antennas x beams).
    Raises:
        DataIntegrityError: Wrong schema or payload size.
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DataIntegrityError(f"Cannot read codebook {path}: {e}") from e
    if payload.get("schema") != CODEBOOK_SCHEMA:
        raise DataIntegrityError(
            f"Codebook {path} has schema {payload.get('schema')!r}, expected {CODEBOOK_SCHEMA!r}"
        )
    try:
        matrix = complex_from_base64(payload["data"], tuple(payload["shape"]))
    except (KeyError, ValueError) as e:
        raise DataIntegrityError(f"Codebook {path} payload is malformed: {e}") from e
    logger.info(f"Loaded codebook {payload.get('name') or path} with shape {matrix.shape}")
    return matrix
