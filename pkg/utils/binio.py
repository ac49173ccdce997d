"""
Binary encoding helpers shared by the on-disk formats.

Responsibilities:
- Converts complex matrices to and from little-endian float32 interleaved (re, im) bytes
- Encodes those bytes as base64 for JSON documents
- Computes sha256 checksums of files
"""

import base64
import hashlib
import json

import numpy as np

LE_FLOAT32 = np.dtype("<f4")
LE_INT64 = np.dtype("<i8")
LE_UINT64 = np.dtype("<u8")


def complex_to_bytes(matrix):
    """
    Serialize a complex array as interleaved little-endian float32 (re, im), row-major.
    Args:
        matrix (np.ndarray): Complex array of any shape.
    Returns:
        bytes: 8 bytes per complex entry.
    """
    arr = np.ascontiguousarray(matrix, dtype=np.complex64)
    return arr.view(np.float32).astype(LE_FLOAT32, copy=False).tobytes()


def complex_from_bytes(raw, shape):
    """
    Inverse of complex_to_bytes.
    Args:
        raw (bytes): Interleaved float32 bytes.
        shape (tuple): Target complex shape.
    Returns:
        np.ndarray: complex128 array of the given shape.
    """
    floats = np.frombuffer(raw, dtype=LE_FLOAT32)
    expected = 2 * int(np.prod(shape))
    if floats.size != expected:
        raise ValueError(f"Expected {expected} float32 values, got {floats.size}")
    pairs = floats.astype(np.float32).reshape(-1, 2)
    return (pairs[:, 0] + 1j * pairs[:, 1]).astype(np.complex128).reshape(shape)


def complex_to_base64(matrix):
    return base64.b64encode(complex_to_bytes(matrix)).decode("ascii")


def complex_from_base64(text, shape):
    return complex_from_bytes(base64.b64decode(text), shape)


def sha256_file(path, chunk_size=1 << 20):
    """
    Compute the sha256 hex digest of a file.
    Args:
        path (str | Path): File to hash.
        chunk_size (int): Read size in bytes.
    Returns:
        str: Hex digest.
    """
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        while True:
            chunk = f.read(chunk_size)
            if not chunk:
                break
            digest.update(chunk)
    return digest.hexdigest()


def canonical_json_hash(payload, length=16):
    """
    Short sha256 of a JSON-serializable payload with sorted keys.
    """
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:length]


def array_digest(*arrays, length=16):
    """
    Short sha256 over the raw bytes of several arrays (used as realization hashes).
    """
    digest = hashlib.sha256()
    for arr in arrays:
        digest.update(np.ascontiguousarray(arr).tobytes())
    return digest.hexdigest()[:length]
