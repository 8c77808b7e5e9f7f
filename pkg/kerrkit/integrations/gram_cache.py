"""
Binary Gram cache: magic "KGRM", u32 version, u64 n, n×n little-endian
float64 row-major values, trailing SHA-256 of everything before it
"""

import hashlib
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..utils.errors import ParseError, ShapeMismatchError
from ..utils.logging import get_logger

logger = get_logger(__name__)

MAGIC = b"KGRM"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")
_DIGEST_SIZE = 32


def encode_gram(values: np.ndarray) -> bytes:
    values = np.asarray(values, dtype="<f8")
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ShapeMismatchError("Gram cache holds square matrices only", expected="n x n", actual=values.shape)
    body = _HEADER.pack(MAGIC, VERSION, values.shape[0]) + np.ascontiguousarray(values).tobytes()
    return body + hashlib.sha256(body).digest()


def decode_gram(blob: bytes) -> np.ndarray:
    """
    Parse a cache blob

    Raises:
        ParseError: with the byte offset of the first malformed field
    """

    if len(blob) < _HEADER.size:
        raise ParseError(f"truncated header ({len(blob)} bytes)", offset=len(blob))
    magic, version, n = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r}", offset=0)
    if version != VERSION:
        raise ParseError(f"unsupported cache version {version}", offset=4)

    payload_end = _HEADER.size + 8 * n * n
    if len(blob) != payload_end + _DIGEST_SIZE:
        raise ParseError(
            f"size mismatch: expected {payload_end + _DIGEST_SIZE} bytes for n={n}, got {len(blob)}",
            offset=min(len(blob), payload_end),
        )
    if hashlib.sha256(blob[:payload_end]).digest() != blob[payload_end:]:
        raise ParseError("content hash mismatch", offset=payload_end)

    values = np.frombuffer(blob, dtype="<f8", count=n * n, offset=_HEADER.size).reshape(n, n)
    return values.astype(np.float64)


def write_gram(path: Union[str, Path], values: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = encode_gram(values)
    path.write_bytes(blob)
    logger.info(f"Wrote Gram cache {path}", extra={"n": int(np.shape(values)[0]), "bytes": len(blob)})
    return path


def read_gram(path: Union[str, Path]) -> np.ndarray:
    path = Path(path)
    values = decode_gram(path.read_bytes())
    logger.debug(f"Read Gram cache {path} n={values.shape[0]}")
    return values


def content_digest(path: Union[str, Path]) -> str:
    """Hex SHA-256 trailer of a cache file"""
    return Path(path).read_bytes()[-_DIGEST_SIZE:].hex()
