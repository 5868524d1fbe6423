"""
graph6 encoding and decoding
"""

import logging
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np

from errors import SpecError

logger = logging.getLogger(__name__)

HEADER = b">>graph6<<"
_SMALL_MAX = 62
_MEDIUM_MAX = 258047
_LARGE_MAX = 68719476735
_WEIGHTS = np.array([32, 16, 8, 4, 2, 1], dtype=np.uint8)


class Graph6Error(SpecError):
    pass


def _encode_size(n: int) -> bytes:
    if n < 0:
        raise Graph6Error("graph6: n must be >= 0")
    if n <= _SMALL_MAX:
        return bytes([n + 63])
    if n <= _MEDIUM_MAX:
        return bytes([126] + [((n >> shift) & 0x3F) + 63 for shift in (12, 6, 0)])
    if n <= _LARGE_MAX:
        return bytes([126, 126] + [((n >> shift) & 0x3F) + 63 for shift in (30, 24, 18, 12, 6, 0)])
    raise Graph6Error(f"graph6: n={n} too large")


def _decode_size(data: bytes):
    """Return (n, offset of the first adjacency byte)."""
    if not data:
        raise Graph6Error("graph6: empty input")
    if not 63 <= data[0] <= 126:
        raise Graph6Error(f"graph6: invalid size byte {data[0]}")
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) >= 2 and data[1] == 126:
        groups, offset = data[2:8], 8
    else:
        groups, offset = data[1:4], 4
    if len(groups) not in (3, 6):
        raise Graph6Error("graph6: truncated size field")
    n = 0
    for byte in groups:
        if not 63 <= byte <= 126:
            raise Graph6Error(f"graph6: invalid size byte {byte}")
        n = (n << 6) | (byte - 63)
    return n, offset


def encode_graph6(adjacency: np.ndarray) -> bytes:
    """Encode a symmetric 0/1 matrix; the upper triangle is read column by column."""
    adjacency = np.asarray(adjacency, dtype=bool)
    n = adjacency.shape[0]
    # (j, i) with j > i in row-major order is the upper triangle in column order
    lower_rows, lower_cols = np.tril_indices(n, -1)
    bits = adjacency[lower_cols, lower_rows].astype(np.uint8)
    pad = (-len(bits)) % 6
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    body = (bits.reshape(-1, 6) @ _WEIGHTS + 63).astype(np.uint8)
    return _encode_size(n) + body.tobytes()


def decode_graph6(data: Union[bytes, str]) -> np.ndarray:
    """Decode one graph6 string into a boolean adjacency matrix."""
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    if data.startswith(HEADER):
        data = data[len(HEADER):]
    n, offset = _decode_size(data)
    body = np.frombuffer(data[offset:], dtype=np.uint8)
    pair_count = n * (n - 1) // 2
    expected = (pair_count + 5) // 6
    if len(body) != expected:
        raise Graph6Error(f"graph6: expected {expected} data bytes for n={n}, got {len(body)}")
    if np.any((body < 63) | (body > 126)):
        raise Graph6Error("graph6: data byte out of range")

    bits = np.unpackbits((body - 63).astype(np.uint8)[:, None], axis=1)[:, 2:].reshape(-1)
    if np.any(bits[pair_count:]):
        raise Graph6Error("graph6: nonzero padding bits")
    adjacency = np.zeros((n, n), dtype=bool)
    lower_rows, lower_cols = np.tril_indices(n, -1)
    adjacency[lower_cols, lower_rows] = bits[:pair_count].astype(bool)
    return adjacency | adjacency.T


def read_graph6(path: Union[str, Path]) -> List[np.ndarray]:
    """Read every graph in a graph6 file (one per line)."""
    matrices = []
    with open(path, "rb") as handle:
        for line_no, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                matrices.append(decode_graph6(line))
            except Graph6Error as e:
                logger.error(f"{path}:{line_no}: {e.message}")
                raise
    if not matrices:
        raise Graph6Error(f"{path}: no graphs found")
    return matrices


def write_graph6(path: Union[str, Path], matrices: Iterable[np.ndarray], header: bool = False) -> None:
    """Write graphs one per line, optionally preceded by the >>graph6<< header."""
    with open(path, "wb") as handle:
        if header:
            handle.write(HEADER)
        for adjacency in matrices:
            handle.write(encode_graph6(adjacency) + b"\n")
