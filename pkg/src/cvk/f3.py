"""Packed linear algebra over F3.

Trits are stored four to a byte in 2-bit fields, least significant field
first, rows padded to a byte boundary.  The 2-bit layout (rather than
five trits per byte in base 243) keeps extraction branch-free in the
verification hot loop; weight is a popcount-style scan over the packed
limbs, no tables.

Arithmetic unpacks to numpy uint8 lanes; matrices memoize the unpacked
view, so repeated products against a fixed key pay the unpacking once.
"""

from functools import cached_property
from random import Random

import numpy as np

from .errors import DimensionMismatch

TRITS_PER_BYTE = 4


def row_stride(cols: int) -> int:
    """Packed bytes per row."""
    return (cols + TRITS_PER_BYTE - 1) // TRITS_PER_BYTE


def pack_trits(values) -> bytes:
    """Pack a trit sequence, 2-bit fields LSB-first, padding zeroed."""
    arr = np.asarray(values, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("pack_trits takes a flat sequence")
    if arr.size and arr.max() > 2:
        raise ValueError("trits must lie in {0, 1, 2}")
    padded = np.zeros(row_stride(arr.size) * TRITS_PER_BYTE, dtype=np.uint8)
    padded[: arr.size] = arr
    lanes = padded.reshape(-1, TRITS_PER_BYTE)
    packed = lanes[:, 0] | (lanes[:, 1] << 2) | (lanes[:, 2] << 4) | (lanes[:, 3] << 6)
    return packed.astype(np.uint8).tobytes()


def unpack_trits(data: bytes, count: int) -> np.ndarray:
    """Inverse of pack_trits; validates fields and zero padding."""
    raw = np.frombuffer(data, dtype=np.uint8)
    if raw.size != row_stride(count):
        raise ValueError(f"expected {row_stride(count)} bytes for {count} trits")
    lanes = np.empty((raw.size, TRITS_PER_BYTE), dtype=np.uint8)
    for k in range(TRITS_PER_BYTE):
        lanes[:, k] = (raw >> (2 * k)) & 3
    flat = lanes.reshape(-1)
    if flat.size and flat.max() > 2:
        raise ValueError("invalid 2-bit field (value 3) in packed trits")
    if np.any(flat[count:]):
        raise ValueError("nonzero padding in packed trits")
    return flat[:count].copy()


def trit_weight_packed(data: bytes) -> int:
    """Number of nonzero trits, scanned on the packed limbs.

    A field is nonzero iff either of its bits is set: OR the limb with
    itself shifted right once, mask the low lane bits, popcount.
    """
    x = int.from_bytes(data, "little")
    mask = int.from_bytes(b"\x55" * len(data), "little")
    return ((x | (x >> 1)) & mask).bit_count()


class TernaryMatrix:
    """A rows x cols matrix over F3 in packed row-major storage.

    Immutable after construction; the unpacked uint8 view is cached.
    """

    def __init__(self, rows: int, cols: int, data: bytes):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        stride = row_stride(cols)
        if len(data) != rows * stride:
            raise ValueError(
                f"payload is {len(data)} bytes, expected {rows * stride} "
                f"for {rows}x{cols}"
            )
        self.rows = rows
        self.cols = cols
        self.data = bytes(data)
        for i in range(rows):
            unpack_trits(self.data[i * stride : (i + 1) * stride], cols)

    @classmethod
    def from_array(cls, arr) -> "TernaryMatrix":
        arr = np.asarray(arr, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("from_array takes a 2-D array")
        chunks = [pack_trits(row) for row in arr]
        return cls(arr.shape[0], arr.shape[1], b"".join(chunks))

    @classmethod
    def random(cls, rows: int, cols: int, rng: Random) -> "TernaryMatrix":
        arr = np.fromiter(
            (rng.randrange(3) for _ in range(rows * cols)),
            dtype=np.uint8,
            count=rows * cols,
        ).reshape(rows, cols)
        return cls.from_array(arr)

    @classmethod
    def identity(cls, n: int) -> "TernaryMatrix":
        return cls.from_array(np.eye(n, dtype=np.uint8))

    @cached_property
    def _array(self) -> np.ndarray:
        stride = row_stride(self.cols)
        out = np.empty((self.rows, self.cols), dtype=np.uint8)
        for i in range(self.rows):
            out[i] = unpack_trits(self.data[i * stride : (i + 1) * stride], self.cols)
        out.setflags(write=False)
        return out

    def to_array(self) -> np.ndarray:
        return self._array

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def weight(self) -> int:
        return trit_weight_packed(self.data)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TernaryMatrix)
            and self.shape == other.shape
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        return f"TernaryMatrix({self.rows}x{self.cols})"


def f3_matvec(v, m: TernaryMatrix) -> np.ndarray:
    """Row vector times matrix over F3; exact, lane-safe in int64."""
    vec = np.asarray(v, dtype=np.int64)
    if vec.ndim != 1 or vec.size != m.rows:
        raise DimensionMismatch(f"vector of length {vec.size} vs {m.rows} rows")
    if vec.size and (vec.min() < 0 or vec.max() > 2):
        raise ValueError("trits must lie in {0, 1, 2}")
    return ((vec @ m.to_array().astype(np.int64)) % 3).astype(np.uint8)


def f3_matmul(a: TernaryMatrix, b: TernaryMatrix) -> TernaryMatrix:
    """Matrix product over F3."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.shape} @ {b.shape}")
    prod = (a.to_array().astype(np.int64) @ b.to_array().astype(np.int64)) % 3
    return TernaryMatrix.from_array(prod.astype(np.uint8))
