"""Full and compressed verification for Wave-shape ternary-code
signatures.

A public key is the non-identity block R of a parity-check matrix
(I | R)^T over F3; a signature is a fixed-weight vector whose syndrome
matches the hashed message.  The compressed verifier multiplies the
parity-check matrix once by a secret (n-k) x c projection and afterwards
tests c ternary coordinates instead of n-k, accepting a forged syndrome
with probability 3^-c.

Key generation and trapdoor signing for real Wave are out of scope; the
toy signer solves the identity block directly, which is enough to
exercise both verifiers end to end.
"""

import hashlib
import logging
import math
from dataclasses import dataclass
from random import Random

import numpy as np

from .errors import DimensionMismatch, MalformedSignature, ResampleLimit
from .f3 import TernaryMatrix, f3_matmul, row_stride, trit_weight_packed, unpack_trits
from .opcount import OpCounter

logger = logging.getLogger(__name__)

SALT_BYTES = 16
MAX_TOY_LENGTH = 64
LOG2_3 = math.log2(3)

# Named instances: code length, dimension, signature weight.  Wave822's
# triple is published; the k = n/2 rate carries over to the larger
# instances and their lengths follow from the published key sizes, with
# weights scaled at Wave822's w/n ratio.
_NAMED = {
    "822": (8576, 4288, 7668, 128),
    "1249": (12544, 6272, 11216, 192),
    "1644": (16512, 8256, 14764, 256),
}

WAVE_TAGS = tuple(_NAMED)


@dataclass(frozen=True)
class WaveParams:
    n: int
    k: int
    w: int
    tag: str
    classical_bits: int | None = None

    def __post_init__(self):
        if not 0 < self.k < self.n:
            raise ValueError("need 0 < k < n")
        if not 0 < self.w <= self.n:
            raise ValueError("need 0 < w <= n")

    @property
    def redundancy(self) -> int:
        """n - k, the syndrome length."""
        return self.n - self.k


def named_params(tag: str) -> WaveParams:
    if tag not in _NAMED:
        raise ValueError(f"unknown Wave instance {tag!r}")
    n, k, w, lam = _NAMED[tag]
    return WaveParams(n=n, k=k, w=w, tag=tag, classical_bits=lam)


@dataclass(frozen=True)
class WaveSignature:
    """Full-length (non-truncated) signature: compressed verification
    needs every coordinate, so truncated encodings are rejected."""

    salt: bytes
    s_packed: bytes
    n: int

    def __post_init__(self):
        if len(self.s_packed) != row_stride(self.n):
            raise MalformedSignature(
                f"packed payload {len(self.s_packed)} bytes, expected "
                f"{row_stride(self.n)} for {self.n} trits"
            )
        try:
            unpack_trits(self.s_packed, self.n)
        except ValueError as exc:
            raise MalformedSignature(str(exc)) from None

    @classmethod
    def from_trits(cls, salt: bytes, trits) -> "WaveSignature":
        arr = np.asarray(trits, dtype=np.uint8)
        from .f3 import pack_trits

        return cls(salt=salt, s_packed=pack_trits(arr), n=arr.size)

    def trits(self) -> np.ndarray:
        return unpack_trits(self.s_packed, self.n)

    def weight(self) -> int:
        return trit_weight_packed(self.s_packed)


@dataclass(eq=False)
class WaveVerificationKey:
    """Bottom n-c rows of the projected parity-check matrix; the top c
    rows are an identity block and are never stored."""

    vk_bottom: TernaryMatrix
    c: int
    n: int

    def __post_init__(self):
        if self.vk_bottom.shape != (self.n - self.c, self.c):
            raise ValueError(
                f"stored block is {self.vk_bottom.shape}, expected "
                f"{(self.n - self.c, self.c)}"
            )


def hash_to_trits(message: bytes, salt: bytes, length: int) -> np.ndarray:
    """Deterministic hash of salt||message to F3^length.

    XOF output is consumed two bits at a time with the value 3 rejected,
    so each kept symbol is uniform over {0, 1, 2}.
    """
    xof = hashlib.shake_128(salt + message)
    out = np.empty(length, dtype=np.uint8)
    filled = 0
    nbytes = max(16, (length * 2) // 3)
    offset = 0
    buf = xof.digest(nbytes)
    while filled < length:
        if offset >= len(buf):
            nbytes *= 2
            buf = xof.digest(nbytes)
        byte = buf[offset]
        offset += 1
        for shift in (0, 2, 4, 6):
            v = (byte >> shift) & 3
            if v < 3:
                out[filled] = v
                filled += 1
                if filled == length:
                    break
    return out


def _signature_trits(sig: WaveSignature, params: WaveParams) -> np.ndarray:
    if sig.n != params.n:
        raise MalformedSignature(f"signature length {sig.n} != code length {params.n}")
    return sig.trits()


def wave_verify(
    sig: WaveSignature,
    message: bytes,
    pk: TernaryMatrix,
    params: WaveParams,
    counter: OpCounter | None = None,
) -> bool:
    """Weight gate, then the syndrome check t (I | R)^T = 0 with
    t = s - (hash | 0)."""
    nk = params.redundancy
    if pk.shape != (params.k, nk):
        raise DimensionMismatch(f"public key is {pk.shape}, expected {(params.k, nk)}")
    s = _signature_trits(sig, params)
    if sig.weight() != params.w:
        return False
    h = hash_to_trits(message, sig.salt, nk)
    t = s.astype(np.int64)
    t[:nk] -= h
    t %= 3
    syndrome = (t[:nk] + t[nk:] @ pk.to_array().astype(np.int64)) % 3
    if counter is not None:
        counter.add(muls=params.k * nk, reductions=nk)
    return not syndrome.any()


def wave_ckeygen(params: WaveParams, c: int, rng: Random) -> TernaryMatrix:
    """Secret projection in systematic form: identity on top, uniform
    below, hence full rank c by construction."""
    nk = params.redundancy
    if not 0 < c <= nk:
        raise ValueError(f"compression dimension must be in (0, {nk}], got {c}")
    block = np.zeros((nk, c), dtype=np.uint8)
    block[:c] = np.eye(c, dtype=np.uint8)
    for i in range(c, nk):
        for j in range(c):
            block[i, j] = rng.randrange(3)
    return TernaryMatrix.from_array(block)


def wave_vkeygen(
    pk: TernaryMatrix, compression: TernaryMatrix, params: WaveParams
) -> WaveVerificationKey:
    """Project the parity-check matrix: full key is (C ; R C), and the
    systematic top block of C makes the first c rows an identity, so
    only the bottom n-c rows are kept."""
    nk = params.redundancy
    if pk.shape != (params.k, nk):
        raise DimensionMismatch(f"public key is {pk.shape}, expected {(params.k, nk)}")
    if compression.rows != nk:
        raise DimensionMismatch(
            f"projection has {compression.rows} rows, expected {nk}"
        )
    c = compression.cols
    projected = f3_matmul(pk, compression)  # R C, shape k x c
    c_arr = compression.to_array()
    if not np.array_equal(c_arr[:c], np.eye(c, dtype=np.uint8)):
        raise ValueError("projection matrix must be systematic (identity top block)")
    bottom = np.vstack([c_arr[c:], projected.to_array()])
    return WaveVerificationKey(
        vk_bottom=TernaryMatrix.from_array(bottom), c=c, n=params.n
    )


def wave_cverify(
    sig: WaveSignature,
    message: bytes,
    vk: WaveVerificationKey,
    params: WaveParams,
    counter: OpCounter | None = None,
) -> bool:
    """Weight gate, then the c-coordinate projected syndrome check,
    reconstructing the implicit identity rows."""
    if vk.n != params.n:
        raise DimensionMismatch(f"key length {vk.n} != code length {params.n}")
    nk = params.redundancy
    s = _signature_trits(sig, params)
    if sig.weight() != params.w:
        return False
    h = hash_to_trits(message, sig.salt, nk)
    t = s.astype(np.int64)
    t[:nk] -= h
    t %= 3
    c = vk.c
    folded = (t[:c] + t[c:] @ vk.vk_bottom.to_array().astype(np.int64)) % 3
    if counter is not None:
        counter.add(muls=(params.n - c) * c, reductions=c)
    return not folded.any()


def wave_choose_c(target_mu: float) -> tuple[int, float]:
    """Byte-aligned compression dimension nearest target/log2(3);
    returns (c, achieved exponent c*log2(3))."""
    if target_mu <= 0:
        raise ValueError("target security exponent must be positive")
    c = 8 * max(1, round(target_mu / (8 * LOG2_3)))
    return c, c * LOG2_3


def wave_toy_keygen(params: WaveParams, rng: Random) -> TernaryMatrix:
    """Uniform random public key at desk scale."""
    if params.n > MAX_TOY_LENGTH:
        raise ValueError(f"toy keygen capped at n <= {MAX_TOY_LENGTH}")
    return TernaryMatrix.random(params.k, params.redundancy, rng)


def wave_toy_sign(
    pk: TernaryMatrix,
    message: bytes,
    params: WaveParams,
    rng: Random,
    max_retries: int = 5000,
) -> WaveSignature:
    """Solve the identity block directly: draw the last k coordinates,
    derive the first n-k from the hash, retry salts until the weight
    gate is met.  Stands in for the trapdoor decoder, which is out of
    scope."""
    if params.n > MAX_TOY_LENGTH:
        raise ValueError(f"toy signing capped at n <= {MAX_TOY_LENGTH}")
    nk = params.redundancy
    r_arr = pk.to_array().astype(np.int64)
    for attempt in range(1, max_retries + 1):
        salt = rng.randbytes(SALT_BYTES)
        h = hash_to_trits(message, salt, nk).astype(np.int64)
        tail = np.fromiter(
            (rng.randrange(3) for _ in range(params.k)), dtype=np.int64, count=params.k
        )
        head = (h - tail @ r_arr) % 3
        s = np.concatenate([head, tail]).astype(np.uint8)
        if int(np.count_nonzero(s)) == params.w:
            logger.debug("toy sign: hit weight %d after %d salts", params.w, attempt)
            return WaveSignature.from_trits(salt, s)
    raise ResampleLimit(f"no weight-{params.w} signature after {max_retries} salts")


def pk_trits(params: WaveParams) -> int:
    return params.k * params.redundancy


def pk_bytes(params: WaveParams) -> int:
    """Our packed serialization: four trits per byte, rows byte-aligned."""
    return params.k * row_stride(params.redundancy)


def vk_stored_trits(params: WaveParams, c: int) -> int:
    """Trit payload of the stored verification-key block."""
    return c * (params.n - c)


def vk_bytes(params: WaveParams, c: int) -> int:
    return (params.n - c) * row_stride(c)


def ck_bytes(params: WaveParams, c: int) -> int:
    return params.redundancy * row_stride(c)


def verify_cost(params: WaveParams) -> tuple[int, int]:
    """(trit multiplications, lane reductions) of the product phase."""
    nk = params.redundancy
    return params.k * nk, nk


def cverify_cost(params: WaveParams, c: int) -> tuple[int, int]:
    return (params.n - c) * c, c
