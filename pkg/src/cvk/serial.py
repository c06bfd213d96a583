"""Binary file formats for keys and signatures.

Every file is a 16-byte header followed by a scheme-specific payload:

    magic   4 bytes  b"CVK1"
    scheme  1 byte   0 = Rabin-Williams, 1 = Squirrels, 2 = Wave
    kind    1 byte   0 = PK, 1 = CK, 2 = VK, 3 = SIG, 4 = toy signing key
    tag     2 bytes  instance code, little-endian (0 = toy)
    length  8 bytes  payload bytes, little-endian

Little-endian throughout.  Squirrels residues are signed 32-bit fields
(always non-negative except the implicit final -1, which is never
stored), so PK/VK/CK payload lengths land exactly on the documented
4(n-1)s / 4(n+1)t / 4(s+3)t byte counts.  Wave payloads are packed
trits, rows byte-aligned.
"""

import struct
from dataclasses import dataclass

import numpy as np

from . import squirrels as sq
from . import wave as wv
from .ecrt import EcrtPrecomp, PrimeBasis, default_precision
from .errors import MalformedSignature
from .f3 import TernaryMatrix, row_stride

MAGIC = b"CVK1"
HEADER = struct.Struct("<4sBBHQ")

SCHEME_RW = 0
SCHEME_SQUIRRELS = 1
SCHEME_WAVE = 2

KIND_PK = 0
KIND_CK = 1
KIND_VK = 2
KIND_SIG = 3
KIND_SK = 4  # toy signing key: artifact plumbing for the CLI pipeline

_SQ_TAG_CODES = {"toy": 0, "I": 1, "II": 2, "III": 3, "IV": 4, "V": 5}
_SQ_TAG_NAMES = {v: k for k, v in _SQ_TAG_CODES.items()}


def tag_code(scheme: int, tag: str) -> int:
    if scheme == SCHEME_SQUIRRELS:
        return _SQ_TAG_CODES.get(tag, 0)
    if scheme == SCHEME_WAVE:
        return int(tag) if tag.isdigit() else 0
    return 0


def tag_name(scheme: int, code: int) -> str:
    if scheme == SCHEME_SQUIRRELS:
        return _SQ_TAG_NAMES.get(code, "toy")
    if scheme == SCHEME_WAVE:
        return str(code) if code else "toy"
    return "toy"


@dataclass(frozen=True)
class KeyFileHeader:
    scheme: int
    kind: int
    tag: int
    length: int

    def pack(self) -> bytes:
        return HEADER.pack(MAGIC, self.scheme, self.kind, self.tag, self.length)


def wrap(scheme: int, kind: int, tag: int, payload: bytes) -> bytes:
    return KeyFileHeader(scheme, kind, tag, len(payload)).pack() + payload


def unwrap(blob: bytes, scheme: int, kind: int) -> tuple[KeyFileHeader, bytes]:
    if len(blob) < HEADER.size:
        raise MalformedSignature("file shorter than header")
    magic, got_scheme, got_kind, tag, length = HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise MalformedSignature(f"bad magic {magic!r}")
    if got_scheme != scheme or got_kind != kind:
        raise MalformedSignature(
            f"file holds scheme={got_scheme} kind={got_kind}, "
            f"expected scheme={scheme} kind={kind}"
        )
    payload = blob[HEADER.size :]
    if len(payload) != length:
        raise MalformedSignature(
            f"payload is {len(payload)} bytes, header promises {length}"
        )
    return KeyFileHeader(got_scheme, got_kind, tag, length), payload


def _pack_words(values, fmt: str) -> bytes:
    return b"".join(struct.pack(fmt, int(v)) for v in values)


def _unpack_words(payload: bytes, fmt: str) -> list[int]:
    size = struct.calcsize(fmt)
    if len(payload) % size:
        raise MalformedSignature("payload not a whole number of words")
    return [struct.unpack_from(fmt, payload, i)[0] for i in range(0, len(payload), size)]


# ── Squirrels ────────────────────────────────────────────────────────────


def encode_squirrels_pk(pk: sq.SquirrelsPublicKey, params: sq.SquirrelsParams) -> bytes:
    payload = pk.residues.astype("<i4").tobytes()
    assert len(payload) == sq.pk_bytes(params)
    return wrap(SCHEME_SQUIRRELS, KIND_PK, tag_code(SCHEME_SQUIRRELS, params.tag), payload)


def decode_squirrels_pk(blob: bytes, params: sq.SquirrelsParams) -> sq.SquirrelsPublicKey:
    _, payload = unwrap(blob, SCHEME_SQUIRRELS, KIND_PK)
    expected = sq.pk_bytes(params)
    if len(payload) != expected:
        raise MalformedSignature(f"PK payload {len(payload)} != {expected}")
    arr = np.frombuffer(payload, dtype="<i4").astype(np.int64)
    return sq.SquirrelsPublicKey(arr.reshape(params.n - 1, params.s))


def encode_squirrels_ck(ck: sq.SquirrelsCompressionKey, params: sq.SquirrelsParams) -> bytes:
    t = len(ck.secret_basis)
    parts = [_pack_words(ck.secret_basis.primes, "<i")]
    parts.append(_pack_words(ck.precomp.product_res, "<i"))
    for row in ck.precomp.cofactor_res:
        parts.append(_pack_words(row, "<i"))
    parts.append(_pack_words(ck.inv_delta, "<i"))
    payload = b"".join(parts)
    assert len(payload) == sq.ck_bytes(params, t)
    return wrap(SCHEME_SQUIRRELS, KIND_CK, tag_code(SCHEME_SQUIRRELS, params.tag), payload)


def decode_squirrels_ck(blob: bytes, params: sq.SquirrelsParams) -> sq.SquirrelsCompressionKey:
    # The fixed 4(s+3)t layout has no precision field; transfers rebuilt
    # from a decoded key use the default precision for s, which any valid
    # precision choice is interchangeable with (the one-product ambiguity
    # is absorbed downstream either way).
    _, payload = unwrap(blob, SCHEME_SQUIRRELS, KIND_CK)
    words = _unpack_words(payload, "<i")
    s = params.s
    if len(words) % (s + 3):
        raise MalformedSignature("CK payload does not split into t rows")
    t = len(words) // (s + 3)
    primes = tuple(words[:t])
    product_res = tuple(words[t : 2 * t])
    cof = []
    pos = 2 * t
    for _ in range(t):
        cof.append(tuple(words[pos : pos + s]))
        pos += s
    inv_delta = tuple(words[pos : pos + t])
    basis = PrimeBasis(primes)
    precomp = EcrtPrecomp(
        secret_basis=basis,
        product_res=product_res,
        cofactor_res=tuple(cof),
        precision=default_precision(s),
    )
    return sq.SquirrelsCompressionKey(basis, precomp, inv_delta)


def encode_squirrels_vk(vk: sq.SquirrelsVerificationKey, params: sq.SquirrelsParams) -> bytes:
    t = len(vk.secret_basis)
    parts = [_pack_words(vk.secret_basis.primes, "<i")]
    parts.append(_pack_words(vk.inv_delta, "<i"))
    # Transferred rows, coordinate-major; the final (implicit -1) row is
    # reconstructed on load and not stored.
    parts.append(vk.rows[:, : params.n - 1].T.astype("<i4").tobytes())
    payload = b"".join(parts)
    assert len(payload) == sq.vk_bytes(params, t)
    return wrap(SCHEME_SQUIRRELS, KIND_VK, tag_code(SCHEME_SQUIRRELS, params.tag), payload)


def decode_squirrels_vk(blob: bytes, params: sq.SquirrelsParams) -> sq.SquirrelsVerificationKey:
    _, payload = unwrap(blob, SCHEME_SQUIRRELS, KIND_VK)
    n = params.n
    if len(payload) % (4 * (n + 1)):
        raise MalformedSignature("VK payload does not split into t columns")
    t = len(payload) // (4 * (n + 1))
    primes = tuple(_unpack_words(payload[: 4 * t], "<i"))
    inv_delta = tuple(_unpack_words(payload[4 * t : 8 * t], "<i"))
    body = np.frombuffer(payload[8 * t :], dtype="<i4").astype(np.int64)
    rows = np.empty((t, n), dtype=np.int64)
    rows[:, : n - 1] = body.reshape(n - 1, t).T
    for j, r in enumerate(primes):
        rows[j, n - 1] = r - 1
    return sq.SquirrelsVerificationKey(
        secret_basis=PrimeBasis(primes), inv_delta=inv_delta, rows=rows
    )


def encode_squirrels_sig(sig: sq.SquirrelsSignature, params: sq.SquirrelsParams) -> bytes:
    payload = sig.salt + _pack_words(sig.s_vec, "<h")
    return wrap(SCHEME_SQUIRRELS, KIND_SIG, tag_code(SCHEME_SQUIRRELS, params.tag), payload)


def decode_squirrels_sig(blob: bytes, params: sq.SquirrelsParams) -> sq.SquirrelsSignature:
    _, payload = unwrap(blob, SCHEME_SQUIRRELS, KIND_SIG)
    expected = sq.SALT_BYTES + 2 * params.n
    if len(payload) != expected:
        raise MalformedSignature(f"signature payload {len(payload)} != {expected}")
    salt = payload[: sq.SALT_BYTES]
    coords = tuple(_unpack_words(payload[sq.SALT_BYTES :], "<h"))
    return sq.SquirrelsSignature(salt=salt, s_vec=coords)


def encode_squirrels_sk(secret: sq.ToySquirrelsSecret, params: sq.SquirrelsParams) -> bytes:
    payload = secret.basis.astype("<i8").tobytes()
    return wrap(SCHEME_SQUIRRELS, KIND_SK, tag_code(SCHEME_SQUIRRELS, params.tag), payload)


def decode_squirrels_sk(blob: bytes, params: sq.SquirrelsParams) -> sq.ToySquirrelsSecret:
    _, payload = unwrap(blob, SCHEME_SQUIRRELS, KIND_SK)
    arr = np.frombuffer(payload, dtype="<i8").astype(np.int64)
    basis = arr.reshape(params.n, params.n)
    return sq.ToySquirrelsSecret(basis=basis, inv=np.linalg.inv(basis.astype(float)))


# ── Wave ─────────────────────────────────────────────────────────────────


def _encode_matrix(m: TernaryMatrix) -> bytes:
    return m.data


def _decode_matrix(payload: bytes, rows: int, cols: int) -> TernaryMatrix:
    if len(payload) != rows * row_stride(cols):
        raise MalformedSignature(
            f"matrix payload {len(payload)} != {rows * row_stride(cols)}"
        )
    try:
        return TernaryMatrix(rows, cols, payload)
    except ValueError as exc:
        raise MalformedSignature(str(exc)) from None


def encode_wave_pk(pk: TernaryMatrix, params: wv.WaveParams) -> bytes:
    payload = _encode_matrix(pk)
    assert len(payload) == wv.pk_bytes(params)
    return wrap(SCHEME_WAVE, KIND_PK, tag_code(SCHEME_WAVE, params.tag), payload)


def decode_wave_pk(blob: bytes, params: wv.WaveParams) -> TernaryMatrix:
    _, payload = unwrap(blob, SCHEME_WAVE, KIND_PK)
    return _decode_matrix(payload, params.k, params.redundancy)


def encode_wave_ck(ck: TernaryMatrix, params: wv.WaveParams) -> bytes:
    payload = _encode_matrix(ck)
    assert len(payload) == wv.ck_bytes(params, ck.cols)
    return wrap(SCHEME_WAVE, KIND_CK, tag_code(SCHEME_WAVE, params.tag), payload)


def decode_wave_ck(blob: bytes, params: wv.WaveParams, c: int) -> TernaryMatrix:
    _, payload = unwrap(blob, SCHEME_WAVE, KIND_CK)
    return _decode_matrix(payload, params.redundancy, c)


def encode_wave_vk(vk: wv.WaveVerificationKey, params: wv.WaveParams) -> bytes:
    payload = _encode_matrix(vk.vk_bottom)
    assert len(payload) == wv.vk_bytes(params, vk.c)
    return wrap(SCHEME_WAVE, KIND_VK, tag_code(SCHEME_WAVE, params.tag), payload)


def decode_wave_vk(blob: bytes, params: wv.WaveParams, c: int) -> wv.WaveVerificationKey:
    _, payload = unwrap(blob, SCHEME_WAVE, KIND_VK)
    bottom = _decode_matrix(payload, params.n - c, c)
    return wv.WaveVerificationKey(vk_bottom=bottom, c=c, n=params.n)


def encode_wave_sig(sig: wv.WaveSignature, params: wv.WaveParams) -> bytes:
    payload = sig.salt + sig.s_packed
    return wrap(SCHEME_WAVE, KIND_SIG, tag_code(SCHEME_WAVE, params.tag), payload)


def decode_wave_sig(blob: bytes, params: wv.WaveParams) -> wv.WaveSignature:
    _, payload = unwrap(blob, SCHEME_WAVE, KIND_SIG)
    expected = wv.SALT_BYTES + row_stride(params.n)
    if len(payload) != expected:
        raise MalformedSignature(f"signature payload {len(payload)} != {expected}")
    return wv.WaveSignature(
        salt=payload[: wv.SALT_BYTES], s_packed=payload[wv.SALT_BYTES :], n=params.n
    )


# ── Rabin-Williams ───────────────────────────────────────────────────────


def _encode_biguint(x: int) -> bytes:
    length = max(1, (x.bit_length() + 7) // 8)
    return struct.pack("<I", length) + x.to_bytes(length, "little")


def _decode_biguint(payload: bytes, pos: int) -> tuple[int, int]:
    if pos + 4 > len(payload):
        raise MalformedSignature("truncated integer field")
    (length,) = struct.unpack_from("<I", payload, pos)
    pos += 4
    if pos + length > len(payload):
        raise MalformedSignature("truncated integer field")
    return int.from_bytes(payload[pos : pos + length], "little"), pos + length


def encode_rw_pk(n: int) -> bytes:
    return wrap(SCHEME_RW, KIND_PK, 0, _encode_biguint(n))


def decode_rw_pk(blob: bytes) -> int:
    _, payload = unwrap(blob, SCHEME_RW, KIND_PK)
    n, pos = _decode_biguint(payload, 0)
    if pos != len(payload):
        raise MalformedSignature("trailing bytes in PK")
    return n


def encode_rw_sk(kp) -> bytes:
    payload = _encode_biguint(kp.p) + _encode_biguint(kp.q)
    return wrap(SCHEME_RW, KIND_SK, 0, payload)


def decode_rw_sk(blob: bytes):
    from .rw import RwKeypair

    _, payload = unwrap(blob, SCHEME_RW, KIND_SK)
    p, pos = _decode_biguint(payload, 0)
    q, pos = _decode_biguint(payload, pos)
    if pos != len(payload):
        raise MalformedSignature("trailing bytes in SK")
    return RwKeypair(p=p, q=q)


def encode_rw_ck(ell: int) -> bytes:
    return wrap(SCHEME_RW, KIND_CK, 0, struct.pack("<Q", ell))


def decode_rw_ck(blob: bytes) -> int:
    _, payload = unwrap(blob, SCHEME_RW, KIND_CK)
    if len(payload) != 8:
        raise MalformedSignature("CK payload must be 8 bytes")
    return struct.unpack("<Q", payload)[0]


def encode_rw_vk(vk) -> bytes:
    payload = struct.pack("<QQH", vk.ell, vk.n_ell, vk.n_bits)
    return wrap(SCHEME_RW, KIND_VK, 0, payload)


def decode_rw_vk(blob: bytes):
    from .rw import RwVerificationKey

    _, payload = unwrap(blob, SCHEME_RW, KIND_VK)
    if len(payload) != 18:
        raise MalformedSignature("VK payload must be 18 bytes")
    ell, n_ell, n_bits = struct.unpack("<QQH", payload)
    return RwVerificationKey(ell=ell, n_ell=n_ell, n_bits=n_bits)


def encode_rw_sig(sig) -> bytes:
    payload = (
        struct.pack("<bB", sig.e, sig.f)
        + sig.salt
        + _encode_biguint(sig.s)
        + struct.pack("<b", -1 if sig.t < 0 else 1)
        + _encode_biguint(abs(sig.t))
    )
    return wrap(SCHEME_RW, KIND_SIG, 0, payload)


def decode_rw_sig(blob: bytes):
    from .rw import SALT_BYTES, RwSignature

    _, payload = unwrap(blob, SCHEME_RW, KIND_SIG)
    if len(payload) < 2 + SALT_BYTES:
        raise MalformedSignature("signature payload truncated")
    e, f = struct.unpack_from("<bB", payload, 0)
    salt = payload[2 : 2 + SALT_BYTES]
    s, pos = _decode_biguint(payload, 2 + SALT_BYTES)
    if pos + 1 > len(payload):
        raise MalformedSignature("signature payload truncated")
    (sign,) = struct.unpack_from("<b", payload, pos)
    t_abs, pos = _decode_biguint(payload, pos + 1)
    if pos != len(payload):
        raise MalformedSignature("trailing bytes in signature")
    return RwSignature(e=e, f=f, salt=salt, s=s, t=sign * t_abs)
