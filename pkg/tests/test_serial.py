import math
from random import Random

import numpy as np
import pytest

from cvk import rw, serial
from cvk import squirrels as sq
from cvk import wave as wv
from cvk.ecrt import PrimeBasis, mod_ecrt_setup
from cvk.errors import MalformedSignature
from cvk.modmath import inv_mod, sample_prime


@pytest.fixture(scope="module")
def sq_world(toy_squirrels):
    pk, params, secret = toy_squirrels
    rng = Random(55)
    ck = sq.ckeygen(params, 2, rng, secret_width=16)
    vk = sq.vkeygen(ck, pk, params)
    sig = sq.toy_sign(secret, b"serial", params, rng)
    return pk, params, secret, ck, vk, sig


@pytest.fixture(scope="module")
def wv_world(toy_wave):
    pk, params = toy_wave
    rng = Random(56)
    ck = wv.wave_ckeygen(params, 4, rng)
    vk = wv.wave_vkeygen(pk, ck, params)
    sig = wv.wave_toy_sign(pk, b"serial", params, rng)
    return pk, params, ck, vk, sig


# ── header ───────────────────────────────────────────────────────────────


def test_header_magic_and_fields():
    blob = serial.wrap(serial.SCHEME_WAVE, serial.KIND_PK, 822, b"abc")
    assert blob[:4] == b"CVK1"
    header, payload = serial.unwrap(blob, serial.SCHEME_WAVE, serial.KIND_PK)
    assert payload == b"abc"
    assert header.tag == 822 and header.length == 3


def test_unwrap_rejects_bad_magic():
    blob = b"XXXX" + bytes(12) + b"p"
    with pytest.raises(MalformedSignature):
        serial.unwrap(blob, 0, 0)


def test_unwrap_rejects_wrong_kind():
    blob = serial.wrap(serial.SCHEME_RW, serial.KIND_PK, 0, b"x")
    with pytest.raises(MalformedSignature):
        serial.unwrap(blob, serial.SCHEME_RW, serial.KIND_VK)


def test_unwrap_rejects_length_mismatch():
    blob = serial.wrap(serial.SCHEME_RW, serial.KIND_PK, 0, b"xyz")[:-1]
    with pytest.raises(MalformedSignature):
        serial.unwrap(blob, serial.SCHEME_RW, serial.KIND_PK)


def test_unwrap_rejects_truncated_header():
    with pytest.raises(MalformedSignature):
        serial.unwrap(b"CVK1", 0, 0)


# ── squirrels round trips and sizes ──────────────────────────────────────


def test_squirrels_pk_roundtrip(sq_world):
    pk, params, *_ = sq_world
    blob = serial.encode_squirrels_pk(pk, params)
    assert len(blob) == serial.HEADER.size + sq.pk_bytes(params)
    again = serial.decode_squirrels_pk(blob, params)
    assert np.array_equal(again.residues, pk.residues)
    assert serial.encode_squirrels_pk(again, params) == blob


def test_squirrels_ck_roundtrip(sq_world):
    _, params, _, ck, _, _ = sq_world
    blob = serial.encode_squirrels_ck(ck, params)
    assert len(blob) == serial.HEADER.size + sq.ck_bytes(params, len(ck.secret_basis))
    again = serial.decode_squirrels_ck(blob, params)
    assert again.secret_basis == ck.secret_basis
    assert again.inv_delta == ck.inv_delta
    assert again.precomp.product_res == ck.precomp.product_res
    assert again.precomp.cofactor_res == ck.precomp.cofactor_res
    assert serial.encode_squirrels_ck(again, params) == blob


def test_squirrels_vk_roundtrip(sq_world):
    _, params, _, _, vk, _ = sq_world
    blob = serial.encode_squirrels_vk(vk, params)
    assert len(blob) == serial.HEADER.size + sq.vk_bytes(params, len(vk.secret_basis))
    again = serial.decode_squirrels_vk(blob, params)
    assert again.secret_basis == vk.secret_basis
    assert np.array_equal(again.rows, vk.rows)
    assert serial.encode_squirrels_vk(again, params) == blob


def test_squirrels_sig_roundtrip(sq_world):
    _, params, _, _, _, sig = sq_world
    blob = serial.encode_squirrels_sig(sig, params)
    again = serial.decode_squirrels_sig(blob, params)
    assert again == sig
    assert serial.encode_squirrels_sig(again, params) == blob


def test_squirrels_sk_roundtrip(sq_world):
    _, params, secret, *_ = sq_world
    blob = serial.encode_squirrels_sk(secret, params)
    again = serial.decode_squirrels_sk(blob, params)
    assert np.array_equal(again.basis, secret.basis)


def test_squirrels_sig_rejects_wrong_length(sq_world):
    _, params, _, _, _, sig = sq_world
    blob = serial.encode_squirrels_sig(sig, params)
    with pytest.raises(MalformedSignature):
        serial.decode_squirrels_sig(blob[:-2], params)


def test_full_scale_ck_vk_payload_sizes():
    # Synthetic basis at the largest level-1 shape: the byte counts are
    # functions of (n, s, t) only, so a sampled basis exercises the real
    # encoders at true size.
    rng = Random(165)
    primes = set()
    while len(primes) < 165:
        primes.add(sample_prime(31, rng, exclude=primes))
    basis = PrimeBasis(tuple(sorted(primes)))
    params = sq.SquirrelsParams(
        n=1034, q=4096, beta_sq=2026590, s=165, tag="I", public_basis=basis
    )
    secret = set()
    while len(secret) < 5:
        secret.add(sample_prime(31, rng, exclude=secret | primes))
    secret_basis = PrimeBasis(tuple(sorted(secret)))
    precomp = mod_ecrt_setup(basis, secret_basis)
    inv_delta = tuple(
        inv_mod(d, r) for d, r in zip(precomp.product_res, secret_basis.primes)
    )
    ck = sq.SquirrelsCompressionKey(secret_basis, precomp, inv_delta)
    ck_blob = serial.encode_squirrels_ck(ck, params)
    assert len(ck_blob) - serial.HEADER.size == 3360

    rows = np.empty((5, 1034), dtype=np.int64)
    for j, r in enumerate(secret_basis.primes):
        rows[j] = np.array([Random(j).randrange(r) for _ in range(1034)])
        rows[j, -1] = r - 1
    vk = sq.SquirrelsVerificationKey(secret_basis, inv_delta, rows)
    vk_blob = serial.encode_squirrels_vk(vk, params)
    assert len(vk_blob) - serial.HEADER.size == 20700
    assert serial.decode_squirrels_vk(vk_blob, params).secret_basis == secret_basis


# ── wave round trips and sizes ───────────────────────────────────────────


def test_wave_pk_roundtrip(wv_world):
    pk, params, *_ = wv_world
    blob = serial.encode_wave_pk(pk, params)
    assert len(blob) == serial.HEADER.size + wv.pk_bytes(params)
    assert serial.decode_wave_pk(blob, params) == pk


def test_wave_ck_roundtrip(wv_world):
    _, params, ck, _, _ = wv_world
    blob = serial.encode_wave_ck(ck, params)
    assert serial.decode_wave_ck(blob, params, ck.cols) == ck


def test_wave_vk_roundtrip(wv_world):
    _, params, _, vk, _ = wv_world
    blob = serial.encode_wave_vk(vk, params)
    assert len(blob) == serial.HEADER.size + wv.vk_bytes(params, vk.c)
    again = serial.decode_wave_vk(blob, params, vk.c)
    assert again.vk_bottom == vk.vk_bottom
    assert serial.encode_wave_vk(again, params) == blob


def test_wave_vk_payload_matches_quarter_formula():
    # byte-aligned c: stored payload is exactly c(n-c)/4 bytes
    params = wv.WaveParams(n=40, k=20, w=27, tag="toy")
    rng = Random(77)
    pk = wv.wave_toy_keygen(params, rng)
    ck = wv.wave_ckeygen(params, 8, rng)
    vk = wv.wave_vkeygen(pk, ck, params)
    blob = serial.encode_wave_vk(vk, params)
    assert len(blob) - serial.HEADER.size == 8 * (params.n - 8) // 4


def test_wave_sig_roundtrip(wv_world):
    _, params, _, _, sig = wv_world
    blob = serial.encode_wave_sig(sig, params)
    again = serial.decode_wave_sig(blob, params)
    assert again == sig
    assert serial.encode_wave_sig(again, params) == blob


def test_wave_sig_rejects_truncation(wv_world):
    _, params, _, _, sig = wv_world
    blob = serial.encode_wave_sig(sig, params)
    with pytest.raises(MalformedSignature):
        serial.decode_wave_sig(blob[:-1], params)


def test_wave_pk_rejects_invalid_trits(wv_world):
    pk, params, *_ = wv_world
    blob = bytearray(serial.encode_wave_pk(pk, params))
    blob[serial.HEADER.size] = 0xFF  # four fields of 3
    with pytest.raises(MalformedSignature):
        serial.decode_wave_pk(bytes(blob), params)


# ── rabin-williams round trips ───────────────────────────────────────────


def test_rw_roundtrips():
    rng = Random(31)
    kp = rw.rw_keygen(96, rng)
    sig = rw.rw_sign(kp, b"serial", rng)
    ell = rw.rw_ckeygen(20, rng)
    vk = rw.rw_vkeygen(ell, kp.n)

    assert serial.decode_rw_pk(serial.encode_rw_pk(kp.n)) == kp.n
    assert serial.decode_rw_sk(serial.encode_rw_sk(kp)) == kp
    assert serial.decode_rw_ck(serial.encode_rw_ck(ell)) == ell
    assert serial.decode_rw_vk(serial.encode_rw_vk(vk)) == vk
    assert serial.decode_rw_sig(serial.encode_rw_sig(sig)) == sig


def test_rw_sig_negative_t_roundtrip():
    rng = Random(32)
    kp = rw.rw_keygen(96, rng)
    sig = None
    for i in range(50):
        candidate = rw.rw_sign(kp, b"neg %d" % i, rng)
        if candidate.t < 0:
            sig = candidate
            break
    assert sig is not None
    assert serial.decode_rw_sig(serial.encode_rw_sig(sig)) == sig


def test_rw_sig_rejects_trailing_bytes():
    rng = Random(33)
    kp = rw.rw_keygen(96, rng)
    sig = rw.rw_sign(kp, b"trail", rng)
    blob = serial.encode_rw_sig(sig)
    broken = blob[: serial.HEADER.size - 8]
    broken += (len(blob) - serial.HEADER.size + 1).to_bytes(8, "little")
    broken += blob[serial.HEADER.size :] + b"\x00"
    with pytest.raises(MalformedSignature):
        serial.decode_rw_sig(broken)
