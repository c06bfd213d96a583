from random import Random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvk.errors import DimensionMismatch
from cvk.f3 import (
    TernaryMatrix,
    f3_matmul,
    f3_matvec,
    pack_trits,
    row_stride,
    trit_weight_packed,
    unpack_trits,
)

trit_rows = st.integers(min_value=1, max_value=16)


def _schoolbook_matvec(v, m):
    rows, cols = m.shape
    out = [0] * cols
    for j in range(cols):
        acc = 0
        for i in range(rows):
            acc += int(v[i]) * int(m[i][j])
        out[j] = acc % 3
    return out


@given(st.lists(st.integers(min_value=0, max_value=2), min_size=0, max_size=40))
def test_pack_unpack_roundtrip(trits):
    packed = pack_trits(trits)
    assert len(packed) == row_stride(len(trits))
    assert list(unpack_trits(packed, len(trits))) == trits


def test_unpack_rejects_bad_field():
    with pytest.raises(ValueError):
        unpack_trits(b"\x03", 4)  # 2-bit field holding 3


def test_unpack_rejects_dirty_padding():
    blob = bytes([0b01000000])  # padding trit set
    with pytest.raises(ValueError):
        unpack_trits(blob, 3)


@given(st.lists(st.integers(min_value=0, max_value=2), min_size=0, max_size=64))
def test_weight_matches_naive(trits):
    assert trit_weight_packed(pack_trits(trits)) == sum(1 for t in trits if t)


def test_matrix_validates_payload_length():
    with pytest.raises(ValueError):
        TernaryMatrix(2, 3, b"\x00")


def test_matvec_zero_vector(rng):
    m = TernaryMatrix.random(6, 4, rng)
    assert list(f3_matvec([0] * 6, m)) == [0, 0, 0, 0]


def test_matvec_identity(rng):
    m = TernaryMatrix.identity(5)
    v = [rng.randrange(3) for _ in range(5)]
    assert list(f3_matvec(v, m)) == v


@given(trit_rows, trit_rows, st.data())
def test_matvec_schoolbook_oracle(rows, cols, data):
    rng = Random(data.draw(st.integers(min_value=0, max_value=2**30)))
    m = TernaryMatrix.random(rows, cols, rng)
    v = [rng.randrange(3) for _ in range(rows)]
    assert list(f3_matvec(v, m)) == _schoolbook_matvec(v, m.to_array())


def test_matvec_oracle_at_toy_cap():
    rng = Random(64)
    m = TernaryMatrix.random(64, 64, rng)
    v = [rng.randrange(3) for _ in range(64)]
    assert list(f3_matvec(v, m)) == _schoolbook_matvec(v, m.to_array())


def test_matvec_dimension_mismatch(rng):
    m = TernaryMatrix.random(4, 4, rng)
    with pytest.raises(DimensionMismatch):
        f3_matvec([0] * 5, m)


@given(trit_rows, trit_rows, trit_rows, st.data())
def test_matmul_schoolbook_oracle(a, b, c, data):
    rng = Random(data.draw(st.integers(min_value=0, max_value=2**30)))
    left = TernaryMatrix.random(a, b, rng)
    right = TernaryMatrix.random(b, c, rng)
    got = f3_matmul(left, right).to_array()
    expected = (left.to_array().astype(int) @ right.to_array().astype(int)) % 3
    assert np.array_equal(got, expected)


def test_roundtrip_through_packed_bytes(rng):
    m = TernaryMatrix.random(9, 7, rng)
    again = TernaryMatrix(9, 7, m.data)
    assert again == m
    assert np.array_equal(again.to_array(), m.to_array())
