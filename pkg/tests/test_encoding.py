import pytest
from hypothesis import given, strategies as st

from firstkit.encoding import bytes_to_int, decode, decode_seq, encode, encode_seq, int_to_bytes

fields = st.one_of(st.binary(max_size=40), st.text(max_size=20), st.integers(0, 2**300))


def test_int_bytes_minimal():
    assert int_to_bytes(0) == b"\x00"
    assert int_to_bytes(255) == b"\xff"
    assert int_to_bytes(256) == b"\x01\x00"
    with pytest.raises(ValueError):
        int_to_bytes(-1)


def test_layout_is_length_prefixed():
    assert encode("ab", 1) == b"\x00\x00\x00\x02ab\x00\x00\x00\x01\x01"


def test_field_boundaries_matter():
    assert encode("ab", "c") != encode("a", "bc")


def test_bool_rejected():
    with pytest.raises(TypeError):
        encode(True)


@given(st.lists(fields, max_size=8))
def test_round_trip(items):
    raw = decode(encode(*items))
    assert len(raw) == len(items)
    for r, item in zip(raw, items):
        if isinstance(item, int):
            assert bytes_to_int(r) == item
        elif isinstance(item, str):
            assert r.decode() == item
        else:
            assert r == item


@given(st.lists(st.binary(max_size=10), max_size=5))
def test_seq_round_trip(items):
    assert decode_seq(encode_seq(items)) == items


def test_truncation_detected():
    data = encode(b"hello", b"world")
    for cut in range(1, len(data)):
        try:
            out = decode(data[:cut])
        except ValueError:
            continue
        assert out != [b"hello", b"world"]
