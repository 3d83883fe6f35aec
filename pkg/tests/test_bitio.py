import pytest
from hypothesis import given
from hypothesis import strategies as st

from occkit.bitio import (
    BitReader,
    BitString,
    BitWriter,
    gamma_decode,
    gamma_encode,
    gamma_length,
)
from occkit.errors import BitOverrunError, MalformedCodeError


@pytest.mark.parametrize("k,code", [(1, "1"), (2, "010"), (5, "00101")])
def test_gamma_examples(k, code):
    assert gamma_encode(k).to01() == code


def test_gamma_rejects_zero():
    with pytest.raises(ValueError):
        gamma_encode(0)


@pytest.mark.parametrize("code,k", [("1", 1), ("010", 2)])
def test_gamma_decode_examples(code, k):
    r = BitReader(BitString.from01(code))
    assert gamma_decode(r) == k
    assert r.at_end()


def test_gamma_decode_truncated():
    with pytest.raises(MalformedCodeError):
        gamma_decode(BitReader(BitString.from01("00")))


@given(st.integers(min_value=1, max_value=10**9))
def test_gamma_round_trip(k):
    code = gamma_encode(k)
    assert len(code) == gamma_length(k) == 2 * k.bit_length() - 1
    r = BitReader(code)
    assert gamma_decode(r) == k
    assert r.at_end()


@given(st.lists(st.integers(min_value=1, max_value=500), min_size=1, max_size=8))
def test_gamma_self_delimiting_stream(ks):
    w = BitWriter()
    for k in ks:
        w.write_bitstring(gamma_encode(k))
    r = BitReader(w.getvalue())
    assert [gamma_decode(r) for _ in ks] == ks
    assert r.at_end()


def test_reader_refuses_overrun():
    r = BitReader(BitString.from01("101"))
    assert r.read_bits(3) == 0b101
    with pytest.raises(BitOverrunError):
        r.read_bit()


def test_writer_length_is_exact():
    w = BitWriter()
    w.write_bits(5, 3)
    w.write_bit(1)
    assert len(w) == 4
    assert w.getvalue().to01() == "1011"


def test_bitstring_basics():
    b = BitString.from01("0110")
    assert len(b) == 4
    assert b[1] == 1
    assert b[:2].to01() == "01"
    assert (b + BitString.from01("1")).to01() == "01101"
    assert b.to_int() == 6
    assert BitString.from_int(6, 4) == b
    assert BitString.from_int(0, 0) == BitString()


def test_bitstring_from_int_width_check():
    with pytest.raises(ValueError):
        BitString.from_int(4, 2)
