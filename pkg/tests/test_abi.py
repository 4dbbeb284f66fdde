from __future__ import annotations

import random

import pytest
from abi_oracle import enc_seq, rand_signature
from hypothesis import given, settings
from hypothesis import strategies as st

from decs.decoder import abi
from decs.decoder.abi import (
    AbiError,
    EncodeError,
    InvalidPadding,
    LengthOverflow,
    OffsetOutOfBounds,
    UnsupportedType,
    WordUnderflow,
    decode,
    encode,
    parse_type,
)

# Vectors produced by the eth-abi reference library.
SOLIDITY_DOC_VECTOR = bytes.fromhex(
    "0000000000000000000000000000000000000000000000000000000000000123"
    "0000000000000000000000000000000000000000000000000000000000000080"
    "3132333435363738393000000000000000000000000000000000000000000000"
    "00000000000000000000000000000000000000000000000000000000000000e0"
    "0000000000000000000000000000000000000000000000000000000000000002"
    "0000000000000000000000000000000000000000000000000000000000000456"
    "0000000000000000000000000000000000000000000000000000000000000789"
    "000000000000000000000000000000000000000000000000000000000000000d"
    "48656c6c6f2c20776f726c642100000000000000000000000000000000000000"
)
TUPLE_VECTOR = bytes.fromhex(
    "00" * 31 + "40"
    + "00" * 31 + "01"
    + "00" * 12 + "11" * 20
    + "00" * 31 + "05"
    + "00" * 31 + "60"
    + "00" * 31 + "02"
    + "6162" + "00" * 30
)


def types(*names: str) -> list[abi.AbiType]:
    return [parse_type(n) for n in names]


def test_minimal_static():
    assert decode(types("uint256"), bytes(31) + b"\x01").values == (1,)


def test_address_and_amount_round_trip():
    addr = "0x" + "a1" * 20
    data = encode(types("address", "uint256"), [addr, 10**18])
    assert decode(types("address", "uint256"), data).values == (addr, 10**18)


def test_solidity_doc_vector():
    t = types("uint256", "uint32[]", "bytes10", "bytes")
    vals = [0x123, [0x456, 0x789], b"1234567890", b"Hello, world!"]
    assert encode(t, vals) == SOLIDITY_DOC_VECTOR
    d = decode(t, SOLIDITY_DOC_VECTOR)
    assert d.values == (0x123, [0x456, 0x789], b"1234567890", b"Hello, world!")
    assert d.trailing_bytes == 0


def test_dynamic_tuple_vector():
    t = types("(address,uint256,bytes)", "bool")
    vals = [("0x" + "11" * 20, 5, b"ab"), True]
    assert encode(t, vals) == TUPLE_VECTOR
    assert decode(t, TUPLE_VECTOR).values == (("0x" + "11" * 20, 5, b"ab"), True)


def test_trailing_bytes_reported():
    data = encode(types("uint256"), [7]) + b"\x00" * 5
    assert decode(types("uint256"), data).trailing_bytes == 5


def test_offset_past_end():
    data = bytes(31) + b"\xff"  # offset 255 into a 32-byte buffer
    with pytest.raises(OffsetOutOfBounds):
        decode(types("bytes"), data)


def test_huge_offset():
    with pytest.raises(OffsetOutOfBounds):
        decode(types("bytes"), b"\xff" * 32)


def test_word_underflow():
    with pytest.raises(WordUnderflow):
        decode(types("uint256", "uint256"), bytes(40))


def test_length_overflow():
    data = bytes(31) + b"\x20" + bytes(31) + b"\x40" + bytes(8)
    with pytest.raises(LengthOverflow):
        decode(types("bytes"), data)


def test_array_length_overflow():
    data = bytes(31) + b"\x20" + b"\x7f" + bytes(31)
    with pytest.raises(LengthOverflow):
        decode(types("uint256[]"), data)


@pytest.mark.parametrize(
    "t, word",
    [
        ("address", b"\x01" + bytes(31)),
        ("bool", bytes(31) + b"\x02"),
        ("uint8", bytes(30) + b"\x01\x00"),
        ("bytes2", b"ab\x01" + bytes(29)),
    ],
)
def test_dirty_padding(t, word):
    with pytest.raises(InvalidPadding):
        decode(types(t), word)


@pytest.mark.parametrize("text", ["int256", "uint7", "bytes33", "string", "uint256[3]", "bytes[]", "((uint8))"])
def test_unsupported_types(text):
    with pytest.raises(UnsupportedType):
        parse_type(text)


@pytest.mark.parametrize("t, v", [("uint8", 256), ("uint256", -1), ("bool", 1), ("bytes4", b"abc"), ("address", "0x12")])
def test_encode_rejects(t, v):
    with pytest.raises(EncodeError):
        encode(types(t), [v])


@pytest.mark.parametrize("text", ["uint256", "uint8", "address", "bool", "bytes32", "bytes", "address[]", "(uint256,bytes)"])
def test_type_str_round_trip(text):
    assert str(parse_type(text)) == text


def test_matches_reference_encoder():
    rng = random.Random(11)
    for _ in range(500):
        names, vals = rand_signature(rng)
        assert encode(types(*names), vals) == enc_seq(names, vals), names


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_random_round_trip(seed):
    names, vals = rand_signature(random.Random(seed))
    t = types(*names)
    data = encode(t, vals)
    got = decode(t, data)
    assert got.values == tuple(vals)
    assert got.trailing_bytes == 0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.data())
def test_truncation_gives_typed_error(seed, data):
    names, vals = rand_signature(random.Random(seed))
    t = types(*names)
    blob = encode(t, vals)
    cut = data.draw(st.integers(0, len(blob) - 1))
    with pytest.raises(AbiError):
        decode(t, blob[:cut])


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=256))
def test_garbage_never_crashes(blob):
    t = types("uint256", "address[]", "(address,bytes)", "bytes")
    try:
        decode(t, blob)
    except AbiError:
        pass
