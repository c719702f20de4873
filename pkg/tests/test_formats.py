import struct

import numpy as np
import pytest

from svad_ntc.errors import FileFormatError
from svad_ntc.formats import (
    decode_bit_file,
    decode_manifest,
    decode_sample_file,
    encode_bit_file,
    encode_manifest,
    encode_sample_file,
    is_bit_file,
)

from .utils import mock_bits, mock_payload


def test_bit_file_layout():
    data = encode_bit_file([1, 0, 1, 0, 1, 0, 1, 0, 1])
    assert data[:4] == b"NTCF"
    assert data[4] == 1
    assert struct.unpack_from("<Q", data, 5)[0] == 9
    assert data[13:] == bytes([0xAA, 0x80])
    assert is_bit_file(data)
    assert not is_bit_file(mock_payload(3))


def test_bit_file_keeps_bit_count():
    for length in (0, 1, 7, 8, 9, 1001):
        bits = mock_bits(length, seed=length)
        assert np.array_equal(decode_bit_file(encode_bit_file(bits)), bits)


def test_bit_file_rejects_bad_headers():
    with pytest.raises(FileFormatError, match=r"too short"):
        decode_bit_file(b"NTCF")
    with pytest.raises(FileFormatError, match=r"bad magic"):
        decode_bit_file(b"XXXX" + bytes(9))
    bad_version = bytearray(encode_bit_file([1]))
    bad_version[4] = 9
    with pytest.raises(FileFormatError, match=r"version"):
        decode_bit_file(bytes(bad_version))


def test_bit_file_rejects_truncated_payload():
    data = encode_bit_file(mock_bits(20, seed=1))
    with pytest.raises(FileFormatError, match=r"declares 20 bits") as exc:
        decode_bit_file(data[:-1])
    assert exc.value.code == "file_format"


def test_sample_file_layout():
    data = encode_sample_file([0.5, -1.25])
    assert data[:4] == b"NTCS"
    assert struct.unpack("<ff", data[13:]) == (0.5, -1.25)
    assert list(decode_sample_file(data)) == [0.5, -1.25]


def test_sample_file_is_float32():
    samples = np.array([0.1, -0.7, 1.0 / 3.0])
    decoded = decode_sample_file(encode_sample_file(samples))
    assert np.allclose(decoded, samples, rtol=1e-6)
    assert decoded.dtype == np.float64


def test_sample_file_rejects_non_finite_and_short_files():
    with pytest.raises(FileFormatError, match=r"non-finite"):
        decode_sample_file(encode_sample_file([1.0, np.nan]))
    with pytest.raises(FileFormatError, match=r"declares 2 samples"):
        decode_sample_file(encode_sample_file([1.0, 2.0])[:-2])
    with pytest.raises(FileFormatError, match=r"bad magic"):
        decode_sample_file(encode_bit_file([1, 0]))


def test_manifest():
    data = encode_manifest({"lock": "lower", "ntc": 6, "generators": "7,5"})
    assert data == b"lock=lower\nntc=6\ngenerators=7,5\n"
    assert decode_manifest(data) == {"lock": "lower", "ntc": "6", "generators": "7,5"}


def test_manifest_skips_comments_and_blank_lines():
    data = b"# written by hand\n\n lock = higher \nsigma=0.5\n"
    assert decode_manifest(data) == {"lock": "higher", "sigma": "0.5"}


def test_manifest_errors():
    with pytest.raises(FileFormatError, match=r"line 2"):
        decode_manifest(b"lock=lower\nnot a pair\n")
    with pytest.raises(FileFormatError, match=r"UTF-8"):
        decode_manifest(b"\xff\xfe")
    with pytest.raises(FileFormatError, match=r"cannot be written"):
        encode_manifest({"a=b": 1})
