"""
Binary containers for the simulated storage medium.

- NTCF bit file: ``b"NTCF"``, version byte, bit count (u64 LE), bits packed
  MSB-first with the final byte zero-padded.
- NTCS sample file: ``b"NTCS"``, version byte, sample count (u64 LE),
  samples as IEEE-754 float32 LE.
- Manifest: ``key=value`` text lines written next to a sample file.
"""

from __future__ import annotations

import struct
from typing import Dict, Mapping

import numpy as np

from .constants import BIT_FILE_MAGIC, FORMAT_VERSION, SAMPLE_FILE_MAGIC
from .errors import FileFormatError

_HEADER = struct.Struct("<4sBQ")


def _read_header(data: bytes, magic: bytes) -> int:
    if len(data) < _HEADER.size:
        raise FileFormatError(f"file of {len(data)} bytes is too short for a header")
    found, version, count = _HEADER.unpack_from(data)
    if found != magic:
        raise FileFormatError(f"bad magic {found!r}, expected {magic!r}")
    if version != FORMAT_VERSION:
        raise FileFormatError(f"unsupported format version {version}")
    return count


def is_bit_file(data: bytes) -> bool:
    return data[: len(BIT_FILE_MAGIC)] == BIT_FILE_MAGIC


def encode_bit_file(bits) -> bytes:
    array = np.asarray(bits, dtype=np.uint8).reshape(-1)
    header = _HEADER.pack(BIT_FILE_MAGIC, FORMAT_VERSION, len(array))
    return header + np.packbits(array).tobytes()


def decode_bit_file(data: bytes) -> np.ndarray:
    count = _read_header(data, BIT_FILE_MAGIC)
    payload = data[_HEADER.size :]
    if len(payload) != -(-count // 8):
        raise FileFormatError(
            f"bit file declares {count} bits but carries {len(payload)} payload bytes"
        )
    return np.unpackbits(np.frombuffer(payload, dtype=np.uint8))[:count]


def encode_sample_file(samples) -> bytes:
    array = np.asarray(samples, dtype="<f4").reshape(-1)
    return _HEADER.pack(SAMPLE_FILE_MAGIC, FORMAT_VERSION, len(array)) + array.tobytes()


def decode_sample_file(data: bytes) -> np.ndarray:
    count = _read_header(data, SAMPLE_FILE_MAGIC)
    payload = data[_HEADER.size :]
    if len(payload) != 4 * count:
        raise FileFormatError(
            f"sample file declares {count} samples but carries {len(payload)} bytes"
        )
    samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    if not np.all(np.isfinite(samples)):
        raise FileFormatError("sample file holds non-finite samples")
    return samples


def encode_manifest(values: Mapping[str, object]) -> bytes:
    lines = []
    for key, value in values.items():
        text = str(value)
        if "=" in key or "\n" in key or "\n" in text:
            raise FileFormatError(f"manifest entry {key!r} cannot be written")
        lines.append(f"{key}={text}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def decode_manifest(data: bytes) -> Dict[str, str]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise FileFormatError("manifest is not valid UTF-8")
    values: Dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise FileFormatError(f"manifest line {number} is not key=value: {line!r}")
        values[key.strip()] = value.strip()
    return values
