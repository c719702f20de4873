from __future__ import annotations

import re
from typing import List, Tuple

from .errors import ConfigError

RANGE_REGEX = r"^(-?\d+(?:\.\d+)?)\.\.(-?\d+(?:\.\d+)?)(?::(\d+(?:\.\d+)?))?$"


def reverse_bits(value: int, width: int) -> int:
    """Mirror the lowest `width` bits of `value`."""
    result = 0
    for _ in range(width):
        result = (result << 1) | (value & 1)
        value >>= 1
    return result


def gf2_poly_mod(a: int, b: int) -> int:
    """Remainder of a / b, polynomials over GF(2) packed as integers."""
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def gf2_poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, gf2_poly_mod(a, b)
    return a


def is_monomial(poly: int) -> bool:
    return poly != 0 and poly & (poly - 1) == 0


def parse_generators(text: str, flag: str = "--generators") -> Tuple[int, ...]:
    """Parse a comma separated list of octal tap masks, e.g. ``7,5``."""
    parts = [part.strip() for part in text.split(",")]
    if len(parts) < 2 or not all(parts):
        raise ConfigError(f"{flag} expects at least two octal masks, got {text!r}", flag)
    try:
        return tuple(int(part, 8) for part in parts)
    except ValueError:
        raise ConfigError(f"{flag} expects octal masks, got {text!r}", flag)


def parse_float_list(text: str, flag: str = "--ebno") -> List[float]:
    """
    Parse ``1,2.5,4`` or an inclusive range ``1..11`` with an optional step
    ``0..6:0.5``. Items may be mixed: ``0,2..4``.
    """
    values: List[float] = []
    for item in (part.strip() for part in text.split(",")):
        if not item:
            raise ConfigError(f"{flag} has an empty item in {text!r}", flag)
        match = re.match(RANGE_REGEX, item)
        if match:
            start, stop = float(match.group(1)), float(match.group(2))
            step = float(match.group(3)) if match.group(3) else 1.0
            if step <= 0 or stop < start:
                raise ConfigError(f"{flag} has an empty range {item!r}", flag)
            count = int(round((stop - start) / step))
            values.extend(round(start + i * step, 9) for i in range(count + 1))
            continue
        try:
            values.append(float(item))
        except ValueError:
            raise ConfigError(f"{flag} expects numbers, got {item!r}", flag)
    return values


def parse_int_list(text: str, flag: str) -> List[int]:
    values = parse_float_list(text, flag)
    if any(value != int(value) for value in values):
        raise ConfigError(f"{flag} expects integers, got {text!r}", flag)
    return [int(value) for value in values]


def parse_rs(text: str, flag: str = "--rs") -> Tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{flag} expects n,k, got {text!r}", flag)
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(f"{flag} expects integers n,k, got {text!r}", flag)


def format_bits(bits) -> str:
    return "".join(str(int(b)) for b in bits)
