from __future__ import annotations

from typing import Dict, Optional, Tuple

from .version import __version__

USER_AGENT = f"svad-ntc/{__version__}"

# Convolutional codes. Masks are octal, most significant bit taps the
# current input.
CODE_PRESETS: Dict[str, Tuple[int, Tuple[int, ...]]] = {
    "standard": (3, (0o7, 0o5)),
    "worked-example": (3, (0o6, 0o5)),
}
DEFAULT_PRESET = "standard"
MIN_CONSTRAINT_LENGTH = 2
MAX_CONSTRAINT_LENGTH = 16
LOCK_BITS: Dict[str, int] = {"lower": 0, "higher": 1}
LOCK_PERIOD = 3  # data bit followed by two lock bits

# Decoder
DEFAULT_NTC_COUNT = 6
MAX_NTC_COUNT = 64
ORACLE_MAX_FREE_STEPS = 20
DECODE_CHUNK_STEPS = 1 << 16

# Reed-Solomon over GF(2^8)
GF_PRIMITIVE_POLY = 0x11D
GF_GENERATOR = 2
GF_ORDER = 255
RS_FIRST_ROOT = 1
DEFAULT_RS = (255, 223)

# SplitMix64
MASK64 = (1 << 64) - 1
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_MUL1 = 0xBF58476D1CE4E5B9
SPLITMIX_MUL2 = 0x94D049BB133111EB

# Stream roles, last element of every label path
ROLE_DATA = 0
ROLE_CONV_NOISE = 1
ROLE_RS_NOISE = 2
ROLE_UNCODED_NOISE = 3
ROLE_FILE_NOISE = 4

# Experiment defaults
DEFAULT_INFO_BITS = 1_000_000
DEFAULT_EBNO_POINTS: Tuple[float, ...] = tuple(float(x) for x in range(1, 12))
SCHEME_ORDER: Tuple[str, ...] = ("svad", "soft", "hard", "rs", "uncoded")
CONV_SCHEMES = frozenset({"svad", "soft", "hard"})
CSV_HEADER = "ebno_db,scheme,info_bits,residual_errors,ber,seed,params"

# Residual errors per 1e6 bits reported for the storage-media experiment.
# The 0 dB row has no reference value.
PUBLISHED_RESIDUALS: Dict[str, Dict[float, Optional[int]]] = {
    "rs": {
        0.0: None,
        1.0: 78933,
        2.0: 56335,
        3.0: 37208,
        4.0: 22744,
        5.0: 12274,
        6.0: 6035,
        7.0: 2350,
        8.0: 760,
        9.0: 212,
        10.0: 22,
        11.0: 5,
    },
    "svad": {
        0.0: None,
        1.0: 13972,
        2.0: 6352,
        3.0: 2548,
        4.0: 786,
        5.0: 197,
        6.0: 41,
        7.0: 4,
        8.0: 0,
        9.0: 0,
        10.0: 0,
        11.0: 0,
    },
}

# Storage formats
BIT_FILE_MAGIC = b"NTCF"
SAMPLE_FILE_MAGIC = b"NTCS"
FORMAT_VERSION = 0x01
MANIFEST_SUFFIX = ".manifest"

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DATA_FORMAT = 3
