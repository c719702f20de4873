from typing import Optional

import numpy as np
from faker import Faker

from svad_ntc.channel import awgn, bpsk_modulate, derive_stream
from svad_ntc.constants import MASK64, SPLITMIX_GAMMA
from svad_ntc.convcode import encode_frame
from svad_ntc.types import CodeSpec, ExperimentConfig, LockMode, SoftSequence

MR_SAMPLES = [0.7, 0.8, 0.9, -0.7, -0.7, 0.6, 0.4, -0.8]


def mock_bits(length: int, seed: Optional[int] = None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=length, dtype=np.uint8)


def mock_payload(length: int = 32) -> bytes:
    fake = Faker()
    return fake.binary(length=length)


def mock_symbols(length: int, seed: Optional[int] = None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, size=length, dtype=np.uint8)


def mock_read_back(
    data,
    spec: CodeSpec,
    lock_mode: LockMode,
    sigma: float = 0.0,
    seed: int = 0,
) -> SoftSequence:
    written = bpsk_modulate(
        encode_frame(data, spec, lock_mode), symbol_width=spec.n_outputs
    )
    return awgn(written, sigma, derive_stream(seed, (seed,)))


def mock_experiment(**overrides) -> ExperimentConfig:
    values = {
        "info_bits": 600,
        "ebno_points": (2.0, 6.0),
        "schemes": ("svad", "rs"),
        "master_seed": 11,
    }
    values.update(overrides)
    return ExperimentConfig(**values)


def reference_mix(z: int) -> int:
    """Plain integer SplitMix64 finalizer, kept apart from the library code."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 % (1 << 64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB % (1 << 64)
    return z ^ (z >> 31)


def reference_raw(seed: int, labels, count: int):
    state = seed & MASK64
    for label in labels:
        state = reference_mix(((state ^ label) + SPLITMIX_GAMMA) & MASK64)
    return [
        reference_mix((state + (i + 1) * SPLITMIX_GAMMA) & MASK64)
        for i in range(count)
    ]
