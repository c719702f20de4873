"""
BPSK modulation, the AWGN storage-medium model and the hard slicer.

Noise comes from a counter-based SplitMix64 stream so that every table is
reproducible bit-for-bit, whatever the worker count:

- label absorption, starting from ``s = seed mod 2**64``:
  ``s = mix((s ^ label) + GAMMA)`` for each label in order;
- output ``i`` (from 0) is ``mix(s + (i + 1) * GAMMA)``;
- uniforms are ``(raw >> 11) * 2**-53``;
- normals use the basic Box-Muller transform on consecutive uniform pairs
  ``(u1, u2)``: ``r = sqrt(-2 ln(1 - u1))``, emitting ``r cos(2 pi u2)`` then
  ``r sin(2 pi u2)``.
"""

from __future__ import annotations

import math
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .constants import MASK64, SPLITMIX_GAMMA, SPLITMIX_MUL1, SPLITMIX_MUL2
from .errors import ChannelError
from .types import NoiseSpec, SoftSequence

_GAMMA = np.uint64(SPLITMIX_GAMMA)
_MUL1 = np.uint64(SPLITMIX_MUL1)
_MUL2 = np.uint64(SPLITMIX_MUL2)
_S30, _S27, _S31 = np.uint64(30), np.uint64(27), np.uint64(31)
_S11, _S63 = np.uint64(11), np.uint64(63)


def splitmix_mix(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * SPLITMIX_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX_MUL2) & MASK64
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    return z ^ (z >> _S31)


class RngStream(BaseModel):
    """
    A position-addressable stream of 64-bit outputs. Copying it to a worker
    copies the whole stream.
    """

    model_config = ConfigDict(frozen=True)

    master_seed: int
    labels: Tuple[int, ...] = ()
    state: int

    def raw(self, count: int, start: int = 0) -> np.ndarray:
        if count <= 0:
            return np.zeros(0, dtype=np.uint64)
        counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        return _mix_array(np.uint64(self.state) + counters * _GAMMA)

    def uniforms(self, count: int, start: int = 0) -> np.ndarray:
        return (self.raw(count, start) >> _S11).astype(np.float64) * 2.0**-53

    def normals(self, count: int, start_pair: int = 0) -> np.ndarray:
        """Standard normal deviates, two per uniform pair, in order."""
        if count <= 0:
            return np.zeros(0, dtype=np.float64)
        pairs = (count + 1) // 2
        u = self.uniforms(2 * pairs, 2 * start_pair)
        radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
        theta = 2.0 * np.pi * u[1::2]
        out = np.empty(2 * pairs, dtype=np.float64)
        out[0::2] = radius * np.cos(theta)
        out[1::2] = radius * np.sin(theta)
        return out[:count]

    def bits(self, count: int, start: int = 0) -> np.ndarray:
        """Random data bits, the top bit of each raw output."""
        return (self.raw(count, start) >> _S63).astype(np.uint8)


def derive_stream(master_seed: int, labels: Sequence[int] = ()) -> RngStream:
    state = master_seed & MASK64
    for label in labels:
        state = splitmix_mix(((state ^ (label & MASK64)) + SPLITMIX_GAMMA) & MASK64)
    return RngStream(master_seed=master_seed, labels=tuple(labels), state=state)


def bpsk_modulate(bits, *, symbol_width: int = 1) -> SoftSequence:
    """Bit 1 is written as +1 V, bit 0 as -1 V."""
    array = np.asarray(bits, dtype=np.float64).reshape(-1)
    return SoftSequence(samples=2.0 * array - 1.0, symbol_width=symbol_width)


def hard_slice(seq: SoftSequence) -> np.ndarray:
    """Threshold at 0 V; a sample of exactly 0 reads as 1."""
    samples = seq.samples if isinstance(seq, SoftSequence) else np.asarray(seq, dtype=np.float64)
    if np.isnan(samples).any():
        raise ChannelError("cannot slice a NaN sample")
    return (samples >= 0.0).astype(np.uint8)


def noise_sigma(spec: NoiseSpec) -> float:
    ebno = 10.0 ** (spec.ebno_db / 10.0)
    if spec.normalization == "info":
        return math.sqrt(1.0 / (2.0 * spec.code_rate * ebno))
    return math.sqrt(1.0 / (2.0 * ebno))


def awgn(seq: SoftSequence, sigma: float, rng: RngStream) -> SoftSequence:
    if not sigma >= 0.0 or not math.isfinite(sigma):
        raise ChannelError(f"sigma must be finite and non-negative, got {sigma}")
    if sigma == 0.0:
        return seq
    noisy = seq.samples + sigma * rng.normals(len(seq.samples))
    return SoftSequence(samples=noisy, symbol_width=seq.symbol_width)
