"""
Binary feed-forward convolutional codes and the locked encoder.

A locked encoder follows every data bit with two known lock bits, `00` for
the lower lock and `11` for the higher lock. The lock bits keep part of the
state space unreachable, which the decoder prunes.
"""

from __future__ import annotations

from functools import lru_cache
from typing import FrozenSet, Set

import numpy as np

from .constants import LOCK_BITS, LOCK_PERIOD
from .errors import FramingError
from .types import CodeSpec, LockMode, Trellis


def as_bits(bits) -> np.ndarray:
    array = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if array.size and array.max() > 1:
        raise FramingError("bit sequences may only hold 0 and 1")
    return array


def _parity(value: int) -> int:
    return bin(value).count("1") & 1


def _steady_states(spec: CodeSpec, lock_mode: LockMode) -> Set[int]:
    """
    States occupied once the register holds only locked-stream inputs. After
    m transitions the state is the last m inputs, so the three phases right
    after that cover every steady-state occupancy.
    """
    lock = LOCK_BITS[lock_mode]
    m = spec.memory
    current = {0}
    seen: Set[int] = set()
    for step in range(m + LOCK_PERIOD):
        inputs = (0, 1) if step % LOCK_PERIOD == 0 else (lock,)
        current = {(x << (m - 1)) | (s >> 1) for s in current for x in inputs}
        if step + 1 > m:
            seen |= current
    return seen


def excluded_states(spec: CodeSpec, lock_mode: LockMode) -> FrozenSet[int]:
    if lock_mode == "none":
        return frozenset()
    return frozenset(set(range(spec.state_count)) - _steady_states(spec, lock_mode))


@lru_cache(maxsize=64)
def build_trellis(spec: CodeSpec, lock_mode: LockMode = "none") -> Trellis:
    """
    Tabulate every transition of the encoder. The register vector for state
    `s` and input `x` is `(x << m) | s`; each output bit is the parity of the
    register masked with one generator.
    """
    m = spec.memory
    next_state = np.zeros((spec.state_count, 2), dtype=np.int64)
    outputs = np.zeros((spec.state_count, 2, spec.n_outputs), dtype=np.uint8)
    for s in range(spec.state_count):
        for x in (0, 1):
            register = (x << m) | s
            next_state[s, x] = register >> 1
            for j, g in enumerate(spec.generators):
                outputs[s, x, j] = _parity(register & g)
    next_state.setflags(write=False)
    outputs.setflags(write=False)
    return Trellis(
        spec=spec,
        lock_mode=lock_mode,
        next_state=next_state,
        outputs=outputs,
        excluded_states=excluded_states(spec, lock_mode),
    )


def conv_encode(spec: CodeSpec, input_bits) -> np.ndarray:
    """
    Encode from the all-zero state. Output symbols are interleaved, one bit
    per generator for every input bit.
    """
    bits = as_bits(input_bits)
    m = spec.memory
    padded = np.concatenate([np.zeros(m, dtype=np.uint8), bits])
    n = len(bits)
    out = np.zeros((n, spec.n_outputs), dtype=np.uint8)
    for j, g in enumerate(spec.generators):
        for delay in range(m + 1):
            if g >> (m - delay) & 1:
                out[:, j] ^= padded[m - delay : m - delay + n]
    return out.reshape(-1)


def lock_insert(data_bits, mode: LockMode) -> np.ndarray:
    bits = as_bits(data_bits)
    if mode == "none":
        return bits.copy()
    locked = np.full((len(bits), LOCK_PERIOD), LOCK_BITS[mode], dtype=np.uint8)
    locked[:, 0] = bits
    return locked.reshape(-1)


def lock_strip(locked_bits, mode: LockMode) -> np.ndarray:
    bits = as_bits(locked_bits)
    if mode == "none":
        return bits.copy()
    if len(bits) % LOCK_PERIOD:
        raise FramingError(
            f"locked stream of {len(bits)} bits is not a multiple of {LOCK_PERIOD}"
        )
    return bits[::LOCK_PERIOD].copy()


def encode_frame(data_bits, spec: CodeSpec, lock_mode: LockMode) -> np.ndarray:
    """Write side of the storage pipeline, ready for modulation."""
    bits = lock_insert(data_bits, lock_mode)
    if lock_mode == "none" and spec.flush:
        bits = np.concatenate([bits, np.zeros(spec.memory, dtype=np.uint8)])
    return conv_encode(spec, bits)


def trellis_dump(trellis: Trellis) -> str:
    spec = trellis.spec
    lines = [
        f"code: v={spec.constraint_length} generators={spec.octal()} "
        f"rate=1/{spec.n_outputs} lock={trellis.lock_mode}",
        f"catastrophic: {'yes' if spec.catastrophic else 'no'}",
    ]
    for s, x, nxt, out in trellis.transitions():
        lines.append(
            f"{trellis.state_label(s)} --{x}--> {trellis.state_label(nxt)} "
            f"out={''.join(str(b) for b in out)}"
        )
    excluded = sorted(trellis.excluded_states)
    lines.append(
        "excluded: "
        + (", ".join(trellis.state_label(s) for s in excluded) if excluded else "none")
    )
    return "\n".join(lines) + "\n"
