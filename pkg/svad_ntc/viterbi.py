"""
Soft and hard decision Viterbi decoding over a locked trellis, extended with
Non-Transmittable Codewords (NTCs).

NTCs are known symbol pairs appended to the read-back sequence at the decoder
only. The decoder runs a few extra trellis steps over them with free inputs
and discards whatever those steps decode.

Locked trellises are decoded lock-aware: at the two lock positions of every
data triple only the lock input is allowed, and once more than `m`
transitions have been taken the excluded states are pruned. The exhaustive
oracle enumerates exactly the same legal input set.
"""

from __future__ import annotations

import logging
from typing import List, Tuple

import numpy as np

from .channel import hard_slice
from .constants import DECODE_CHUNK_STEPS, LOCK_BITS, LOCK_PERIOD, ORACLE_MAX_FREE_STEPS
from .convcode import build_trellis, lock_strip
from .errors import ChannelError, ConfigError, FramingError, OracleLimitError
from .types import (
    CodeSpec,
    DecodeConfig,
    DecodeResult,
    LockMode,
    Metric,
    SoftSequence,
    Trellis,
)

logger = logging.getLogger(__name__)


def branch_metric(received, expected_bits, metric: Metric = "soft") -> float:
    """
    Distance between one received symbol and the expected output bits.

    `soft` is the squared Euclidean distance to the BPSK voltages of the
    expected bits, `hard` the Hamming distance after slicing.
    """
    samples = np.asarray(received, dtype=np.float64).reshape(-1)
    bits = np.asarray(expected_bits, dtype=np.uint8).reshape(-1)
    if np.isnan(samples).any():
        raise ChannelError("received symbol holds a NaN sample")
    if len(samples) != len(bits):
        raise FramingError(
            f"received symbol has {len(samples)} samples, expected {len(bits)}"
        )
    total = 0.0
    if metric == "hard":
        for r, b in zip(samples, bits):
            total += float((r >= 0.0) != b)
        return total
    for r, b in zip(samples, bits):
        total += (float(r) - (2.0 * float(b) - 1.0)) ** 2
    return total


def ntc_level(lock_mode: LockMode, invert: bool = False) -> float:
    """Voltage of every NTC sample: +1 for the lower lock, -1 for the higher."""
    level = 1.0 if lock_mode == "lower" else -1.0
    return -level if invert else level


def append_ntc(
    seq: SoftSequence,
    lock_mode: LockMode,
    n: int,
    *,
    invert: bool = False,
) -> SoftSequence:
    if n < 0:
        raise ConfigError(f"NTC count must not be negative, got {n}", "--ntc")
    if n == 0:
        return seq
    if lock_mode == "none":
        raise ConfigError("NTCs are only defined for locked encoders", "--ntc")
    tail = np.full(n * seq.symbol_width, ntc_level(lock_mode, invert))
    return SoftSequence(
        samples=np.concatenate([seq.samples, tail]),
        symbol_width=seq.symbol_width,
    )


def _check_inputs(trellis: Trellis, seq: SoftSequence, cfg: DecodeConfig) -> None:
    if cfg.lock_mode != trellis.lock_mode:
        raise ConfigError(
            f"decoder lock mode {cfg.lock_mode!r} does not match the trellis "
            f"lock mode {trellis.lock_mode!r}",
            "--lock",
        )
    if seq.symbol_width != trellis.n_outputs:
        raise FramingError(
            f"symbol width {seq.symbol_width} does not match a rate "
            f"1/{trellis.n_outputs} code"
        )
    if cfg.ntc_count > seq.steps:
        raise FramingError(
            f"{cfg.ntc_count} NTC steps requested on a sequence of {seq.steps} steps"
        )


def _step_values(seq: SoftSequence, cfg: DecodeConfig) -> np.ndarray:
    """Per-step received values, sliced to bits for the hard metric."""
    values = seq.samples.reshape(-1, seq.symbol_width)
    if cfg.metric == "hard":
        return hard_slice(seq).reshape(-1, seq.symbol_width)
    return values


def _chunk_metrics(values: np.ndarray, expected: np.ndarray, metric: Metric) -> np.ndarray:
    """
    Branch metrics of `values` (steps, W) against `expected` (..., W) bit
    patterns, accumulated one output bit at a time.
    """
    width = values.shape[1]
    shape = (values.shape[0],) + expected.shape[:-1]
    bm = np.zeros(shape, dtype=np.float64)
    extra = (None,) * (expected.ndim - 1)
    for w in range(width):
        column = values[(slice(None), w) + extra]
        if metric == "hard":
            bm += (column != expected[..., w]).astype(np.float64)
        else:
            bm += (column - (2.0 * expected[..., w] - 1.0)) ** 2
    return bm


def viterbi_decode(trellis: Trellis, seq: SoftSequence, cfg: DecodeConfig) -> DecodeResult:
    """
    Add-compare-select over the whole frame followed by a full traceback.

    Ties in compare-select go to the lower predecessor state; the traceback
    starts at the lowest-indexed state of minimum metric. The last
    `cfg.ntc_count` steps are NTC steps and are returned separately in
    `ntc_input_bits`.
    """
    _check_inputs(trellis, seq, cfg)
    m = trellis.memory
    states = trellis.state_count
    steps = seq.steps
    data_steps = steps - cfg.ntc_count
    locked = trellis.lock_mode != "none"

    metrics = np.zeros(states, dtype=np.float64)
    if cfg.start_state_forced:
        metrics[1:] = np.inf
    if steps == 0:
        end_state = int(np.argmin(metrics))
        return DecodeResult(
            decoded_input_bits=np.zeros(0, dtype=np.uint8),
            final_metric=float(metrics[end_state]),
            end_state=end_state,
        )

    next_states = np.arange(states)
    pred0 = (next_states << 1) & (states - 1)
    pred1 = pred0 | 1
    input_bit = next_states >> (m - 1)
    # expected[ns, j]: output of the transition from predecessor j into ns
    expected = np.stack(
        [trellis.outputs[pred0, input_bit], trellis.outputs[pred1, input_bit]],
        axis=1,
    )
    excluded = np.zeros(states, dtype=bool)
    excluded[list(trellis.excluded_states)] = True
    lock_ok = input_bit == LOCK_BITS[trellis.lock_mode] if locked else None

    values = _step_values(seq, cfg)
    take1 = np.zeros((steps, states), dtype=bool)
    chunk = max(1, DECODE_CHUNK_STEPS // (2 * states))
    for start in range(0, steps, chunk):
        stop = min(start + chunk, steps)
        bm = _chunk_metrics(values[start:stop], expected, cfg.metric)
        if locked:
            t = np.arange(start, stop)
            forced = (t < data_steps) & (t % LOCK_PERIOD != 0)
            bm[forced] = np.where(lock_ok[:, None], bm[forced], np.inf)
            pruned = t + 1 > m
            bm[pruned] = np.where(excluded[:, None], np.inf, bm[pruned])
        for i in range(stop - start):
            c0 = metrics[pred0] + bm[i, :, 0]
            c1 = metrics[pred1] + bm[i, :, 1]
            pick = c1 < c0
            take1[start + i] = pick
            metrics = np.where(pick, c1, c0)

    end_state = int(np.argmin(metrics))
    final_metric = float(metrics[end_state])
    inputs = np.zeros(steps, dtype=np.uint8)
    state = end_state
    for t in range(steps - 1, -1, -1):
        inputs[t] = state >> (m - 1)
        state = ((state << 1) & (states - 1)) | int(take1[t, state])

    logger.debug(
        "decoded %d steps (%d NTC) over %d states, metric %.6g, end state %d",
        steps,
        cfg.ntc_count,
        states,
        final_metric,
        end_state,
    )
    return DecodeResult(
        decoded_input_bits=inputs[:data_steps],
        final_metric=final_metric,
        end_state=end_state,
        ntc_input_bits=inputs[data_steps:],
    )


def ml_oracle_decode(trellis: Trellis, seq: SoftSequence, cfg: DecodeConfig) -> DecodeResult:
    """
    Exhaustive maximum-likelihood decoding, for testing the Viterbi decoder.

    Every legal input sequence is enumerated in lexicographic order (free
    data steps and NTC steps vary, lock steps hold the lock bit) and the
    first minimizer wins.
    """
    _check_inputs(trellis, seq, cfg)
    if not cfg.start_state_forced:
        raise ConfigError("the oracle needs a forced start state")
    m = trellis.memory
    steps = seq.steps
    data_steps = steps - cfg.ntc_count
    locked = trellis.lock_mode != "none"
    lock = LOCK_BITS.get(trellis.lock_mode, 0)

    free_steps: List[int] = [
        t
        for t in range(steps)
        if not locked or t >= data_steps or t % LOCK_PERIOD == 0
    ]
    free_count = len(free_steps)
    if free_count > ORACLE_MAX_FREE_STEPS:
        raise OracleLimitError(
            f"{free_count} free steps exceed the oracle limit of "
            f"{ORACLE_MAX_FREE_STEPS}",
            free_count,
        )
    position = {t: k for k, t in enumerate(free_steps)}
    candidates = np.arange(1 << free_count, dtype=np.int64)

    def column(t: int) -> np.ndarray:
        if t in position:
            return ((candidates >> (free_count - 1 - position[t])) & 1).astype(np.int64)
        return np.full(len(candidates), lock, dtype=np.int64)

    values = _step_values(seq, cfg)
    excluded = np.zeros(trellis.state_count, dtype=bool)
    excluded[list(trellis.excluded_states)] = True
    state = np.zeros(len(candidates), dtype=np.int64)
    cost = np.zeros(len(candidates), dtype=np.float64)
    alive = np.ones(len(candidates), dtype=bool)
    for t in range(steps):
        x = column(t)
        out = trellis.outputs[state, x]
        bm = np.zeros(len(candidates), dtype=np.float64)
        for w in range(values.shape[1]):
            if cfg.metric == "hard":
                bm += (values[t, w] != out[:, w]).astype(np.float64)
            else:
                bm += (values[t, w] - (2.0 * out[:, w] - 1.0)) ** 2
        cost = cost + bm
        state = trellis.next_state[state, x]
        if locked and t + 1 > m:
            alive &= ~excluded[state]

    cost = np.where(alive, cost, np.inf)
    best = int(np.argmin(cost))
    inputs = np.array([column(t)[best] for t in range(steps)], dtype=np.uint8)
    return DecodeResult(
        decoded_input_bits=inputs[:data_steps],
        final_metric=float(cost[best]),
        end_state=int(state[best]),
        ntc_input_bits=inputs[data_steps:],
    )


def path_metric(
    trellis: Trellis,
    seq: SoftSequence,
    input_bits,
    metric: Metric = "soft",
) -> float:
    """Re-walk an input path from S0 and sum its branch metrics."""
    bits = np.asarray(input_bits, dtype=np.uint8).reshape(-1)
    values = seq.samples.reshape(-1, seq.symbol_width)
    if len(bits) != len(values):
        raise FramingError(f"{len(bits)} inputs for {len(values)} received steps")
    state = 0
    total = 0.0
    for x, received in zip(bits, values):
        total += branch_metric(received, trellis.outputs[state, int(x)], metric)
        state = int(trellis.next_state[state, int(x)])
    return total


def decode_frame(
    seq: SoftSequence, spec: CodeSpec, cfg: DecodeConfig
) -> Tuple[np.ndarray, DecodeResult]:
    """Read side of the storage pipeline, keeping the decoder result."""
    if seq.symbol_width != spec.n_outputs:
        raise FramingError(
            f"symbol width {seq.symbol_width} does not match a rate "
            f"1/{spec.n_outputs} code"
        )
    trellis = build_trellis(spec, cfg.lock_mode)
    extended = append_ntc(seq, cfg.lock_mode, cfg.ntc_count, invert=cfg.invert_ntc)
    result = viterbi_decode(trellis, extended, cfg)
    bits = result.decoded_input_bits
    if cfg.lock_mode == "none":
        if spec.flush:
            if len(bits) < spec.memory:
                raise FramingError("frame is shorter than its flush bits")
            bits = bits[: len(bits) - spec.memory]
        return bits.copy(), result
    return lock_strip(bits, cfg.lock_mode), result


def decode_pipeline(seq: SoftSequence, spec: CodeSpec, cfg: DecodeConfig) -> np.ndarray:
    """append_ntc, viterbi_decode and lock_strip; returns the data bits."""
    bits, _ = decode_frame(seq, spec, cfg)
    return bits
