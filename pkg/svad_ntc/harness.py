"""
Monte Carlo residual-error experiment over the AWGN storage medium.

Every (Eb/N0, scheme, frame) unit draws its data and noise from its own
labelled stream, so results do not depend on scheduling or worker count.
All schemes at one Eb/N0 point share the same data; the convolutional
schemes (`svad`, `soft`, `hard`) also share one noise realization.
"""

from __future__ import annotations

import logging
import math
import time
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .channel import awgn, bpsk_modulate, derive_stream, hard_slice, noise_sigma
from .constants import (
    CONV_SCHEMES,
    CSV_HEADER,
    LOCK_PERIOD,
    PUBLISHED_RESIDUALS,
    ROLE_CONV_NOISE,
    ROLE_DATA,
    ROLE_RS_NOISE,
    ROLE_UNCODED_NOISE,
    SCHEME_ORDER,
)
from .convcode import encode_frame
from .errors import ConfigError, FramingError
from .rs_baseline import pack_bits, rs_decode_many, rs_encode_many, unpack_bits
from .types import (
    DecodeConfig,
    ExperimentConfig,
    NoiseSpec,
    PointResult,
    Scheme,
    SweepTable,
)
from .viterbi import decode_pipeline

logger = logging.getLogger(__name__)

NOISE_ROLES: Dict[str, int] = {
    "svad": ROLE_CONV_NOISE,
    "soft": ROLE_CONV_NOISE,
    "hard": ROLE_CONV_NOISE,
    "rs": ROLE_RS_NOISE,
    "uncoded": ROLE_UNCODED_NOISE,
}


def count_residual(original, decoded) -> int:
    a = np.asarray(original, dtype=np.uint8).reshape(-1)
    b = np.asarray(decoded, dtype=np.uint8).reshape(-1)
    if len(a) != len(b):
        raise FramingError(f"cannot compare {len(a)} bits against {len(b)} bits")
    return int(np.count_nonzero(a != b))


def point_key(ebno_db: float) -> int:
    return int(round(ebno_db * 1000))


def frame_bounds(cfg: ExperimentConfig) -> List[Tuple[int, int]]:
    size = cfg.frame_bits
    return [
        (start, min(start + size, cfg.info_bits))
        for start in range(0, cfg.info_bits, size)
    ]


def effective_rate(cfg: ExperimentConfig, scheme: Scheme) -> float:
    """Data bits per channel symbol for the whole chain of a scheme."""
    if scheme in CONV_SCHEMES:
        rate = cfg.code_spec.rate
        return rate / LOCK_PERIOD if cfg.lock_mode != "none" else rate
    if scheme == "rs":
        return cfg.rs_params.rate
    return 1.0


def point_params(
    cfg: ExperimentConfig, scheme: Scheme, ntc_count: Optional[int] = None
) -> str:
    norm = f"norm={cfg.normalization}"
    if scheme == "rs":
        return f"rs={cfg.rs_params.n}/{cfg.rs_params.k};{norm}"
    if scheme == "uncoded":
        return norm
    dcfg = cfg.decode_config(scheme, ntc_count)
    spec = cfg.code_spec
    params = (
        f"g={spec.octal()};v={spec.constraint_length};lock={cfg.lock_mode};"
        f"ntc={dcfg.ntc_count};{norm};frame={cfg.frame_bits}"
    )
    if dcfg.metric == "hard":
        params += ";metric=hard"
    if dcfg.invert_ntc:
        params += ";ntc_polarity=inverted"
    return params


def frame_data(cfg: ExperimentConfig, ebno_db: float, frame: int, length: int) -> np.ndarray:
    stream = derive_stream(cfg.master_seed, (point_key(ebno_db), frame, ROLE_DATA))
    return stream.bits(length)


def _conv_chain(
    cfg: ExperimentConfig, dcfg: DecodeConfig, data: np.ndarray, sigma: float, stream
) -> np.ndarray:
    spec = cfg.code_spec
    written = bpsk_modulate(encode_frame(data, spec, cfg.lock_mode), symbol_width=spec.n_outputs)
    read = awgn(written, sigma, stream)
    return decode_pipeline(read, spec, dcfg)


def _rs_chain(cfg: ExperimentConfig, data: np.ndarray, sigma: float, stream) -> np.ndarray:
    params = cfg.rs_params
    symbols = pack_bits(data)
    padded = np.zeros(-(-len(symbols) // params.k) * params.k, dtype=np.uint8)
    padded[: len(symbols)] = symbols
    codewords = rs_encode_many(params, padded.reshape(-1, params.k))
    read = awgn(bpsk_modulate(unpack_bits(codewords), symbol_width=1), sigma, stream)
    received = pack_bits(hard_slice(read)).reshape(-1, params.n)
    messages, statuses = rs_decode_many(params, received)
    failures = sum(1 for s in statuses if s.kind == "failure")
    if failures:
        logger.debug("%d of %d RS frames failed", failures, len(statuses))
    return unpack_bits(messages, len(data))


def _uncoded_chain(data: np.ndarray, sigma: float, stream) -> np.ndarray:
    return hard_slice(awgn(bpsk_modulate(data, symbol_width=1), sigma, stream))


def run_point(
    cfg: ExperimentConfig,
    ebno_db: float,
    scheme: Scheme,
    *,
    ntc_count: Optional[int] = None,
    sigma: Optional[float] = None,
) -> PointResult:
    """
    Run one scheme at one Eb/N0 point and count residual errors. `sigma`
    overrides the noise level derived from `ebno_db`.
    """
    if scheme not in SCHEME_ORDER:
        raise ConfigError(f"unknown scheme {scheme!r}", "--schemes")
    started = time.perf_counter()
    if sigma is None:
        sigma = noise_sigma(
            NoiseSpec(
                ebno_db=ebno_db,
                normalization=cfg.normalization,
                code_rate=effective_rate(cfg, scheme),
            )
        )
    dcfg = cfg.decode_config(scheme, ntc_count) if scheme in CONV_SCHEMES else None
    key = point_key(ebno_db)
    residual = 0
    for frame, (start, stop) in enumerate(frame_bounds(cfg)):
        data = frame_data(cfg, ebno_db, frame, stop - start)
        stream = derive_stream(cfg.master_seed, (key, frame, NOISE_ROLES[scheme]))
        if dcfg is not None:
            decoded = _conv_chain(cfg, dcfg, data, sigma, stream)
        elif scheme == "rs":
            decoded = _rs_chain(cfg, data, sigma, stream)
        else:
            decoded = _uncoded_chain(data, sigma, stream)
        errors = count_residual(data, decoded)
        logger.debug(
            "ebno=%g scheme=%s frame=%d bits=%d errors=%d",
            ebno_db,
            scheme,
            frame,
            stop - start,
            errors,
        )
        residual += errors

    elapsed = time.perf_counter() - started
    logger.info(
        "ebno=%g scheme=%s%s residual=%d/%d sigma=%.5f (%.2fs)",
        ebno_db,
        scheme,
        "" if ntc_count is None else f" ntc={ntc_count}",
        residual,
        cfg.info_bits,
        sigma,
        elapsed,
    )
    return PointResult(
        ebno_db=ebno_db,
        scheme=scheme,
        info_bits=cfg.info_bits,
        residual_errors=residual,
        seed=cfg.master_seed,
        params=point_params(cfg, scheme, ntc_count),
        ntc_count=ntc_count,
        elapsed=elapsed,
    )


def run_sweep(cfg: ExperimentConfig, *, max_workers: Optional[int] = 1) -> SweepTable:
    from ._sync.sweep_runner import SyncSweepRunner

    with SyncSweepRunner(cfg, max_workers=max_workers) as runner:
        return runner.run_sweep()


def ntc_study(
    cfg: ExperimentConfig,
    ntc_values: Sequence[int],
    *,
    ebno_points: Optional[Sequence[float]] = None,
    max_workers: Optional[int] = 1,
) -> SweepTable:
    """`svad` residuals for every NTC count, keyed by `PointResult.ntc_count`."""
    from ._sync.sweep_runner import SyncSweepRunner

    with SyncSweepRunner(cfg, max_workers=max_workers) as runner:
        return runner.ntc_study(ntc_values, ebno_points=ebno_points)


def row_label(row: PointResult) -> str:
    return row.label


def emit_csv(table: SweepTable) -> str:
    lines = [CSV_HEADER]
    for row in table.rows:
        lines.append(
            f"{row.ebno_db:g},{row.scheme},{row.info_bits},{row.residual_errors},"
            f"{row.ber:.6g},{row.seed},{row.params}"
        )
    return "\n".join(lines) + "\n"


def _labels(rows: Iterable[PointResult]) -> List[str]:
    seen: Dict[str, Tuple[int, int]] = {}
    for row in rows:
        seen.setdefault(row_label(row), row.sort_key()[1:])
    return sorted(seen, key=lambda label: seen[label])


def emit_dat(table: SweepTable) -> Dict[str, str]:
    """Two-column `ebno residual` text per scheme, ready for plotting tools."""
    columns: Dict[str, List[str]] = {label: [] for label in _labels(table.rows)}
    for row in table.rows:
        columns[row_label(row)].append(f"{row.ebno_db:g} {row.residual_errors}")
    return {label: "\n".join(lines) + "\n" for label, lines in columns.items()}


def format_table(table: SweepTable) -> str:
    """
    Residual errors per Eb/N0 in the layout of the storage-media experiment,
    with the published reference counts next to the matching schemes. The
    references are per 1,000,000 bits.
    """
    labels = _labels(table.rows)
    references = [label for label in labels if label in PUBLISHED_RESIDUALS]
    header = ["Eb/N0 (dB)"] + labels + [f"{label} (ref)" for label in references]
    width = max(12, max(len(h) for h in header) + 2)

    cells: Dict[float, Dict[str, int]] = {}
    for row in table.rows:
        cells.setdefault(row.ebno_db, {})[row_label(row)] = row.residual_errors

    def fmt(value) -> str:
        return "-" if value is None else f"{value:,}"

    lines = ["".join(h.rjust(width) for h in header)]
    ref_totals = {label: 0 for label in references}
    for ebno in sorted(cells):
        values = [fmt(cells[ebno].get(label)) for label in labels]
        for label in references:
            ref = PUBLISHED_RESIDUALS[label].get(ebno)
            if ref is not None:
                ref_totals[label] += ref
            values.append(fmt(ref))
        lines.append(f"{ebno:g}".rjust(width) + "".join(v.rjust(width) for v in values))

    totals = [sum(cells[e].get(label, 0) for e in cells) for label in labels]
    lines.append(
        "Total".rjust(width)
        + "".join(fmt(t).rjust(width) for t in totals)
        + "".join(fmt(ref_totals[label]).rjust(width) for label in references)
    )
    return "\n".join(lines) + "\n"


def ebno_for_ber(rows: Sequence[PointResult], target: float) -> Optional[float]:
    """
    Eb/N0 at which the BER of one scheme first falls to `target`, by
    log-linear interpolation between the bracketing points. `None` when the
    rows never cross the target.
    """
    points = sorted(rows, key=lambda row: row.ebno_db)
    for lo, hi in zip(points, points[1:]):
        if lo.ber >= target > hi.ber or (lo.ber > target and hi.ber == target):
            if hi.ber == target:
                return hi.ebno_db
            if hi.ber == 0.0:
                fraction = (lo.ber - target) / lo.ber
            else:
                fraction = (math.log10(lo.ber) - math.log10(target)) / (
                    math.log10(lo.ber) - math.log10(hi.ber)
                )
            return lo.ebno_db + fraction * (hi.ebno_db - lo.ebno_db)
    return None
