"""
Command-line entry point.

    svad-ntc encode data.bin data.ntcs
    svad-ntc corrupt data.ntcs noisy.ntcs --ebno 4 --seed 7
    svad-ntc decode noisy.ntcs restored.bin
    svad-ntc sweep --schemes svad,rs --ebno 1..11 --out table.csv
    svad-ntc ntc-study --ebno 3 --ntc-values 0..8
    svad-ntc trellis-dump --preset worked-example

Exit codes: 0 ok, 1 usage, 2 I/O, 3 data format.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from ._sync.storage import SyncFileStorage, SyncSupportedStorage
from .channel import awgn, bpsk_modulate, derive_stream, noise_sigma
from .constants import (
    CODE_PRESETS,
    DEFAULT_INFO_BITS,
    DEFAULT_NTC_COUNT,
    DEFAULT_PRESET,
    DEFAULT_RS,
    EXIT_DATA_FORMAT,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    FORMAT_VERSION,
    LOCK_PERIOD,
    MANIFEST_SUFFIX,
    ROLE_FILE_NOISE,
    SCHEME_ORDER,
)
from .convcode import build_trellis, encode_frame, trellis_dump
from .errors import (
    ChannelError,
    ConfigError,
    FileFormatError,
    FramingError,
    SvadNtcError,
    SweepPointError,
)
from .formats import (
    decode_bit_file,
    decode_manifest,
    decode_sample_file,
    encode_bit_file,
    encode_manifest,
    encode_sample_file,
    is_bit_file,
)
from .harness import emit_csv, emit_dat, format_table, ntc_study, run_sweep
from .helpers import parse_float_list, parse_generators, parse_int_list, parse_rs
from .types import (
    CodeSpec,
    DecodeConfig,
    ExperimentConfig,
    NoiseSpec,
    RsParams,
    SoftSequence,
)
from .version import __version__
from .viterbi import decode_frame

logger = logging.getLogger(__name__)

LOCK_CHOICES = ("lower", "higher", "none")


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage problems as `ConfigError` instead of exiting."""

    def error(self, message: str):
        raise ConfigError(message)


def _add_code_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--generators",
        help="octal tap masks, e.g. 7,5 (default 7,5)",
    )
    group.add_argument("--preset", choices=sorted(CODE_PRESETS))
    parser.add_argument("--lock", choices=LOCK_CHOICES)
    parser.add_argument("--ntc", type=int, help=f"NTC count (default {DEFAULT_NTC_COUNT})")


def _add_experiment_flags(parser: argparse.ArgumentParser, ebno: str) -> None:
    _add_code_flags(parser)
    parser.add_argument("--bits", type=int, default=DEFAULT_INFO_BITS)
    parser.add_argument("--ebno", default=ebno, help="dB list or range, e.g. 1..11")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--normalization", choices=("symbol", "info"), default="symbol")
    parser.add_argument("--rs", default=f"{DEFAULT_RS[0]},{DEFAULT_RS[1]}")
    parser.add_argument("--frame-bits", type=int)
    parser.add_argument("--invert-ntc", action="store_true")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "dat"), default="csv")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="svad-ntc",
        description="Locked convolutional coding with SVAD-NTC decoding over a simulated storage medium.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    commands = parser.add_subparsers(dest="command", required=True)

    encode = commands.add_parser("encode", help="write data bits as BPSK samples")
    encode.add_argument("input")
    encode.add_argument("output")
    encode.add_argument(
        "--input-format",
        choices=("auto", "raw", "ntcf"),
        default="auto",
        help="auto reads inputs starting with NTCF as bit files",
    )
    _add_code_flags(encode)

    corrupt = commands.add_parser("corrupt", help="add storage-medium noise")
    corrupt.add_argument("input")
    corrupt.add_argument("output")
    level = corrupt.add_mutually_exclusive_group(required=True)
    level.add_argument("--sigma", type=float)
    level.add_argument("--ebno", type=float)
    corrupt.add_argument("--seed", type=int, default=0)
    corrupt.add_argument("--normalization", choices=("symbol", "info"), default="symbol")

    decode = commands.add_parser("decode", help="read samples back into data bits")
    decode.add_argument("input")
    decode.add_argument("output")
    _add_code_flags(decode)
    decode.add_argument("--metric", choices=("soft", "hard"), default="soft")
    decode.add_argument("--invert-ntc", action="store_true")
    decode.add_argument("--output-format", choices=("ntcf", "raw"))
    decode.add_argument("--no-manifest", action="store_true")

    sweep = commands.add_parser("sweep", help="residual errors per Eb/N0 and scheme")
    _add_experiment_flags(sweep, "1..11")
    sweep.add_argument("--schemes", default="svad,rs")

    study = commands.add_parser("ntc-study", help="residual errors per NTC count")
    _add_experiment_flags(study, "3")
    study.add_argument("--ntc-values", default="0..8")

    dump = commands.add_parser("trellis-dump", help="print the encoder trellis")
    _add_code_flags(dump)
    return parser


def _read(storage: SyncSupportedStorage, key: str) -> bytes:
    data = storage.get_item(key)
    if data is None:
        raise FileNotFoundError(f"cannot read {key}")
    return data


def _read_manifest(storage: SyncSupportedStorage, key: str) -> Dict[str, str]:
    data = storage.get_item(key + MANIFEST_SUFFIX)
    return decode_manifest(data) if data is not None else {}


def _resolve_code(args, manifest: Dict[str, str]) -> CodeSpec:
    if args.generators:
        generators = parse_generators(args.generators)
        return CodeSpec(
            constraint_length=max(g.bit_length() for g in generators),
            generators=generators,
        )
    if args.preset:
        return CodeSpec.preset(args.preset)
    if "generators" in manifest:
        try:
            generators = parse_generators(manifest["generators"], "manifest")
            length = int(manifest.get("constraint_length", 0)) or max(
                g.bit_length() for g in generators
            )
        except (ConfigError, ValueError) as e:
            raise FileFormatError(f"manifest has a malformed code: {e}")
        return CodeSpec(constraint_length=length, generators=generators)
    return CodeSpec.preset(DEFAULT_PRESET)


def _resolve_lock(args, manifest: Dict[str, str]) -> str:
    lock = args.lock or manifest.get("lock", "lower")
    if lock not in LOCK_CHOICES:
        raise FileFormatError(f"manifest has an unknown lock mode {lock!r}")
    return lock


def _resolve_ntc(args, manifest: Dict[str, str], lock: str) -> int:
    if args.ntc is not None:
        return args.ntc
    if "ntc" in manifest:
        try:
            return int(manifest["ntc"])
        except ValueError:
            raise FileFormatError(f"manifest has a malformed ntc {manifest['ntc']!r}")
    return DEFAULT_NTC_COUNT if lock != "none" else 0


def _generators_text(spec: CodeSpec) -> str:
    return ",".join(f"{g:o}" for g in spec.generators)


def cmd_encode(args, storage: SyncSupportedStorage) -> int:
    data = _read(storage, args.input)
    input_format = args.input_format
    if input_format == "auto":
        input_format = "ntcf" if is_bit_file(data) else "raw"
    if input_format == "ntcf":
        bits = decode_bit_file(data)
    else:
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    spec = _resolve_code(args, {})
    lock = _resolve_lock(args, {})
    ntc = _resolve_ntc(args, {}, lock)
    if lock == "none" and ntc:
        raise ConfigError("NTCs require a locked encoder", "--ntc")

    coded = encode_frame(bits, spec, lock)
    samples = bpsk_modulate(coded, symbol_width=spec.n_outputs).samples
    storage.set_item(args.output, encode_sample_file(samples))
    manifest = {
        "format_version": FORMAT_VERSION,
        "generators": _generators_text(spec),
        "constraint_length": spec.constraint_length,
        "lock": lock,
        "ntc": ntc,
        "data_bits": len(bits),
        "samples": len(samples),
        "input_format": input_format,
    }
    storage.set_item(args.output + MANIFEST_SUFFIX, encode_manifest(manifest))

    expansion = spec.n_outputs * (LOCK_PERIOD if lock != "none" else 1)
    print(f"data bits: {len(bits)}")
    print(f"coded symbols: {len(samples)}")
    print(f"effective rate: 1/{expansion}")
    return EXIT_OK


def cmd_corrupt(args, storage: SyncSupportedStorage) -> int:
    samples = decode_sample_file(_read(storage, args.input))
    manifest = _read_manifest(storage, args.input)
    if args.sigma is not None:
        sigma = args.sigma
        if sigma < 0:
            raise ConfigError("--sigma must not be negative", "--sigma")
    else:
        rate = 1.0
        if args.normalization == "info" and manifest.get("data_bits") and len(samples):
            try:
                rate = int(manifest["data_bits"]) / len(samples)
            except ValueError:
                raise FileFormatError(
                    f"manifest has a malformed data_bits {manifest['data_bits']!r}"
                )
        sigma = noise_sigma(
            NoiseSpec(ebno_db=args.ebno, normalization=args.normalization, code_rate=rate)
        )
    stream = derive_stream(args.seed, (ROLE_FILE_NOISE,))
    noisy = awgn(SoftSequence(samples=samples, symbol_width=1), sigma, stream)
    storage.set_item(args.output, encode_sample_file(noisy.samples))
    if manifest:
        manifest.update(seed=str(args.seed), sigma=repr(sigma), normalization=args.normalization)
        storage.set_item(args.output + MANIFEST_SUFFIX, encode_manifest(manifest))
    logger.info("corrupted %d samples with sigma %.6g", len(samples), sigma)
    print(f"sigma: {sigma:.6g}")
    return EXIT_OK


def cmd_decode(args, storage: SyncSupportedStorage) -> int:
    samples = decode_sample_file(_read(storage, args.input))
    manifest = {} if args.no_manifest else _read_manifest(storage, args.input)
    spec = _resolve_code(args, manifest)
    lock = _resolve_lock(args, manifest)
    cfg = DecodeConfig(
        metric=args.metric,
        lock_mode=lock,
        ntc_count=_resolve_ntc(args, manifest, lock),
        invert_ntc=args.invert_ntc,
    )
    seq = SoftSequence(samples=samples, symbol_width=spec.n_outputs)
    bits, result = decode_frame(seq, spec, cfg)

    output_format = args.output_format or manifest.get("input_format", "ntcf")
    if output_format == "raw" and len(bits) % 8 == 0:
        storage.set_item(args.output, np.packbits(bits).tobytes())
    else:
        storage.set_item(args.output, encode_bit_file(bits))
    print(f"decoded bits: {len(bits)}")
    print(f"final metric: {result.final_metric:.6g}")
    return EXIT_OK


def _parse_schemes(text: str) -> List[str]:
    schemes = [part.strip() for part in text.split(",") if part.strip()]
    unknown = [s for s in schemes if s not in SCHEME_ORDER]
    if unknown or not schemes:
        raise ConfigError(
            f"--schemes expects a list of {', '.join(SCHEME_ORDER)}, got {text!r}",
            "--schemes",
        )
    return schemes


def _experiment(args, schemes: Sequence[str]) -> ExperimentConfig:
    spec = _resolve_code(args, {})
    lock = _resolve_lock(args, {})
    n, k = parse_rs(args.rs)
    if args.workers is not None and args.workers < 1:
        raise ConfigError("--workers must be at least 1", "--workers")
    return ExperimentConfig(
        info_bits=args.bits,
        ebno_points=tuple(parse_float_list(args.ebno)),
        schemes=tuple(schemes),
        master_seed=args.seed,
        code_spec=spec,
        lock_mode=lock,
        ntc_count=_resolve_ntc(args, {}, lock),
        invert_ntc=args.invert_ntc,
        rs_params=RsParams(n=n, k=k),
        normalization=args.normalization,
        frame_len_bits=args.frame_bits,
    )


def _write_table(args, storage: SyncSupportedStorage, table) -> None:
    print(format_table(table), end="")
    if not args.out:
        return
    if args.format == "csv":
        storage.set_item(args.out, emit_csv(table).encode("utf-8"))
        return
    base = args.out[: -len(".dat")] if args.out.endswith(".dat") else args.out
    for label, text in emit_dat(table).items():
        storage.set_item(f"{base}_{label}.dat", text.encode("utf-8"))


def cmd_sweep(args, storage: SyncSupportedStorage) -> int:
    cfg = _experiment(args, _parse_schemes(args.schemes))
    _write_table(args, storage, run_sweep(cfg, max_workers=args.workers))
    return EXIT_OK


def cmd_ntc_study(args, storage: SyncSupportedStorage) -> int:
    if args.lock == "none":
        raise ConfigError("ntc-study needs a locked encoder", "--lock")
    cfg = _experiment(args, ["svad"])
    ntc_values = parse_int_list(args.ntc_values, "--ntc-values")
    table = ntc_study(cfg, ntc_values, max_workers=args.workers)
    _write_table(args, storage, table)
    return EXIT_OK


def cmd_trellis_dump(args, storage: SyncSupportedStorage) -> int:
    spec = _resolve_code(args, {})
    print(trellis_dump(build_trellis(spec, _resolve_lock(args, {}))), end="")
    return EXIT_OK


COMMANDS = {
    "encode": cmd_encode,
    "corrupt": cmd_corrupt,
    "decode": cmd_decode,
    "sweep": cmd_sweep,
    "ntc-study": cmd_ntc_study,
    "trellis-dump": cmd_trellis_dump,
}


def exit_code(error: BaseException) -> int:
    if isinstance(error, SweepPointError):
        return exit_code(error.original_error)
    if isinstance(error, OSError):
        return EXIT_IO
    if isinstance(error, (FileFormatError, FramingError, ChannelError)):
        return EXIT_DATA_FORMAT
    return EXIT_USAGE


def _describe(error: BaseException) -> str:
    if isinstance(error, ConfigError) and error.flag and error.flag not in error.message:
        return f"{error.flag}: {error.message}"
    if isinstance(error, SvadNtcError):
        return error.message
    return str(error)


def main(
    argv: Optional[Sequence[str]] = None,
    *,
    storage: Optional[SyncSupportedStorage] = None,
) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        print(f"error: {_describe(e)}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_OK

    logging.basicConfig(
        level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args, storage or SyncFileStorage())
    except (SvadNtcError, OSError, ValidationError) as e:
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"error: {_describe(e)}", file=sys.stderr)
        return exit_code(e)


def run() -> None:
    sys.exit(main())
