import numpy as np
import pytest

from svad_ntc._sync.storage import SyncMemoryStorage
from svad_ntc.cli import build_parser, exit_code, main
from svad_ntc.constants import CSV_HEADER, EXIT_DATA_FORMAT, EXIT_IO, EXIT_OK, EXIT_USAGE
from svad_ntc.errors import ConfigError, FramingError, SweepPointError
from svad_ntc.formats import (
    decode_bit_file,
    decode_manifest,
    decode_sample_file,
    encode_bit_file,
    encode_sample_file,
)

from .utils import MR_SAMPLES, mock_bits, mock_payload

PAYLOAD = mock_payload(32)


@pytest.mark.incremental
class TestStoragePipeline:
    storage = SyncMemoryStorage()

    def test_encode(self, capsys):
        self.storage.set_item("data.bin", PAYLOAD)
        assert main(["encode", "data.bin", "data.ntcs"], storage=self.storage) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out == ["data bits: 256", "coded symbols: 1536", "effective rate: 1/6"]
        samples = decode_sample_file(self.storage.get_item("data.ntcs"))
        assert len(samples) == 1536
        assert set(np.unique(samples)) <= {-1.0, 1.0}

    def test_manifest(self):
        manifest = decode_manifest(self.storage.get_item("data.ntcs.manifest"))
        assert manifest["generators"] == "7,5"
        assert manifest["lock"] == "lower"
        assert manifest["ntc"] == "6"
        assert manifest["data_bits"] == "256"
        assert manifest["input_format"] == "raw"

    def test_corrupt(self, capsys):
        argv = ["corrupt", "data.ntcs", "noisy.ntcs", "--sigma", "0.3", "--seed", "7"]
        assert main(argv, storage=self.storage) == EXIT_OK
        assert capsys.readouterr().out == "sigma: 0.3\n"
        clean = decode_sample_file(self.storage.get_item("data.ntcs"))
        noisy = decode_sample_file(self.storage.get_item("noisy.ntcs"))
        assert not np.array_equal(clean, noisy)
        manifest = decode_manifest(self.storage.get_item("noisy.ntcs.manifest"))
        assert manifest["seed"] == "7"
        assert float(manifest["sigma"]) == 0.3

    def test_corrupt_is_reproducible(self):
        argv = ["corrupt", "data.ntcs", "again.ntcs", "--sigma", "0.3", "--seed", "7"]
        assert main(argv, storage=self.storage) == EXIT_OK
        assert self.storage.get_item("again.ntcs") == self.storage.get_item("noisy.ntcs")

    def test_decode(self, capsys):
        assert main(["decode", "noisy.ntcs", "restored.bin"], storage=self.storage) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "decoded bits: 256"
        assert out[1].startswith("final metric: ")
        assert self.storage.get_item("restored.bin") == PAYLOAD

    def test_decode_to_bit_file(self):
        argv = ["decode", "noisy.ntcs", "restored.ntcf", "--output-format", "ntcf"]
        assert main(argv, storage=self.storage) == EXIT_OK
        bits = decode_bit_file(self.storage.get_item("restored.ntcf"))
        assert np.array_equal(bits, np.unpackbits(np.frombuffer(PAYLOAD, dtype=np.uint8)))

    def test_decode_hard_metric(self):
        argv = ["decode", "noisy.ntcs", "hard.bin", "--metric", "hard"]
        assert main(argv, storage=self.storage) == EXIT_OK
        assert self.storage.get_item("hard.bin") == PAYLOAD


def test_bit_file_round_trip_with_higher_lock():
    storage = SyncMemoryStorage()
    bits = mock_bits(101, seed=3)
    storage.set_item("in.ntcf", encode_bit_file(bits))
    assert main(["encode", "in.ntcf", "s.ntcs", "--lock", "higher"], storage=storage) == EXIT_OK
    assert main(["decode", "s.ntcs", "out.ntcf"], storage=storage) == EXIT_OK
    assert np.array_equal(decode_bit_file(storage.get_item("out.ntcf")), bits)


def test_unlocked_round_trip_without_manifest():
    storage = SyncMemoryStorage()
    storage.set_item("in.bin", PAYLOAD)
    argv = ["encode", "in.bin", "s.ntcs", "--lock", "none", "--preset", "worked-example"]
    assert main(argv, storage=storage) == EXIT_OK
    argv = [
        "decode", "s.ntcs", "out.bin", "--no-manifest",
        "--lock", "none", "--generators", "6,5", "--output-format", "raw",
    ]
    assert main(argv, storage=storage) == EXIT_OK
    assert storage.get_item("out.bin") == PAYLOAD


def test_corrupt_with_info_normalization(capsys):
    storage = SyncMemoryStorage()
    storage.set_item("in.bin", PAYLOAD)
    main(["encode", "in.bin", "s.ntcs"], storage=storage)
    capsys.readouterr()
    argv = ["corrupt", "s.ntcs", "n.ntcs", "--ebno", "0", "--normalization", "info"]
    assert main(argv, storage=storage) == EXIT_OK
    # rate 1/6 at 0 dB: sigma^2 = 3
    assert capsys.readouterr().out == "sigma: 1.73205\n"


def test_missing_input_is_an_io_error(capsys):
    assert main(["decode", "nope.ntcs", "out.bin"], storage=SyncMemoryStorage()) == EXIT_IO
    assert "nope.ntcs" in capsys.readouterr().err


def test_corrupt_file_is_a_data_error():
    storage = SyncMemoryStorage()
    storage.set_item("bad.ntcs", b"garbage that is long enough")
    assert main(["decode", "bad.ntcs", "out.bin"], storage=storage) == EXIT_DATA_FORMAT


def test_odd_sample_count_is_a_data_error():
    storage = SyncMemoryStorage()
    storage.set_item("odd.ntcs", encode_sample_file([1.0, -1.0, 1.0]))
    assert main(["decode", "odd.ntcs", "out.bin"], storage=storage) == EXIT_DATA_FORMAT


def test_malformed_manifest_is_a_data_error():
    storage = SyncMemoryStorage()
    storage.set_item("s.ntcs", encode_sample_file([1.0] * 6))
    storage.set_item("s.ntcs.manifest", b"generators=9,9\n")
    assert main(["decode", "s.ntcs", "out.bin"], storage=storage) == EXIT_DATA_FORMAT


def test_malformed_data_bits_is_a_data_error(capsys):
    storage = SyncMemoryStorage()
    storage.set_item("s.ntcs", encode_sample_file([1.0] * 6))
    storage.set_item("s.ntcs.manifest", b"data_bits=abc\n")
    argv = ["corrupt", "s.ntcs", "n.ntcs", "--ebno", "0", "--normalization", "info"]
    assert main(argv, storage=storage) == EXIT_DATA_FORMAT
    assert "data_bits" in capsys.readouterr().err
    assert storage.get_item("n.ntcs") is None


def test_raw_input_starting_with_bit_file_magic():
    storage = SyncMemoryStorage()
    raw = b"NTCF raw user bytes"
    storage.set_item("in.bin", raw)
    assert main(["encode", "in.bin", "s.ntcs"], storage=storage) == EXIT_DATA_FORMAT
    argv = ["encode", "in.bin", "s.ntcs", "--input-format", "raw"]
    assert main(argv, storage=storage) == EXIT_OK
    assert decode_manifest(storage.get_item("s.ntcs.manifest"))["input_format"] == "raw"
    assert main(["decode", "s.ntcs", "out.bin"], storage=storage) == EXIT_OK
    assert storage.get_item("out.bin") == raw


def test_forced_bit_file_input_rejects_raw_bytes():
    storage = SyncMemoryStorage()
    storage.set_item("in.bin", PAYLOAD)
    argv = ["encode", "in.bin", "s.ntcs", "--input-format", "ntcf"]
    assert main(argv, storage=storage) == EXIT_DATA_FORMAT


def test_decode_worked_example_sample_file():
    storage = SyncMemoryStorage()
    storage.set_item("mr.ntcs", encode_sample_file(MR_SAMPLES))
    argv = [
        "decode", "mr.ntcs", "mr.ntcf", "--lock", "none",
        "--preset", "worked-example", "--output-format", "ntcf",
    ]
    assert main(argv, storage=storage) == EXIT_OK
    assert list(decode_bit_file(storage.get_item("mr.ntcf"))) == [1, 0, 0, 0]


def test_corrupt_at_zero_db_has_half_unit_variance(capsys):
    storage = SyncMemoryStorage()
    clean = np.ones(1_000_000)
    storage.set_item("ones.ntcs", encode_sample_file(clean))
    argv = ["corrupt", "ones.ntcs", "n.ntcs", "--ebno", "0", "--seed", "5"]
    assert main(argv, storage=storage) == EXIT_OK
    assert capsys.readouterr().out == "sigma: 0.707107\n"
    noise = decode_sample_file(storage.get_item("n.ntcs")) - clean
    assert noise.var() == pytest.approx(0.5, rel=0.02)


def test_file_pipeline_at_six_db():
    storage = SyncMemoryStorage()
    payload = mock_payload(12_500)
    storage.set_item("data.bin", payload)
    assert main(["encode", "data.bin", "data.ntcs"], storage=storage) == EXIT_OK
    argv = ["corrupt", "data.ntcs", "noisy.ntcs", "--ebno", "6", "--seed", "3"]
    assert main(argv, storage=storage) == EXIT_OK
    assert main(["decode", "noisy.ntcs", "out.bin"], storage=storage) == EXIT_OK
    sent = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    received = np.unpackbits(np.frombuffer(storage.get_item("out.bin"), dtype=np.uint8))
    assert len(sent) == 100_000
    assert np.count_nonzero(sent != received) <= 20


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["encode", "in.bin"],
        ["encode", "in.bin", "out.ntcs", "--lock", "none", "--ntc", "3"],
        ["corrupt", "a", "b"],
        ["sweep", "--schemes", "svad,turbo"],
        ["sweep", "--ebno", "x..y"],
        ["sweep", "--rs", "255,222", "--bits", "10"],
        ["sweep", "--workers", "0", "--bits", "10"],
        ["ntc-study", "--lock", "none"],
        ["trellis-dump", "--generators", "7,5", "--preset", "standard"],
    ],
)
def test_usage_errors(argv, capsys):
    storage = SyncMemoryStorage()
    storage.set_item("in.bin", PAYLOAD)
    assert main(argv, storage=storage) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: ")


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("svad-ntc ")


def test_trellis_dump(capsys):
    assert main(["trellis-dump", "--preset", "worked-example", "--lock", "none"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "catastrophic: yes" in out
    assert out.splitlines()[-1] == "excluded: none"


def test_trellis_dump_default_is_locked_standard_code(capsys):
    assert main(["trellis-dump"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "catastrophic: no"
    assert lines[-1] == "excluded: S3(11)"


def test_sweep_to_csv(capsys):
    storage = SyncMemoryStorage()
    argv = ["sweep", "--bits", "1000", "--ebno", "10", "--schemes", "svad", "--out", "t.csv"]
    assert main(argv, storage=storage) == EXIT_OK
    assert "Total" in capsys.readouterr().out
    lines = storage.get_item("t.csv").decode().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 2
    assert lines[1].startswith("10,svad,1000,")
    assert lines[1].endswith(",0,g=7/5;v=3;lock=lower;ntc=6;norm=symbol;frame=1000")


def test_sweep_to_dat_files():
    storage = SyncMemoryStorage()
    argv = [
        "sweep", "--bits", "800", "--ebno", "4,8", "--schemes", "svad,rs",
        "--format", "dat", "--out", "curves.dat", "--seed", "3",
    ]
    assert main(argv, storage=storage) == EXIT_OK
    assert set(storage.storage) == {"curves_svad.dat", "curves_rs.dat"}
    lines = storage.get_item("curves_rs.dat").decode().splitlines()
    assert [line.split()[0] for line in lines] == ["4", "8"]


def test_ntc_study(capsys):
    argv = ["ntc-study", "--bits", "600", "--ntc-values", "0,6", "--ebno", "3"]
    assert main(argv, storage=SyncMemoryStorage()) == EXIT_OK
    header = capsys.readouterr().out.splitlines()[0].split()
    assert header[-2:] == ["svad-ntc0", "svad-ntc6"]


def test_parser_defaults():
    args = build_parser().parse_args(["sweep"])
    assert args.schemes == "svad,rs"
    assert args.ebno == "1..11"
    assert args.bits == 1_000_000
    args = build_parser().parse_args(["ntc-study"])
    assert args.ntc_values == "0..8"
    assert args.ebno == "3"


def test_exit_codes():
    assert exit_code(SweepPointError(1.0, "svad", FramingError("short"))) == EXIT_DATA_FORMAT
    assert exit_code(SweepPointError(1.0, "svad", ConfigError("bad"))) == EXIT_USAGE
    assert exit_code(FileNotFoundError("x")) == EXIT_IO
    assert exit_code(ConfigError("bad")) == EXIT_USAGE
