"""
Full-size runs of the residual-error experiment, the decoder against the
exhaustive search and the RS bounded-distance guarantee. Run with
``pytest --run-slow``.
"""

import math

import numpy as np
import pytest

from svad_ntc.constants import PUBLISHED_RESIDUALS
from svad_ntc.convcode import build_trellis
from svad_ntc.harness import ebno_for_ber, ntc_study, run_sweep
from svad_ntc.rs_baseline import gf_inv, gf_mul, rs_decode_many, rs_encode_many
from svad_ntc.types import CodeSpec, DecodeConfig, ExperimentConfig, RsParams
from svad_ntc.viterbi import (
    append_ntc,
    decode_pipeline,
    ml_oracle_decode,
    viterbi_decode,
)

from .utils import mock_bits, mock_read_back

pytestmark = pytest.mark.slow

MILLION = 1_000_000


def _slack(count: int) -> float:
    return 3 * math.sqrt(count + 1)


def _residuals(rows):
    return [row.residual_errors for row in rows]


@pytest.fixture(scope="module")
def residual_sweep():
    cfg = ExperimentConfig(
        info_bits=MILLION,
        ebno_points=tuple(float(x) for x in range(1, 12)),
        schemes=("svad", "rs"),
    )
    return run_sweep(cfg, max_workers=None)


def test_svad_residuals_fall_with_ebno(residual_sweep):
    svad = [row for row in residual_sweep.for_scheme("svad") if row.ebno_db <= 8.0]
    counts = _residuals(svad)
    assert len(counts) == 8
    for earlier, later in zip(counts, counts[1:]):
        assert later < earlier + _slack(earlier)
    assert counts[-1] <= 5


def test_svad_at_one_db(residual_sweep):
    svad = residual_sweep.for_scheme("svad")[0].residual_errors
    rs = residual_sweep.for_scheme("rs")[0].residual_errors
    target = PUBLISHED_RESIDUALS["svad"][1.0]
    assert target / 3 <= svad <= 3 * target or 3 * svad <= rs


def test_rs_total_is_several_times_svad_total(residual_sweep):
    totals = residual_sweep.totals
    assert totals["rs"] >= 3 * totals["svad"]


def test_soft_decision_gain_over_hard():
    cfg = ExperimentConfig(
        info_bits=MILLION,
        ebno_points=tuple(x / 2 for x in range(-2, 6)),
        schemes=("soft", "hard"),
    )
    table = run_sweep(cfg, max_workers=None)
    soft = ebno_for_ber(table.for_scheme("soft"), 1e-3)
    hard = ebno_for_ber(table.for_scheme("hard"), 1e-3)
    assert soft is not None and hard is not None
    assert hard - soft == pytest.approx(2.0, abs=1.0)


def test_ntc_count_saturates():
    cfg = ExperimentConfig(info_bits=MILLION, ebno_points=(3.0,), schemes=("svad",))
    table = ntc_study(cfg, list(range(9)), max_workers=None)
    counts = _residuals(table.rows)
    assert [row.ntc_count for row in table.rows] == list(range(9))
    for fewer, more in zip(counts, counts[1:]):
        assert more <= fewer + _slack(fewer)
    assert abs(counts[6] - counts[8]) <= _slack(counts[6])


@pytest.mark.parametrize("spec", [CodeSpec(), CodeSpec.preset("worked-example")])
@pytest.mark.parametrize("lock", ["none", "lower"])
def test_decoder_matches_exhaustive_search(spec, lock):
    trellis = build_trellis(spec, lock)
    cfg = DecodeConfig(lock_mode=lock, ntc_count=0 if lock == "none" else 6)
    rng = np.random.default_rng(29)
    for trial in range(1000):
        data = rng.integers(0, 2, 10, dtype=np.uint8)
        read = mock_read_back(data, spec, lock, sigma=0.8, seed=trial)
        seq = append_ntc(read, lock, cfg.ntc_count)
        fast = viterbi_decode(trellis, seq, cfg)
        best = ml_oracle_decode(trellis, seq, cfg)
        assert fast.final_metric == pytest.approx(best.final_metric, rel=1e-9, abs=1e-12)
        # continuous noise leaves a unique minimizer
        assert np.array_equal(fast.decoded_input_bits, best.decoded_input_bits)


@pytest.mark.parametrize("lock", ["none", "lower", "higher"])
@pytest.mark.parametrize("ntc", [0, 6])
@pytest.mark.parametrize("metric", ["soft", "hard"])
def test_noiseless_identity_at_scale(lock, ntc, metric):
    if lock == "none" and ntc:
        pytest.skip("NTCs need a locked encoder")
    spec = CodeSpec()
    data = mock_bits(100_000, seed=ntc + 1)
    cfg = DecodeConfig(lock_mode=lock, ntc_count=ntc, metric=metric)
    assert np.array_equal(decode_pipeline(mock_read_back(data, spec, lock), spec, cfg), data)


def test_rs_corrects_exactly_t_errors():
    params = RsParams()
    rng = np.random.default_rng(16)
    frames = 10_000
    messages = rng.integers(0, 256, (frames, params.k), dtype=np.uint8)
    words = rs_encode_many(params, messages)
    positions = np.argsort(rng.random((frames, params.n)), axis=1)[:, : params.t]
    errors = rng.integers(1, 256, (frames, params.t), dtype=np.uint8)
    words[np.arange(frames)[:, None], positions] ^= errors
    decoded, statuses = rs_decode_many(params, words)
    assert all(s.kind == "corrected" and s.count == params.t for s in statuses)
    assert np.array_equal(decoded, messages)


def test_every_inverse_exhaustively():
    for a in range(1, 256):
        assert gf_mul(a, gf_inv(a)) == 1
        assert gf_inv(gf_inv(a)) == a
