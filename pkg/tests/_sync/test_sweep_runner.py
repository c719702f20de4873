import pytest

from svad_ntc.errors import ConfigError, SweepPointError

from .clients import inline_runner, pooled_runner, sweep_config


def _residuals(table):
    return [(row.ebno_db, row.scheme, row.ntc_count, row.residual_errors) for row in table.rows]


def test_run_sweep_returns_canonical_order():
    with inline_runner() as runner:
        table = runner.run_sweep()
    assert [(row.ebno_db, row.scheme) for row in table.rows] == [
        (1.0, "svad"),
        (1.0, "rs"),
        (1.0, "uncoded"),
        (4.0, "svad"),
        (4.0, "rs"),
        (4.0, "uncoded"),
    ]
    assert all(row.info_bits == 900 for row in table.rows)


def test_results_do_not_depend_on_worker_count():
    with inline_runner() as runner:
        inline = runner.run_sweep()
    with pooled_runner() as runner:
        pooled = runner.run_sweep()
    assert _residuals(inline) == _residuals(pooled)


def test_run_point():
    with inline_runner() as runner:
        result = runner.run_point(4.0, "uncoded")
        assert runner.config == sweep_config()
    assert result.scheme == "uncoded"
    assert result.ntc_count is None


def test_run_point_wraps_failures():
    with inline_runner() as runner:
        with pytest.raises(SweepPointError) as exc:
            runner.run_point(1.0, "turbo")
    assert exc.value.scheme == "turbo"
    assert exc.value.ebno_db == 1.0
    assert isinstance(exc.value.original_error, ConfigError)
    assert exc.value.message.startswith("ebno_db=1 scheme=turbo: ")
    assert exc.value.to_dict()["code"] == "sweep_point_failed"


def test_ntc_study():
    with inline_runner() as runner:
        table = runner.ntc_study([0, 3], ebno_points=[2.0])
    assert [(row.ebno_db, row.ntc_count) for row in table.rows] == [(2.0, 0), (2.0, 3)]
    assert {row.scheme for row in table.rows} == {"svad"}


def test_ntc_study_defaults_to_config_points():
    with inline_runner() as runner:
        table = runner.ntc_study([1])
    assert [row.ebno_db for row in table.rows] == [1.0, 4.0]


def test_pooled_failure_names_the_point():
    with pooled_runner() as runner:
        with pytest.raises(SweepPointError) as exc:
            runner.ntc_study([65], ebno_points=[1.0])
    assert exc.value.ntc_count == 65
    assert isinstance(exc.value.original_error, ConfigError)
    assert "ntc=65" in exc.value.message


def test_close_releases_the_pool():
    runner = pooled_runner(ebno_points=(3.0,), schemes=("uncoded",))
    runner.run_sweep()
    assert runner._executor is not None
    runner.close()
    assert runner._executor is None
    runner.close()
