from typing import Dict, Tuple

import pytest

# first failing test per class, keyed by parametrize indices
_incremental_failures: Dict[str, Dict[Tuple[int, ...], str]] = {}


def _parametrize_index(item) -> Tuple[int, ...]:
    if hasattr(item, "callspec"):
        return tuple(item.callspec.indices.values())
    return ()


def pytest_runtest_makereport(item, call):
    if "incremental" not in item.keywords or call.excinfo is None:
        return
    failures = _incremental_failures.setdefault(str(item.cls), {})
    failures.setdefault(_parametrize_index(item), item.originalname or item.name)


def pytest_runtest_setup(item):
    if "incremental" not in item.keywords:
        return
    failures = _incremental_failures.get(str(item.cls))
    if not failures:
        return
    failed = failures.get(_parametrize_index(item))
    if failed is not None:
        pytest.xfail(f"previous step failed ({failed})")


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run the full-size Monte Carlo and exhaustive tests",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
