from __future__ import annotations

import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

from typing_extensions import Self

from ..errors import SweepPointError
from ..harness import run_point
from ..types import ExperimentConfig, PointResult, Scheme, SweepTable

logger = logging.getLogger(__name__)

WorkUnit = Tuple[float, Scheme, Optional[int]]


class SyncSweepRunner:
    """
    Evaluates sweep points inline (`max_workers=1`) or on a process pool.
    Rows come back in canonical order whatever the completion order.
    """

    def __init__(
        self,
        config: ExperimentConfig,
        *,
        max_workers: Optional[int] = None,
    ):
        self._config = config
        self._max_workers = max_workers
        self._executor: Optional[Executor] = None

    def __enter__(self) -> Self:
        return self

    def __exit__(self, exc_t, exc_v, exc_tb) -> None:
        self.close()

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    @property
    def config(self) -> ExperimentConfig:
        return self._config

    def _pool(self) -> Optional[Executor]:
        if self._max_workers == 1:
            return None
        if self._executor is None:
            self._executor = ProcessPoolExecutor(max_workers=self._max_workers)
        return self._executor

    def run_point(
        self,
        ebno_db: float,
        scheme: Scheme,
        *,
        ntc_count: Optional[int] = None,
    ) -> PointResult:
        try:
            return run_point(self._config, ebno_db, scheme, ntc_count=ntc_count)
        except Exception as e:
            raise SweepPointError(ebno_db, scheme, e, ntc_count) from e

    def run_sweep(self) -> SweepTable:
        units: List[WorkUnit] = [
            (ebno, scheme, None)
            for ebno in self._config.ebno_points
            for scheme in self._config.schemes
        ]
        return self._run_units(units)

    def ntc_study(
        self,
        ntc_values: Sequence[int],
        *,
        ebno_points: Optional[Sequence[float]] = None,
    ) -> SweepTable:
        units: List[WorkUnit] = [
            (ebno, "svad", ntc)
            for ebno in (ebno_points or self._config.ebno_points)
            for ntc in ntc_values
        ]
        return self._run_units(units)

    def _run_units(self, units: List[WorkUnit]) -> SweepTable:
        logger.info("running %d sweep points", len(units))
        pool = self._pool()
        if pool is None:
            rows = [self.run_point(e, s, ntc_count=n) for e, s, n in units]
            return SweepTable.from_rows(rows)

        futures = [
            (unit, pool.submit(run_point, self._config, unit[0], unit[1], ntc_count=unit[2]))
            for unit in units
        ]
        rows = []
        for (ebno, scheme, ntc), future in futures:
            try:
                rows.append(future.result())
            except Exception as e:
                for _, pending in futures:
                    pending.cancel()
                raise SweepPointError(ebno, scheme, e, ntc) from e
        return SweepTable.from_rows(rows)
