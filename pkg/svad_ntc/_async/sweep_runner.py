from __future__ import annotations

import asyncio
import logging
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from functools import partial
from typing import List, Optional, Sequence, Tuple

from typing_extensions import Self

from ..errors import SweepPointError
from ..harness import run_point
from ..types import ExperimentConfig, PointResult, Scheme, SweepTable

logger = logging.getLogger(__name__)

WorkUnit = Tuple[float, Scheme, Optional[int]]


class AsyncSweepRunner:
    """
    Dispatches sweep points to an executor from a running event loop. With
    `max_workers=1` points run on a single worker thread.
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

    async def __aenter__(self) -> Self:
        return self

    async def __aexit__(self, exc_t, exc_v, exc_tb) -> None:
        await self.close()

    async def close(self) -> None:
        if self._executor is not None:
            executor, self._executor = self._executor, None
            await asyncio.get_running_loop().run_in_executor(
                None, partial(executor.shutdown, wait=True)
            )

    @property
    def config(self) -> ExperimentConfig:
        return self._config

    def _pool(self) -> Executor:
        if self._executor is None:
            if self._max_workers == 1:
                self._executor = ThreadPoolExecutor(max_workers=1)
            else:
                self._executor = ProcessPoolExecutor(max_workers=self._max_workers)
        return self._executor

    async def run_point(
        self,
        ebno_db: float,
        scheme: Scheme,
        *,
        ntc_count: Optional[int] = None,
    ) -> PointResult:
        loop = asyncio.get_running_loop()
        try:
            return await loop.run_in_executor(
                self._pool(),
                partial(run_point, self._config, ebno_db, scheme, ntc_count=ntc_count),
            )
        except Exception as e:
            raise SweepPointError(ebno_db, scheme, e, ntc_count) from e

    async def run_sweep(self) -> SweepTable:
        units: List[WorkUnit] = [
            (ebno, scheme, None)
            for ebno in self._config.ebno_points
            for scheme in self._config.schemes
        ]
        return await self._run_units(units)

    async def ntc_study(
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
        return await self._run_units(units)

    async def _run_units(self, units: List[WorkUnit]) -> SweepTable:
        logger.info("running %d sweep points", len(units))
        results = await asyncio.gather(
            *(self.run_point(e, s, ntc_count=n) for e, s, n in units),
            return_exceptions=True,
        )
        for result in results:
            if isinstance(result, BaseException):
                raise result
        return SweepTable.from_rows(list(results))
