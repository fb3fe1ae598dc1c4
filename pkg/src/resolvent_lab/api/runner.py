"""Run a suite: build checks, execute them on a worker pool, collect the report."""

import asyncio
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ..core.config import Tolerances, settings
from ..core.errors import ConfigurationError, QuadratureError, SolverError
from ..schemas.experiment import OutputSpec
from ..schemas.report import CheckRecord, Report
from . import suites  # noqa: F401  registers the suites
from .registry import Check, Outcome, RunContext, registry

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """Convert numpy scalars, complex numbers, fractions and enums into JSON-ready values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.floating):
        return float(value)
    return value


def execute(check: Check) -> tuple[CheckRecord, dict[str, list[dict]]]:
    """Run one check; numerical breakdowns become inconclusive, anything else a failure."""
    start = time.perf_counter()
    try:
        outcome = check.run()
    except (QuadratureError, SolverError) as e:
        logger.warning(f"Check '{check.name}' inconclusive: {e}")
        outcome = Outcome("inconclusive", detail=str(e))
    except Exception as e:
        logger.error(f"Check '{check.name}' raised {type(e).__name__}: {e}")
        outcome = Outcome("fail", detail=f"{type(e).__name__}: {e}")
    runtime = time.perf_counter() - start
    logger.info(f"{check.name}: {outcome.verdict} ({runtime:.2f}s)")
    record = CheckRecord(
        name=check.name,
        inputs=_plain(check.inputs),
        values=_plain(outcome.values),
        bounds=_plain(outcome.bounds),
        verdict=outcome.verdict,
        runtime=runtime,
        detail=outcome.detail,
    )
    return record, {name: _plain(rows) for name, rows in outcome.series.items()}


async def run_experiment(
    config: Any,
    seed: int | None = None,
    threads: int = 4,
    tolerance_scale: float = 1.0,
    time_budget: float | None = None,
) -> Report:
    """Build the suite for ``config.command`` and run its checks concurrently.

    A seed given here overrides the one in the config. Records keep the suite's order.
    """
    if threads < 1:
        raise ConfigurationError(f"Need at least one worker thread, got {threads}")
    seed = seed if seed is not None else config.seed
    if config.needs_seed() and seed is None:
        raise ConfigurationError(f"Command '{config.command}' draws random inputs; pass --seed or set \"seed\"")
    tolerances = Tolerances.from_settings().with_overrides(config.tolerances).scaled(tolerance_scale)
    checks = registry.build(config, RunContext(tolerances, seed))

    budget = time_budget or settings.TIME_BUDGET_SECONDS
    loop = asyncio.get_running_loop()
    executor = ThreadPoolExecutor(max_workers=threads, thread_name_prefix="check")
    semaphore = asyncio.Semaphore(threads)

    async def run_one(check: Check) -> tuple[CheckRecord, dict[str, list[dict]]]:
        async with semaphore:
            return await loop.run_in_executor(executor, execute, check)

    logger.info(f"Running {len(checks)} checks for '{config.command}' on {threads} threads (seed={seed})")
    try:
        results = await asyncio.wait_for(asyncio.gather(*(run_one(c) for c in checks)), timeout=budget)
    except TimeoutError:
        logger.error(f"Time budget of {budget:.0f}s exceeded; abandoning remaining checks")
        executor.shutdown(wait=False, cancel_futures=True)
        raise
    executor.shutdown(wait=True)

    series: dict[str, list[dict]] = {}
    for _, rows in results:
        for name, entries in rows.items():
            series.setdefault(name, []).extend(entries)
    report = Report(
        command=config.command,
        seed=seed,
        tolerance_scale=tolerance_scale,
        records=[record for record, _ in results],
        series=series,
    )
    logger.info(f"'{config.command}' finished: {len(report.failures)} of {len(report.records)} checks failed")
    return report


def write_report(report: Report, out_dir: str | Path, outputs: OutputSpec | None = None) -> dict[str, Path]:
    """Write the JSON report, the text table and one CSV per series."""
    outputs = outputs or OutputSpec()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {"report": out_dir / outputs.report, "table": out_dir / outputs.table}
    written["report"].write_text(report.to_json())
    written["table"].write_text(report.text_table())
    if report.series:
        series_dir = out_dir / outputs.series_dir
        series_dir.mkdir(parents=True, exist_ok=True)
        for name, rows in report.series.items():
            path = series_dir / f"{name}.csv"
            pd.DataFrame(rows).to_csv(path, index=False)
            written[f"series/{name}"] = path
    logger.info(f"Report written to {out_dir}")
    return written
