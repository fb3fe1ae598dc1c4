"""Suite registry: subcommand name → builder of checks."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..core.config import Tolerances
from ..core.errors import ConfigurationError
from ..schemas.report import VerdictLabel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Outcome:
    """What a check found; ``series`` rows are appended to the named CSV exports."""

    verdict: VerdictLabel
    values: dict[str, Any] = field(default_factory=dict)
    bounds: dict[str, Any] = field(default_factory=dict)
    detail: str = ""
    series: dict[str, list[dict[str, Any]]] = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[[], Outcome]
    inputs: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class RunContext:
    """Resolved tolerances and seed for one run."""

    tolerances: Tolerances
    seed: int | None = None

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Independent generator per stream, so adding a check never shifts another check's draws."""
        if self.seed is None:
            raise ConfigurationError("This suite draws random inputs and needs a seed")
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(stream,)))


def judge(ok: bool) -> VerdictLabel:
    return "pass" if ok else "fail"


SuiteBuilder = Callable[[Any, RunContext], list[Check]]


class SuiteRegistry:
    """Builders registered with ``@registry.suite(name)``, one per subcommand."""

    def __init__(self) -> None:
        self._builders: dict[str, SuiteBuilder] = {}

    def suite(self, name: str) -> Callable[[SuiteBuilder], SuiteBuilder]:
        def decorator(builder: SuiteBuilder) -> SuiteBuilder:
            if name in self._builders:
                raise ValueError(f"Suite '{name}' is already registered")
            self._builders[name] = builder
            return builder

        return decorator

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._builders)

    def build(self, config: Any, ctx: RunContext) -> list[Check]:
        builder = self._builders.get(config.command)
        if builder is None:
            raise ConfigurationError(f"No suite registered for command '{config.command}'")
        checks = builder(config, ctx)
        seen: set[str] = set()
        for check in checks:
            if check.name in seen:
                raise ValueError(f"Duplicate check name '{check.name}' in suite '{config.command}'")
            seen.add(check.name)
        logger.info(f"Suite '{config.command}': {len(checks)} checks")
        return checks


registry = SuiteRegistry()
