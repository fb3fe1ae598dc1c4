from .registry import Check, Outcome, RunContext, registry
from .runner import execute, run_experiment, write_report

__all__ = ["Check", "Outcome", "RunContext", "registry", "execute", "run_experiment", "write_report"]
