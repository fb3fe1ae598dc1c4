from .experiment import COMMANDS, ExperimentConfig, experiment_adapter, parse_config
from .poly import FactorSchema, PolySchema, TermSchema
from .report import REPORT_SCHEMA_VERSION, CheckRecord, Report

__all__ = [
    "COMMANDS",
    "ExperimentConfig",
    "experiment_adapter",
    "parse_config",
    "FactorSchema",
    "PolySchema",
    "TermSchema",
    "REPORT_SCHEMA_VERSION",
    "CheckRecord",
    "Report",
]
