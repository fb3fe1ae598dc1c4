"""Report schemas: one record per check, a versioned JSON document and its text table."""

from typing import Any, Literal

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

REPORT_SCHEMA_VERSION = 1

VerdictLabel = Literal["pass", "fail", "inconclusive", "flagged"]


class CheckRecord(BaseModel):
    """Outcome of a single check."""

    model_config = ConfigDict(ser_json_inf_nan="strings")

    name: str
    inputs: dict[str, Any] = Field(default_factory=dict)
    values: dict[str, Any] = Field(default_factory=dict)
    bounds: dict[str, Any] = Field(default_factory=dict)
    verdict: VerdictLabel
    runtime: float = 0.0
    detail: str = ""


class Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True, ser_json_inf_nan="strings")

    schema_version: int = Field(default=REPORT_SCHEMA_VERSION, alias="schema")
    command: str
    seed: int | None = None
    tolerance_scale: float = 1.0
    records: list[CheckRecord] = Field(default_factory=list)
    series: dict[str, list[dict[str, Any]]] = Field(default_factory=dict)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if r.verdict == "fail"]

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)

    def frame(self) -> pd.DataFrame:
        """One row per record with compact value/bound columns."""
        rows = [
            {
                "check": r.name,
                "verdict": r.verdict,
                "values": _compact(r.values),
                "bounds": _compact(r.bounds),
                "runtime_s": round(r.runtime, 3),
            }
            for r in self.records
        ]
        return pd.DataFrame(rows, columns=["check", "verdict", "values", "bounds", "runtime_s"])

    def text_table(self) -> str:
        frame = self.frame()
        if frame.empty:
            body = "(no records)"
        else:
            body = frame.to_string(index=False, justify="left")
        counts = frame["verdict"].value_counts().to_dict() if not frame.empty else {}
        summary = ", ".join(f"{label}={counts.get(label, 0)}" for label in ("pass", "fail", "inconclusive", "flagged"))
        return f"{self.command} (schema {self.schema_version}, seed {self.seed})\n{body}\n{summary}\n"


def _format(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.3e}"
    if isinstance(value, complex):
        return f"{value.real:.3e}{value.imag:+.3e}j"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format(v) for v in value[:4]) + (", …" if len(value) > 4 else "") + "]"
    return str(value)


def _compact(mapping: dict[str, Any]) -> str:
    return "; ".join(f"{key}={_format(value)}" for key, value in mapping.items())
