"""app.tracing

Trace collection for debug mode.
The runner records suite start/finish and every suite records one payload per
check; `--debug` embeds the steps in the report.
"""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any

from app.contracts.models import StepTrace


@dataclass
class TraceCollector:
    """Collects per-suite traces for a single verification run."""
    traces: list[StepTrace] = field(default_factory=list)

    def add(self, step_name: str, payload: dict[str, Any]) -> None:
        self.traces.append(StepTrace(step_name, dict(payload)))

    def clear(self) -> None:
        self.traces.clear()

    def steps(self) -> list[StepTrace]:
        return list(self.traces)

    def for_step(self, step_name: str) -> list[dict[str, Any]]:
        return [t.payload for t in self.traces if t.step_name == step_name]
