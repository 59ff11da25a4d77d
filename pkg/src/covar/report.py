"""Structured verification outcomes.

A Report is a named list of checks plus free-form structured data.  Every
verification entry point in the library returns one; the CLI serializes them
to text or JSON and maps them onto exit codes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: dict | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "passed": self.passed}
        if self.detail:
            d["detail"] = self.detail
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    seconds: float = 0.0

    def add(self, name: str, passed: bool, detail: str = "",
            witness: dict | None = None) -> Check:
        check = Check(name, bool(passed), detail, witness)
        self.checks.append(check)
        return check

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_checks(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
            "seconds": round(self.seconds, 6),
        }

    def render_text(self) -> str:
        lines = [f"== {self.title} =="]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = f"[{status}] {c.name}"
            if c.detail:
                line += f": {c.detail}"
            lines.append(line)
            if c.witness:
                for key, value in c.witness.items():
                    lines.append(f"         {key} = {value}")
        for key, value in self.data.items():
            lines.append(f"{key}: {value}")
        lines.append(f"result: {'ok' if self.ok else 'FAILED'} ({self.seconds:.3f}s)")
        return "\n".join(lines)


class Stopwatch:
    """Context manager writing its elapsed time into a report."""

    def __init__(self, report: Report):
        self.report = report

    def __enter__(self):
        self._start = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.seconds = time.perf_counter() - self._start
        return False
