"""Uniform result records for every verification routine."""

from __future__ import annotations

import time
from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of one verification pass.

    `statement` names the mathematical fact being checked, in words; it is
    the anchor a reader greps for.  Counts always satisfy
    passed + failed + skipped == attempted.  Only the first counterexample
    is kept, fully rendered.
    """

    name: str
    statement: str
    attempted: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    counterexample: str | None = None
    skip_reasons: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record_pass(self) -> None:
        self.attempted += 1
        self.passed += 1

    def record_fail(self, counterexample: str) -> None:
        self.attempted += 1
        self.failed += 1
        if self.counterexample is None:
            self.counterexample = counterexample

    def record_skip(self, reason: str) -> None:
        self.attempted += 1
        self.skipped += 1
        if reason not in self.skip_reasons:
            self.skip_reasons.append(reason)

    def note(self, text: str) -> None:
        """Record an observed fact that is reported but not asserted."""
        if text not in self.notes:
            self.notes.append(text)

    def check(self, condition: bool, counterexample: str) -> bool:
        if condition:
            self.record_pass()
        else:
            self.record_fail(counterexample)
        return condition

    def done(self) -> "CheckReport":
        self.wall_time = time.perf_counter() - self._t0
        return self

    def render(self, with_time: bool = False) -> str:
        """Stable text form.  Wall time is excluded by default so identical
        runs stay byte-identical."""
        lines = [
            f"check {self.name} [{self.statement}]",
            f"  attempted {self.attempted} passed {self.passed} failed {self.failed} skipped {self.skipped}",
        ]
        for reason in self.skip_reasons:
            lines.append(f"  skip: {reason}")
        for text in self.notes:
            lines.append(f"  note: {text}")
        if self.counterexample is not None:
            lines.append("  counterexample:")
            for cl in self.counterexample.splitlines():
                lines.append(f"    {cl}")
        if with_time:
            lines.append(f"  wall-time {self.wall_time:.3f}s")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statement": self.statement,
            "attempted": self.attempted,
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "counterexample": self.counterexample,
            "skip_reasons": list(self.skip_reasons),
            "notes": list(self.notes),
        }
