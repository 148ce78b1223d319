"""Verification reports: named residual checks with thresholds.

Every ``verify_*`` entry point returns a :class:`Report` so callers (tests,
the command line) see each residual, never just a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.threshold)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": float(self.residual),
            "threshold": float(self.threshold),
            "pass": self.passed,
        }


@dataclass
class Report:
    context: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, residual: float, threshold: float) -> Check:
        check = Check(name, float(residual), float(threshold))
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str = "") -> None:
        for check in other.checks:
            name = f"{prefix}{check.name}" if prefix else check.name
            self.checks.append(Check(name, check.residual, check.threshold))

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def worst(self) -> Check | None:
        if not self.checks:
            return None
        return max(self.checks, key=lambda c: c.residual - c.threshold)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "context": self.context,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def __str__(self) -> str:
        lines = [f"[{'PASS' if self.passed else 'FAIL'}] {self.context}"]
        for c in self.checks:
            flag = "ok " if c.passed else "FAIL"
            lines.append(
                f"  {flag} {c.name}: residual={c.residual:.3e} threshold={c.threshold:.3e}"
            )
        return "\n".join(lines)
