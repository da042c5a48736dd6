"""Structured pass/fail records for the verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field


def _plain(x):
    """JSON-safe copy: ints become decimal strings, tuples become lists."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_plain(v) for v in items]
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


@dataclass
class Case:
    description: str
    passed: bool
    witness: dict = field(default_factory=dict)

    def to_json(self):
        return {"description": self.description, "status": "pass" if self.passed else "fail",
                "witness": _plain(self.witness)}


@dataclass
class VerifyReport:
    suite: str
    params: dict = field(default_factory=dict)
    cases: list = field(default_factory=list)

    def add(self, description: str, passed: bool, witness: dict | None = None) -> bool:
        self.cases.append(Case(description, bool(passed), witness or {}))
        return bool(passed)

    def extend(self, other: "VerifyReport", prefix: str = ""):
        for c in other.cases:
            self.cases.append(Case(prefix + c.description, c.passed, c.witness))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self) -> list:
        return [c for c in self.cases if not c.passed]

    def to_json(self):
        return {
            "suite": self.suite,
            "params": _plain(self.params),
            "status": "pass" if self.passed else "fail",
            "cases": [c.to_json() for c in self.cases],
        }

    def summary(self) -> str:
        bad = len(self.failures)
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}: {len(self.cases) - bad}/{len(self.cases)} cases pass"

    def to_text(self) -> str:
        lines = [self.summary()]
        for c in self.cases:
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.description}")
        return "\n".join(lines) + "\n"
