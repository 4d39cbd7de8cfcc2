"""Check results shared by every verification routine."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass
class Finding:
    code: str
    message: str
    witness: dict = field(default_factory=dict)
    severity: str = "error"  # "error" | "warning" | "inconclusive"

    def as_dict(self):
        return {"code": self.code, "message": self.message, "severity": self.severity,
                "witness": {k: _plain(v) for k, v in sorted(self.witness.items())}}


@dataclass
class Report:
    """Outcome of one check.

    ``evidence`` is ``"exhaustive"`` when the check enumerated everything it
    claims about and ``"witness-based"`` when it only tested supplied data.
    """

    name: str
    findings: list = field(default_factory=list)
    evidence: str = "exhaustive"
    details: dict = field(default_factory=dict)

    def add(self, code, message, severity="error", **witness):
        self.findings.append(Finding(code, message, witness, severity))
        return self

    def warn(self, code, message, **witness):
        return self.add(code, message, "warning", **witness)

    def inconclusive(self, code, message, **witness):
        return self.add(code, message, "inconclusive", **witness)

    def extend(self, other: "Report", prefix=""):
        for f in other.findings:
            self.findings.append(Finding(f.code, prefix + f.message, f.witness, f.severity))
        if other.evidence == "witness-based":
            self.evidence = "witness-based"
        return self

    @property
    def errors(self):
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self):
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def verdict(self) -> Verdict:
        if self.errors:
            return Verdict.FAIL
        if any(f.severity == "inconclusive" for f in self.findings):
            return Verdict.INCONCLUSIVE
        return Verdict.PASS

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.PASS

    def codes(self):
        return [f.code for f in self.errors]

    def __bool__(self):
        return self.ok

    def as_dict(self):
        return {
            "name": self.name,
            "verdict": self.verdict.value,
            "evidence": self.evidence,
            "findings": [f.as_dict() for f in self.findings],
            "details": {k: _plain(v) for k, v in sorted(self.details.items())},
        }

    def __str__(self):
        lines = [f"[{self.verdict.value.upper()}] {self.name} ({self.evidence})"]
        for k, v in sorted(self.details.items()):
            lines.append(f"    {k}: {_plain(v)}")
        for f in self.findings:
            lines.append(f"    {f.severity}: {f.code}: {f.message}")
        return "\n".join(lines)


def _plain(v: Any):
    """Deterministic JSON-friendly rendering of witnesses."""
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    if isinstance(v, (frozenset, set)):
        return sorted((_plain(x) for x in v), key=repr)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in sorted(v.items(), key=lambda kv: repr(kv[0]))}
    return str(v)
