"""Uniform pass/fail report returned by every check."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    ok: bool
    criterion: str
    witness: str | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        s = f"{status} {self.criterion}"
        if self.witness:
            s += f" -- {self.witness}"
        return s

    def as_json(self) -> dict:
        d = {"criterion": self.criterion, "status": "pass" if self.ok else "fail"}
        if self.witness:
            d["witness"] = self.witness
        return d


def passed(criterion: str, **details) -> Report:
    return Report(True, criterion, None, details)


def failed(criterion: str, witness: str, **details) -> Report:
    return Report(False, criterion, witness, details)
