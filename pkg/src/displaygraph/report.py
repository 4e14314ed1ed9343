"""Validity reports: violations are data, not exceptions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: Any
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind}: {self.witness!r}" + (f" ({self.detail})" if self.detail else "")


@dataclass
class ValidityReport:
    violations: list[Violation] = field(default_factory=list)
    width: int | None = None

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def add(self, kind: str, witness: Any, detail: str = "") -> None:
        self.violations.append(Violation(kind, witness, detail))

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def summary(self) -> str:
        head = "valid" if self.valid else f"invalid ({len(self.violations)} violations)"
        if self.width is not None:
            head += f", width {self.width}"
        return head
