"""Structured verification results shared by every suite."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass
class CheckResult:
    check: str
    max_residual: float
    tolerance: float
    status: str
    details: list[str] = field(default_factory=list)
    params_hash: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def as_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "params_hash": self.params_hash,
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "status": self.status,
        }


@dataclass
class VerificationReport:
    name: str
    results: list[CheckResult] = field(default_factory=list)

    def add(self, check: str, residual: float, tolerance: float,
            details: list[str] | None = None, status: str | None = None) -> CheckResult:
        """Record one check; status defaults to ``residual <= tolerance``."""
        residual = float(residual)
        if status is None:
            status = PASS if residual <= tolerance else FAIL
        res = CheckResult(check, residual, tolerance, status, list(details or []))
        self.results.append(res)
        return res

    def add_exact(self, check: str, failures: list[str]) -> CheckResult:
        """Exact identity check: passes iff ``failures`` is empty."""
        return self.add(check, float(len(failures)), 0.0, failures[:20])

    def skip(self, check: str, reason: str) -> CheckResult:
        return self.add(check, 0.0, 0.0, [reason], status=SKIPPED)

    def extend(self, other: "VerificationReport") -> None:
        self.results.extend(other.results)

    @property
    def passed(self) -> bool:
        return all(r.status != FAIL for r in self.results)

    @property
    def max_residual(self) -> float:
        return max((r.max_residual for r in self.results), default=0.0)

    def __getitem__(self, check: str) -> CheckResult:
        for r in self.results:
            if r.check == check:
                return r
        raise KeyError(check)

    def stamp(self, params: dict[str, Any]) -> None:
        """Attach a stable hash of the run parameters to every result."""
        blob = json.dumps(params, sort_keys=True, default=str).encode()
        digest = hashlib.sha256(blob).hexdigest()[:16]
        for r in self.results:
            r.params_hash = digest

    def to_json(self) -> str:
        return json.dumps([r.as_dict() for r in self.results], indent=2)

    def summary_table(self) -> str:
        width = max((len(r.check) for r in self.results), default=5)
        lines = [f"{'check':<{width}}  {'residual':>12}  {'tolerance':>10}  status"]
        for r in self.results:
            lines.append(f"{r.check:<{width}}  {r.max_residual:>12.3e}  "
                         f"{r.tolerance:>10.1e}  {r.status}")
        return "\n".join(lines)
