import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from errors import ParseError


@dataclass
class Report:
    """Machine-readable outcome of one command."""

    command: str
    input_digest: str
    status: str = "ok"
    exit_code: int = 0
    verdicts: dict = field(default_factory=dict)
    stages: List[dict] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)
    output: Optional[dict] = None
    error: Optional[dict] = None
    timings: Optional[Dict[str, float]] = None

    def __post_init__(self):
        """Validate report data."""
        if self.command not in ("analyze", "normalize", "check"):
            raise ValueError(f"Invalid command: {self.command}")
        if self.status not in ("ok", "failed"):
            raise ValueError(f"Invalid status: {self.status}")

    @property
    def passed(self) -> bool:
        return self.status == "ok" and all(self.checks.values())

    def fail(self, exit_code: int, kind: str, message: str, stage: Optional[str] = None):
        self.status = "failed"
        self.exit_code = exit_code
        self.error = {"kind": kind, "message": message}
        if stage:
            self.error["stage"] = stage

    def to_dict(self) -> dict:
        """Convert report to dictionary; timings only when recorded."""
        data = {
            "command": self.command,
            "input_digest": self.input_digest,
            "status": self.status,
            "exit_code": self.exit_code,
            "verdicts": self.verdicts,
            "stages": self.stages,
            "checks": self.checks,
            "output": self.output,
            "error": self.error,
        }
        if self.timings is not None:
            data["timings"] = self.timings
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        """Create Report from dictionary."""
        try:
            return cls(
                command=data["command"],
                input_digest=data["input_digest"],
                status=data.get("status", "ok"),
                exit_code=int(data.get("exit_code", 0)),
                verdicts=data.get("verdicts", {}),
                stages=list(data.get("stages", [])),
                checks=dict(data.get("checks", {})),
                output=data.get("output"),
                error=data.get("error"),
                timings=data.get("timings"),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"report is missing or mistypes a field: {e}") from e

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def digest(text: str) -> str:
    """sha256 of the input text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
