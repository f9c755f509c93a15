import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional

from . import __version__
from .errors import RooftopError

TOOL = "rooftop"


def jsonable(value: Any) -> Any:
    """Plain JSON values; fractions become "p/q" strings, sets become sorted lists."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict())
    raise TypeError(f"cannot serialise {type(value).__name__}")


@dataclass
class ReportEnvelope:
    command: str
    parameters: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    passed: bool = False
    reason: Optional[str] = None
    detail: Optional[str] = None
    tool: str = TOOL
    version: str = __version__

    def to_dict(self) -> dict:
        return jsonable({
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "passed": self.passed,
            "reason": self.reason,
            "detail": self.detail,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportEnvelope":
        data = json.loads(text)
        return cls(
            command=data["command"],
            parameters=data["parameters"],
            results=data["results"],
            passed=data["passed"],
            reason=data["reason"],
            detail=data.get("detail"),
            tool=data["tool"],
            version=data["version"],
        )


def error_envelope(command: str, parameters: Dict[str, Any], exc: RooftopError) -> ReportEnvelope:
    return ReportEnvelope(
        command, parameters, {"error": exc.to_dict()}, passed=False, reason=exc.reason, detail=str(exc)
    )
