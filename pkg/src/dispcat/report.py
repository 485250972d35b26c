"""Structured verdicts returned by every check and by the CLI."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Any

from . import __version__

SCHEMA = 1
DEFAULT_BOUND = 10_000


def default_bound() -> int:
    """Resource bound for enumerations; ``DISPCAT_BOUND`` overrides it."""
    value = os.environ.get("DISPCAT_BOUND")
    return int(value) if value else DEFAULT_BOUND


@dataclass
class Finding:
    code: str
    message: str
    witness: tuple = ()
    span: str | None = None

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message,
                "witness": _jsonable(self.witness), "span": self.span}


@dataclass
class Report:
    command: str
    verdict: str = "pass"
    targets: tuple = ()
    findings: list[Finding] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    timing: float = field(default=0.0, compare=False)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def __bool__(self) -> bool:
        return self.passed

    def fail(self, code: str, message: str, witness=(), span=None) -> "Report":
        self.verdict = "fail"
        self.findings.append(Finding(code, message, tuple(witness), span))
        return self

    @property
    def witness(self) -> tuple:
        """Witness of the first finding, or ``()``."""
        return self.findings[0].witness if self.findings else ()

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "targets": list(self.targets),
            "verdict": self.verdict,
            "findings": [f.to_dict() for f in self.findings],
            "details": _jsonable(self.details),
            "notes": list(self.notes),
            "timing": self.timing,
            "version": self.version,
        }

    def to_json(self, timing: bool = True) -> str:
        d = self.to_dict()
        if not timing:
            d.pop("timing")
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(
            command=d["command"],
            verdict=d["verdict"],
            targets=tuple(d["targets"]),
            findings=[Finding(f["code"], f["message"], _tuplify(f["witness"]), f["span"])
                      for f in d["findings"]],
            details=d["details"],
            notes=list(d["notes"]),
            timing=d.get("timing", 0.0),
            version=d["version"],
        )

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def summary(self) -> str:
        lines = [" ".join([self.command, *map(str, self.targets)]) + f": {self.verdict.upper()}"]
        for f in self.findings:
            w = f" [{', '.join(map(str, _flatten(f.witness)))}]" if f.witness else ""
            where = f" ({f.span})" if f.span else ""
            lines.append(f"  {f.code}: {f.message}{w}{where}")
        for k, v in self.details.items():
            lines.append(f"  {k} = {v}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if hasattr(x, "_asdict"):
        return _jsonable(list(x))
    if hasattr(x, "__dataclass_fields__"):
        return _jsonable(asdict(x))
    return x


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(v) for v in x)
    return x


def _flatten(x):
    for v in x:
        if isinstance(v, (list, tuple)):
            yield "(" + ", ".join(map(str, _flatten(v))) + ")"
        else:
            yield v
