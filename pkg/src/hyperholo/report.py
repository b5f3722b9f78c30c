"""Check results and reports with JSON serialization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .scalars import Scalar

PASS, FAIL, ERROR = "pass", "fail", "error"


def serialize(obj, limit=None):
    """Turn witnesses (Scalars, Sections, matrices, tensors) into JSON-friendly data."""
    from .graded import AltTensor
    from .linalg import Matrix

    if obj is None or isinstance(obj, (bool, int, str, float)):
        return obj
    if isinstance(obj, Scalar):
        s = str(obj)
        if limit is not None and len(s) > limit:
            s = s[:limit] + "..."
        return s
    if isinstance(obj, Matrix):
        return [[serialize(a, limit) for a in r] for r in obj.rows]
    if isinstance(obj, AltTensor):
        return {",".join(map(str, k)) if k else "": serialize(v, limit) for k, v in obj.items()}
    if hasattr(obj, "to_json"):
        return obj.to_json(limit)
    if isinstance(obj, dict):
        return {str(k): serialize(v, limit) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [serialize(v, limit) for v in obj]
    return str(obj)


@dataclass
class Check:
    name: str
    status: str
    witness: Any = None
    info: dict = field(default_factory=dict)
    conventions: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_json(self, limit=None):
        out = {"name": self.name, "status": self.status}
        if self.witness is not None:
            out["witness"] = serialize(self.witness, limit)
        if self.info:
            out["info"] = serialize(self.info, limit)
        if self.conventions:
            out["conventions"] = list(self.conventions)
        return out


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    conventions: list = field(default_factory=list)

    def add(self, name, ok, witness=None, **info) -> Check:
        c = Check(name, PASS if ok else FAIL, None if ok else witness, dict(info))
        self.checks.append(c)
        return c

    def error(self, name, message) -> Check:
        c = Check(name, ERROR, None, {"error": message})
        self.checks.append(c)
        return c

    def extend(self, other: "Report", prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.status, c.witness, c.info, c.conventions))
        for conv in other.conventions:
            if conv not in self.conventions:
                self.conventions.append(conv)
        return self

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self):
        return [c.name for c in self.checks]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def status(self) -> str:
        if any(c.status == ERROR for c in self.checks):
            return ERROR
        return PASS if self.ok else FAIL

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def to_json(self, limit=None):
        out = {"title": self.title, "status": self.status, "checks": [c.to_json(limit) for c in self.checks]}
        if self.info:
            out["info"] = serialize(self.info, limit)
        if self.conventions:
            out["conventions"] = list(self.conventions)
        return out

    def summary(self) -> str:
        lines = [f"{self.title}: {self.status}"]
        for c in self.checks:
            lines.append(f"  [{c.status}] {c.name}")
        return "\n".join(lines)
