"""Machine-readable verification reports."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1
STATUSES = ("pass", "fail", "skipped", "refused")


@dataclass
class Check:
    check_id: str
    anchor: str
    status: str
    witness: object = None
    timing: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def to_dict(self) -> dict:
        return {
            "check-id": self.check_id,
            "anchor": self.anchor,
            "status": self.status,
            "witness": to_jsonable(self.witness),
            "timing": round(self.timing, 4),
        }


@dataclass
class VerificationReport:
    title: str
    params: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, check_id: str, anchor: str, ok, witness=None, timing: float = 0.0) -> Check:
        if isinstance(ok, str):
            status = ok
        else:
            status = "pass" if ok else "fail"
        c = Check(check_id, anchor, status, witness, timing)
        self.checks.append(c)
        return c

    @contextmanager
    def timed(self, check_id: str, anchor: str):
        """Run a block that sets ``box['ok']`` and optionally ``box['witness']``."""
        box: dict = {"ok": False, "witness": None}
        t0 = time.perf_counter()
        yield box
        self.add(check_id, anchor, box["ok"], box.get("witness"), time.perf_counter() - t0)

    @property
    def passed(self) -> bool:
        return not self.failed

    @property
    def status(self) -> str:
        if self.failed:
            return "fail"
        if any(c.status == "refused" for c in self.checks):
            return "refused"
        return "pass"

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.status == "fail"]

    def status_of(self, check_id: str) -> str:
        for c in self.checks:
            if c.check_id == check_id:
                return c.status
        raise KeyError(check_id)

    def merge(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.check_id, c.anchor, c.status, c.witness, c.timing))

    def to_dict(self, timing: bool = True) -> dict:
        checks = [c.to_dict() for c in self.checks]
        if not timing:
            for c in checks:
                c["timing"] = 0.0
        return {
            "schema": SCHEMA_VERSION,
            "title": self.title,
            "params": to_jsonable(self.params),
            "status": self.status,
            "checks": checks,
            "data": to_jsonable(self.data),
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=False)


def to_jsonable(x):
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in x]
        if isinstance(x, (set, frozenset)):
            items.sort(key=repr)
        return items
    return str(x)
