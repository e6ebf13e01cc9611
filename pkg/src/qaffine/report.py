"""Relation reports: per-relation pass/fail with a witness, stable JSON."""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager
from typing import Any, Callable, Mapping

from .linalg import axpy
from .qfield import ONE, Scalar
from .sl2mod import TruncationOverflow

__all__ = ["RelationEntry", "RelationReport", "residual", "pick_states"]


def residual(lhs: Mapping, rhs: Mapping) -> dict:
    return axpy(dict(lhs), -ONE, rhs)


def pick_states(states: list, sample=None) -> list:
    """All states (None), the first n (int), or n drawn by a seeded RNG ((n, seed)), in basis order."""
    if sample is None:
        return list(states)
    if isinstance(sample, int):
        return list(states[:sample])
    n, seed = sample
    if n >= len(states):
        return list(states)
    idx = sorted(random.Random(seed).sample(range(len(states)), n))
    return [states[i] for i in idx]


def _fmt_key(key) -> str:
    return str(key)


def _fmt(x: Any):
    if isinstance(x, Scalar):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_fmt(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _fmt(v) for k, v in x.items()}
    return x


class RelationEntry:
    def __init__(self, rid: str, window: Any = None, note: str | None = None):
        self.id = rid
        self.window = window
        self.note = note
        self.checked = 0
        self.skipped = 0
        self.failed = 0
        self.nontrivial = 0
        self.witness: dict | None = None
        self.extra: dict = {}
        self.elapsed = 0.0

    def check(self, state, modes, lhs: Callable[[], Mapping] | Mapping,
              rhs: Callable[[], Mapping] | Mapping) -> bool | None:
        """Compare two vectors; overflowing evaluations count as skipped."""
        try:
            a = lhs() if callable(lhs) else lhs
            b = rhs() if callable(rhs) else rhs
        except TruncationOverflow:
            self.skipped += 1
            return None
        res = residual(a, b)
        self.checked += 1
        if a or b:
            self.nontrivial += 1
        if res:
            self.fail(state, modes, res)
            return False
        return True

    def check_zero(self, state, modes, fn: Callable[[], Mapping] | Mapping) -> bool | None:
        return self.check(state, modes, fn, {})

    def check_value(self, state, modes, ok: bool, detail: Any = None) -> bool:
        self.checked += 1
        self.nontrivial += 1
        if not ok:
            self.fail(state, modes, detail, raw=True)
        return ok

    def fail(self, state, modes, detail, raw: bool = False) -> None:
        self.failed += 1
        if self.witness is None:
            w = {"state": _fmt_key(state), "modes": _fmt(modes)}
            if isinstance(detail, dict) and detail and not raw:
                k = min(detail, key=str)
                w["component"] = _fmt_key(k)
                w["lhs_minus_rhs"] = _fmt(detail[k])
            elif detail is not None:
                w["detail"] = _fmt(detail)
            self.witness = w

    @property
    def passed(self) -> bool:
        # a relation whose every check compared 0 with 0 proves nothing
        return self.failed == 0 and self.nontrivial > 0

    def as_dict(self, timing: bool = False) -> dict:
        d = {
            "id": self.id,
            "window": _fmt(self.window),
            "checked": self.checked,
            "skipped": self.skipped,
            "failed": self.failed,
            "nontrivial": self.nontrivial,
            "pass": self.passed,
        }
        if self.note:
            d["note"] = self.note
        if self.failed == 0 and self.nontrivial == 0:
            d["reason"] = "no nontrivial comparison in range"
        if self.witness is not None:
            d["witness"] = self.witness
        if self.extra:
            d["data"] = _fmt(self.extra)
        if timing:
            d["wall_time_s"] = round(self.elapsed, 3)
        return d


class RelationReport:
    def __init__(self, suite: str, config: Mapping | None = None):
        self.suite = suite
        self.config = dict(config or {})
        self.entries: dict[str, RelationEntry] = {}

    @contextmanager
    def relation(self, rid: str, window: Any = None, note: str | None = None):
        e = self.entries.get(rid)
        if e is None:
            e = RelationEntry(rid, window, note)
            self.entries[rid] = e
        t0 = time.perf_counter()
        try:
            yield e
        finally:
            e.elapsed += time.perf_counter() - t0

    def merge(self, other: "RelationReport") -> "RelationReport":
        for rid, e in other.entries.items():
            if rid in self.entries:
                raise ValueError(f"duplicate relation id {rid}")
            self.entries[rid] = e
        return self

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(e.passed for e in self.entries.values())

    def failures(self) -> list[str]:
        return [rid for rid, e in sorted(self.entries.items()) if not e.passed]

    def as_dict(self, timing: bool = False) -> dict:
        return {
            "suite": self.suite,
            "config": _fmt(self.config),
            "pass": self.passed,
            "relations": [self.entries[k].as_dict(timing) for k in sorted(self.entries)],
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.as_dict(timing), indent=1, sort_keys=True) + "\n"

    def summary(self) -> str:
        lines = []
        for rid in sorted(self.entries):
            e = self.entries[rid]
            lines.append(f"{'PASS' if e.passed else 'FAIL'}  {rid}  checked={e.checked} nontrivial={e.nontrivial} skipped={e.skipped}")
        return "\n".join(lines)
