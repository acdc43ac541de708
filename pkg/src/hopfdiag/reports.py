"""Suite reports in a text and a JSON form that agree item for item."""
from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

__all__ = ["Item", "Report", "timed", "PROVED", "ORACLE_ONLY", "FAILED", "HOLDS", "FAILS"]

PROVED, ORACLE_ONLY, FAILED = "Proved", "OracleOnly", "Failed"
HOLDS, FAILS = "HOLDS", "FAILS"


class _Clock:
    elapsed = 0.0


@contextmanager
def timed():
    c = _Clock()
    t0 = time.perf_counter()
    try:
        yield c
    finally:
        c.elapsed = time.perf_counter() - t0


@dataclass
class Item:
    name: str
    status: str
    detail: str = ""
    evidence: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    elapsed: float = 0.0
    script: str | None = None

    @classmethod
    def from_evidence(cls, name, level, detail, script, oracle, elapsed, notes=()):
        """Proved when a proof level was reached, else OracleOnly when every
        oracle check holds, else Failed."""
        ev = [str(r) for r in oracle]
        oracle_ok = bool(oracle) and all(oracle)
        if level:
            status = PROVED
        elif oracle_ok:
            status = ORACLE_ONLY
            detail = "oracle-equal in " + ", ".join(r.model for r in oracle)
        else:
            status = FAILED
            bad = [str(r) for r in oracle if not r]
            detail = bad[0] if bad else "no proof and no compatible model"
        if level and oracle and not oracle_ok:
            notes = list(notes) + ["WARNING: proved but oracle disagrees"]
        return cls(name, status, detail, ev, list(notes), elapsed,
                   script.to_text() if script is not None else None)

    def to_dict(self, timings: bool = False) -> dict:
        d = {"name": self.name, "status": self.status, "detail": self.detail,
             "evidence": self.evidence, "notes": self.notes}
        if self.script:
            d["script"] = self.script
        if timings:
            d["seconds"] = round(self.elapsed, 4)
        return d


@dataclass
class Report:
    suite: str
    items: list[Item] = field(default_factory=list)
    expected: set = field(default_factory=set)  # names whose failure is the point

    def add(self, item: Item):
        self.items.append(item)

    def __getitem__(self, name: str) -> Item:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return all(it.status not in (FAILED, FAILS) or it.name in self.expected
                   for it in self.items)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for it in self.items:
            out[it.status] = out.get(it.status, 0) + 1
        return out

    def to_text(self, timings: bool = False) -> str:
        width = max((len(it.name) for it in self.items), default=4)
        lines = [f"suite {self.suite}"]
        for it in self.items:
            line = f"  {it.name:<{width}}  {it.status:<10}  {it.detail}"
            if timings:
                line += f"  [{it.elapsed:.3f}s]"
            lines.append(line.rstrip())
            for n in it.notes:
                lines.append(f"  {'':<{width}}  {'':<10}  note: {n}")
        summary = ", ".join(f"{k} {v}" for k, v in sorted(self.counts().items()))
        lines.append(f"  total {len(self.items)}: {summary}")
        return "\n".join(lines) + "\n"

    def to_json(self, timings: bool = False) -> str:
        return json.dumps({"suite": self.suite, "counts": self.counts(),
                           "items": [it.to_dict(timings) for it in self.items]},
                          indent=2, sort_keys=True) + "\n"
