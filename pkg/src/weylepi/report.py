"""Check rows and suite reports with deterministic serialization."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Row:
    degree: int | None
    statement: str
    expected: Any
    computed: Any
    passed: bool
    paper_ref: str = ""

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "statement": self.statement,
            "expected": _plain(self.expected),
            "computed": _plain(self.computed),
            "pass": bool(self.passed),
            "paper_ref": self.paper_ref,
        }


def _plain(x):
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if hasattr(x, "item"):  # numpy scalar
        return x.item()
    return x


def check(rows: list, degree, statement: str, expected, computed, ref: str = "", passed: bool | None = None) -> bool:
    """Append a row comparing ``expected`` with ``computed``; return the verdict."""
    ok = (expected == computed) if passed is None else bool(passed)
    rows.append(Row(degree, statement, expected, computed, ok, ref))
    return ok


@dataclass
class Report:
    suite: str
    config: dict
    rows: list[Row] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def summary(self) -> dict:
        n_pass = sum(r.passed for r in self.rows)
        return {"rows": len(self.rows), "passed": n_pass, "failed": len(self.rows) - n_pass,
                "all_pass": n_pass == len(self.rows), "notes": list(self.notes)}

    def to_dict(self) -> dict:
        return {"suite": self.suite, "config": _plain(self.config),
                "rows": [r.to_dict() for r in self.rows], "summary": self.summary()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "statement", "expected", "computed", "pass", "paper_ref"])
        for r in self.rows:
            d = r.to_dict()
            w.writerow([d["degree"], d["statement"], json.dumps(d["expected"]), json.dumps(d["computed"]),
                        d["pass"], d["paper_ref"]])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"suite {self.suite}"]
        for r in self.rows:
            mark = "PASS" if r.passed else "FAIL"
            deg = "-" if r.degree is None else r.degree
            lines.append(f"{mark} d={deg} {r.statement}: expected={r.expected} computed={r.computed}")
        s = self.summary()
        lines.append(f"{s['passed']}/{s['rows']} passed")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "text":
            return self.to_text()
        raise ValueError(f"unknown format {fmt!r}")
