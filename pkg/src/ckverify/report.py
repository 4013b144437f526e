"""Check reports and residual scaling."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

__all__ = ["CheckReport", "ResidualAccumulator", "relative", "reports_to_json", "format_table"]

ABS_FLOOR = 1e-14


def relative(res: float, terms, scale: float = 0.0) -> float:
    """Residual divided by the largest term magnitude, floored at ``ABS_FLOOR``.

    ``scale`` is an extra reference magnitude for identities whose terms may
    all vanish at once (for example one-sided identities such as ``del phi = 0``).
    """
    ref = max([float(t) for t in terms] + [float(scale), ABS_FLOOR])
    return float(res) / ref


@dataclass
class CheckReport:
    """Outcome of one named identity check over sampled points."""

    name: str
    paper_ref: str
    seed: int
    n_points: int
    max_abs: float
    max_rel: float
    tol: float
    passed: bool
    ms: float
    status: str = "ok"
    note: str = ""
    values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "paper_ref": self.paper_ref,
            "seed": self.seed,
            "n_points": self.n_points,
            "max_abs": _clean(self.max_abs),
            "max_rel": _clean(self.max_rel),
            "tol": self.tol,
            "pass": self.passed,
            "ms": round(self.ms, 3),
        }
        if self.status != "ok":
            d["status"] = self.status
        if self.note:
            d["note"] = self.note
        return d

    @classmethod
    def skipped(cls, name: str, paper_ref: str, seed: int, tol: float, note: str) -> "CheckReport":
        return cls(name, paper_ref, seed, 0, 0.0, 0.0, tol, True, 0.0, "not applicable", note)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        if self.status != "ok":
            flag = "SKIP"
        return f"{flag}  {self.name:<44s} max_rel={self.max_rel:.2e}  tol={self.tol:.0e}  n={self.n_points}"


def _clean(x: float):
    x = float(x)
    if np.isnan(x):
        return None
    return x


class ResidualAccumulator:
    """Collects per-point residuals for one named check.

    Aggregation is a max, so the order in which points are added does not
    matter.
    """

    def __init__(self, name: str, paper_ref: str, tol: float, seed: int = 0):
        self.name = name
        self.paper_ref = paper_ref
        self.tol = tol
        self.seed = seed
        self.n = 0
        self.max_abs = 0.0
        self.max_rel = 0.0
        self._t0 = time.perf_counter()

    def add(self, res: float, terms=(), scale: float = 0.0) -> float:
        r = relative(res, terms, scale)
        self.n += 1
        self.max_abs = max(self.max_abs, float(res))
        self.max_rel = max(self.max_rel, r)
        if np.isnan(r):
            self.max_rel = float("nan")
        return r

    def report(self) -> CheckReport:
        ms = 1e3 * (time.perf_counter() - self._t0)
        ok = bool(self.n > 0 and self.max_rel <= self.tol)
        return CheckReport(self.name, self.paper_ref, self.seed, self.n, self.max_abs,
                           self.max_rel, self.tol, ok, ms)


def reports_to_json(reports, extra: dict | None = None, include_time: bool = True) -> str:
    entries = []
    for r in reports:
        d = r.to_dict()
        if not include_time:
            d.pop("ms")
        entries.append(d)
    doc = {"schema": 1}
    if extra:
        doc.update(extra)
    doc["all_pass"] = all(r.passed for r in reports)
    doc["checks"] = entries
    return json.dumps(doc, indent=2, sort_keys=False)


def format_table(reports) -> str:
    return "\n".join(r.line() for r in reports)


