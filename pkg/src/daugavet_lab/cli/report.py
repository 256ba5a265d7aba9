"""Scenario records, expectation checks, execution and report emission."""

from __future__ import annotations

import copy
import json
import math
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from ..errors import ConfigError, LabError
from ..optim import DEFAULT_BUDGET
from .config import Builder
from .ops import OpContext, run_op

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"
EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}
EXIT_CONFIG = 3


@dataclass
class Scenario:
    name: str
    construction: dict
    expected: dict
    anchor: str
    description: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "description": self.description,
                "construction": copy.deepcopy(self.construction),
                "expected": copy.deepcopy(self.expected)}

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            return cls(d["name"], copy.deepcopy(d["construction"]), copy.deepcopy(d.get("expected", {})),
                       d.get("anchor", ""), d.get("description", ""))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed scenario: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario file is not valid JSON: {exc}") from exc


@dataclass
class Report:
    scenario: str
    anchor: str
    seed: int
    budget: int
    ops: list = field(default_factory=list)
    verdict: str = PASS
    wall_time: Optional[float] = None

    def to_dict(self) -> dict:
        d = {"scenario": self.scenario, "anchor": self.anchor, "seed": self.seed,
             "budget": self.budget, "ops": self.ops, "verdict": self.verdict}
        if self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return d


def resolve(obj: Any, path: str):
    """Follow a dotted path; integer components index lists."""
    cur = obj
    for part in path.split(".") if path else []:
        if isinstance(cur, list):
            cur = cur[int(part)]
        elif isinstance(cur, dict):
            cur = cur[part]
        else:
            raise KeyError(path)
    return cur


def evaluate_check(result: dict, check: dict) -> dict:
    path = check.get("path", "")
    try:
        actual = resolve(result, path)
        missing = False
    except (KeyError, IndexError, ValueError):
        actual, missing = None, True
    ok = not missing
    if ok and "equals" in check:
        ok = actual == check["equals"]
    if ok and "approx" in check:
        ok = isinstance(actual, (int, float)) and abs(actual - check["approx"]) <= check.get("tol", 1e-9)
    if ok and "ge" in check:
        ok = isinstance(actual, (int, float)) and actual >= check["ge"]
    if ok and "le" in check:
        ok = isinstance(actual, (int, float)) and actual <= check["le"]
    if ok and "length" in check:
        ok = isinstance(actual, list) and len(actual) == check["length"]
    if ok:
        status = PASS
    elif actual == "Inconclusive" or (missing and isinstance(result, dict)
                                      and "Inconclusive" in (result.get("status"), result.get("verdict"))):
        status = INCONCLUSIVE
    else:
        status = FAIL
    out = {k: v for k, v in check.items()}
    out.update({"actual": actual, "status": status})
    return out


def _combine(statuses) -> str:
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


def run_scenario(scenario: Scenario, overrides: Optional[dict] = None, timing: bool = False) -> Report:
    """Execute the scenario's ops and compare with its expectations.

    ``overrides`` may set ``seed``, ``budget`` and ``tol``; op-level budgets
    stay as written.
    """
    overrides = overrides or {}
    c = scenario.construction
    seed = int(overrides.get("seed", c.get("seed", 0)))
    budget = int(overrides.get("budget", c.get("budget", DEFAULT_BUDGET)))
    tol = overrides.get("tol", c.get("tol"))
    builder = Builder(c)
    builder.build_all()
    ctx = OpContext(builder, seed, budget, tol)
    report = Report(scenario.name, scenario.anchor, seed, budget)
    start = time.perf_counter()
    ops = c.get("ops", [])
    if not ops:
        raise ConfigError(f"scenario {scenario.name!r} has no ops")
    for i, op in enumerate(ops):
        oid = op.get("id", f"op{i}")
        t0 = time.perf_counter()
        try:
            result = run_op(op, ctx)
        except ConfigError:
            raise
        except LabError as exc:
            result = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        checks = [evaluate_check(result, ch) for ch in scenario.expected.get(oid, [])]
        entry = {"id": oid, "op": op["op"], "result": result, "checks": checks,
                 "status": _combine(ch["status"] for ch in checks)}
        if timing:
            entry["wall_time"] = time.perf_counter() - t0
        report.ops.append(entry)
    report.verdict = _combine(e["status"] for e in report.ops)
    if timing:
        report.wall_time = time.perf_counter() - start
    return report


def _finite(obj):
    """Replace non-finite floats by strings so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def report_json(report) -> str:
    d = report.to_dict() if isinstance(report, Report) else report
    return json.dumps(_finite(d), sort_keys=True, indent=2, allow_nan=False) + "\n"


def report_table(report) -> str:
    d = report.to_dict() if isinstance(report, Report) else report
    lines = [f"{d['scenario']}  [{d['anchor']}]  seed={d['seed']}  budget={d['budget']}  -> {d['verdict']}"]
    for e in d["ops"]:
        lines.append(f"  {e['id']:<24} {e['op']:<14} {e['status']}")
        for ch in e["checks"]:
            cond = ", ".join(f"{k}={ch[k]}" for k in ("equals", "approx", "ge", "le", "length") if k in ch)
            actual = ch["actual"]
            if isinstance(actual, float):
                actual = f"{actual:.12g}"
            elif isinstance(actual, (list, dict)):
                actual = json.dumps(_finite(actual))[:60]
            lines.append(f"      {ch['status']:<13} {ch.get('path', ''):<36} {cond}  actual={actual}")
    return "\n".join(lines) + "\n"


def emit_report(report, path: Optional[str] = None, fmt: str = "json") -> str:
    """Serialize a report (or list of reports); write it to ``path`` if given."""
    many = report if isinstance(report, list) else [report]
    if fmt == "json":
        if isinstance(report, list):
            text = json.dumps([_finite(r.to_dict()) for r in many], sort_keys=True, indent=2,
                              allow_nan=False) + "\n"
        else:
            text = report_json(report)
    elif fmt == "table":
        text = "".join(report_table(r) for r in many)
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write report to {path}: {exc}") from exc
    return text
