"""FunctionalReport and its CSV / JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class FunctionalReport:
    name: str
    grid: list
    values: list
    target: float
    constants: dict = field(default_factory=dict)
    resolution_achieved: float | None = None
    cache_fingerprint: str = ""
    metadata: dict = field(default_factory=dict)
    targets: list | None = None  # per-point targets when they differ along the grid

    def __post_init__(self):
        self.grid = [float(g) for g in self.grid]
        self.values = [float(v) for v in self.values]
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values differ in length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("report grid must be strictly increasing")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("report values must be finite")
        if self.targets is not None:
            self.targets = [float(t) for t in self.targets]
            if len(self.targets) != len(self.values):
                raise ValueError("targets and values differ in length")

    def target_at(self, i):
        return self.targets[i] if self.targets is not None else float(self.target)

    @property
    def residuals(self) -> list:
        return [v - self.target_at(i) for i, v in enumerate(self.values)]

    def residuals_non_increasing(self) -> bool:
        r = [abs(x) for x in self.residuals]
        return all(b <= a for a, b in zip(r, r[1:]))

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "constants": dict(self.constants),
            "grid": list(self.grid),
            "values": list(self.values),
            "target": float(self.target),
            "residuals": self.residuals,
            "resolution_achieved": self.resolution_achieved,
            "cache_fingerprint": self.cache_fingerprint,
        }
        if self.targets is not None:
            out["targets"] = list(self.targets)
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _round17(obj):
    # repr of a float already round-trips; 17 digits matches the CSV output
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round17(v) for v in obj]
    return obj


def report_to_json(report: FunctionalReport) -> str:
    return json.dumps(_round17(report.to_dict()), indent=2, sort_keys=True) + "\n"


def report_to_csv(report: FunctionalReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["param", "value", "target", "residual"])
    for i, (g, v, r) in enumerate(zip(report.grid, report.values, report.residuals)):
        writer.writerow([_fmt(g), _fmt(v), _fmt(report.target_at(i)), _fmt(r)])
    return buf.getvalue()


def emit_report(report: FunctionalReport, fmt: str, path=None) -> str:
    """Serialise ``report`` as ``csv`` or ``json``; write to ``path`` when given."""
    if fmt == "json":
        text = report_to_json(report)
    elif fmt == "csv":
        text = report_to_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text
