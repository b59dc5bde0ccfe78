"""Run configuration and self-describing CSV / JSON reports."""
from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field


@dataclass
class RunConfig:
    command: str
    c: float = 0.25
    seed: int = 42
    n: int = 1_000_000
    tol_d: float = 1e-8
    num_samples: int = 10_000
    max_depth: int = 2**20
    burn_in: int = 1000
    output_format: str = "csv"
    output_path: str | None = None
    extra: dict = field(default_factory=dict)

    def canonical(self):
        """Sorted ``key=value`` pairs; ``output_path`` is left out so a report's
        bytes do not depend on where it is written."""
        items = {k: v for k, v in asdict(self).items() if k not in ("extra", "output_path")}
        items.update(self.extra)
        return " ".join(f"{k}={_fmt(items[k])}" for k in sorted(items))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):  # numpy scalar
        return _fmt(v.item())
    return str(v)


def _json_value(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


@dataclass
class ExperimentReport:
    config: RunConfig
    columns: list
    rows: list
    summary: dict
    clamp_count: int = 0
    wall_time: float = 0.0  # diagnostic only, never serialised

    @property
    def passed(self):
        return bool(self.summary.get("passed", True))

    def to_csv(self):
        out = io.StringIO()
        out.write(f"# config: {self.config.canonical()}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")
        for k, v in self.summary.items():
            out.write(f"# summary: {k}={_fmt(v)}\n")
        out.write(f"# summary: clamp_count={self.clamp_count}\n")
        return out.getvalue()

    def to_json(self):
        doc = {
            "config": {k: _json_value(v) for k, v in
                       sorted({**{k: v for k, v in asdict(self.config).items()
                                  if k not in ("extra", "output_path")},
                               **self.config.extra}.items())},
            "columns": list(self.columns),
            "rows": [[_json_value(v) for v in row] for row in self.rows],
            "summary": {k: _json_value(v) for k, v in self.summary.items()},
            "clamp_count": self.clamp_count,
        }
        return json.dumps(doc, indent=1) + "\n"

    def render(self):
        return self.to_json() if self.config.output_format == "json" else self.to_csv()
