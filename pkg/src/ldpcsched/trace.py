"""JSON-lines update traces and the overlap/balance report.

A trace row records one check-node update: its ordinal, the check id, the
owning layer (-1 at check granularity), the scheduling key before/after, and
the check's update count afterwards. Keys are null for schedulers that do
not maintain them (flooding, fixed sequences).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from .schedulers import DecodeOutcome, TraceRecord


def _jsonable(v: float):
    return None if (v is None or math.isnan(v)) else v


def write_trace_jsonl(records: list[TraceRecord] | DecodeOutcome, fp) -> None:
    """Append trace rows to an open text file."""
    if isinstance(records, DecodeOutcome):
        if records.trace is None:
            raise ValueError("decode was run without record_trace")
        records = records.trace
    for r in records:
        fp.write(json.dumps({
            "ord": r.ordinal,
            "check": r.check,
            "layer": r.layer,
            "key_before": _jsonable(r.key_before),
            "key_after": _jsonable(r.key_after),
            "count": r.count,
        }) + "\n")


@dataclass
class TraceReport:
    total_updates: int
    immediate_repeats: int
    layer_immediate_repeats: int
    check_histogram: dict[int, int]
    max_count: int
    min_count: int

    @property
    def count_spread(self) -> int:
        return self.max_count - self.min_count

    def to_json(self) -> str:
        d = asdict(self)
        d["count_spread"] = self.count_spread
        d["check_histogram"] = {str(k): v for k, v in sorted(self.check_histogram.items())}
        return json.dumps(d, indent=2)


def analyze_trace(path) -> TraceReport:
    """Scan a JSON-lines trace for repeat pathologies and update balance.

    Immediate repeats are back-to-back updates of the same check (same layer
    for the layer counter); histogram and spread cover the checks that
    appear in the trace.
    """
    hist: dict[int, int] = {}
    repeats = 0
    layer_repeats = 0
    prev_check = None
    prev_layer = None
    total = 0
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                check = int(row["check"])
                layer = int(row["layer"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}: malformed trace line {lineno}: {exc}") from None
            total += 1
            hist[check] = hist.get(check, 0) + 1
            if prev_check is not None and check == prev_check:
                repeats += 1
            if prev_layer is not None and layer >= 0 and layer == prev_layer:
                layer_repeats += 1
            prev_check = check
            prev_layer = layer if layer >= 0 else None
    if not hist:
        return TraceReport(0, 0, 0, {}, 0, 0)
    return TraceReport(
        total_updates=total,
        immediate_repeats=repeats,
        layer_immediate_repeats=layer_repeats,
        check_histogram=hist,
        max_count=max(hist.values()),
        min_count=min(hist.values()),
    )
