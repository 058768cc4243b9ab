"""BLER-versus-Es/N0 curve rendering from simulation result CSVs.

This package talks to the decoder library only through its documented CSV
schema, so it works unchanged against any producer of the same columns.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

REQUIRED_COLUMNS = ("scheduler", "es_n0_db", "trials", "block_errors",
                    "bit_errors", "bler", "ber", "ci_lo", "ci_hi",
                    "mean_iters", "mean_updates")

# Stable per-scheduler styling so multi-panel figures stay comparable.
DEFAULT_STYLES = {
    "flooding": dict(color="#6B7280", marker="v", label="flooding BP"),
    "lbp": dict(color="#1F77B4", marker="o", label="layered BP (natural)"),
    "static-ep": dict(color="#2CA02C", marker="s", label="static channel-error order"),
    "rbp-decay": dict(color="#9467BD", marker="d", label="decaying residual BP"),
    "dyn-ebp": dict(color="#D62728", marker="^", label="dynamic error-prob (once/iter)"),
    "dyn-pebp": dict(color="#FF7F0E", marker="*", label="dynamic penalized error-prob"),
}


class SchemaError(ValueError):
    """The CSV does not match the documented result schema."""


@dataclass(frozen=True)
class PlotSpec:
    inputs: tuple[str, ...]
    output: str
    title: str = ""
    labels: dict = field(default_factory=dict)  # scheduler -> legend label
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        for p in self.inputs:
            if not Path(p).exists():
                raise FileNotFoundError(f"input CSV not found: {p}")


def read_results(path) -> dict[str, list[dict]]:
    """Parse one results CSV into per-scheduler rows sorted by SNR."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in REQUIRED_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        by_sched: dict[str, list[dict]] = {}
        for lineno, row in enumerate(reader, start=2):
            try:
                parsed = {
                    "es_n0_db": float(row["es_n0_db"]),
                    "bler": float(row["bler"]),
                    "ci_lo": float(row["ci_lo"]),
                    "ci_hi": float(row["ci_hi"]),
                    "trials": int(row["trials"]),
                }
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{path} line {lineno}: {exc}") from None
            by_sched.setdefault(row["scheduler"], []).append(parsed)
    if not by_sched:
        raise SchemaError(f"{path}: no data rows")
    for rows in by_sched.values():
        rows.sort(key=lambda r: r["es_n0_db"])
    return by_sched


def _floor(value: float, floor: float = 1e-12) -> float:
    return max(value, floor)


def render(spec: PlotSpec) -> str:
    """Draw one semilog-BLER panel per input CSV; returns the output path."""
    data = [read_results(p) for p in spec.inputs]
    n = len(data)
    fig, axes = plt.subplots(1, n, figsize=(6.4 * n, 4.8), squeeze=False)
    for ax, path, by_sched in zip(axes[0], spec.inputs, data):
        for sched in sorted(by_sched, key=lambda s: list(DEFAULT_STYLES).index(s)
                            if s in DEFAULT_STYLES else 99):
            rows = by_sched[sched]
            x = [r["es_n0_db"] for r in rows]
            y = [_floor(r["bler"]) for r in rows]
            # asymmetric interval bars, clipped for the log axis
            lo = [max(r["bler"] - r["ci_lo"], 0.0) for r in rows]
            hi = [max(r["ci_hi"] - r["bler"], 0.0) for r in rows]
            lo = [min(l, y_i - 1e-15) if y_i - l <= 0 else l for l, y_i in zip(lo, y)]
            style = dict(DEFAULT_STYLES.get(sched, dict(marker="x")))
            style["label"] = spec.labels.get(sched, style.get("label", sched))
            ax.errorbar(x, y, yerr=[lo, hi], capsize=3, linewidth=1.4, **style)
        ax.set_yscale("log")
        ax.set_xlabel(r"$E_s/N_0$ (dB)")
        ax.set_ylabel("BLER")
        ax.grid(True, which="both", linestyle=":", linewidth=0.5)
        ax.legend(fontsize=8)
        if spec.xlim:
            ax.set_xlim(*spec.xlim)
        if spec.ylim:
            ax.set_ylim(*spec.ylim)
        if n > 1:
            ax.set_title(Path(path).stem, fontsize=10)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return spec.output
