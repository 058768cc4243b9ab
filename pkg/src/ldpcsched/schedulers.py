"""Scheduler strategy layer: names, configs, outcomes, backend dispatch.

The heavy decode loops live in a compiled extension (``ldpcsched._core``)
with a pure-Python twin (``ldpcsched._pycore``); the fastest available one
is picked at import and can be overridden with the ``LDPCSCHED_BACKEND``
environment variable ("c" or "py") or per call.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _pycore
from .codegraph import LayerMap, LiftedCode, NoQualifyingCheckError, TannerGraph, first_check_node
from .reliability import check_error_prob, layer_average

try:
    from . import _core
    HAVE_C_CORE = True
except ImportError:  # pragma: no cover - build-less install
    _core = None
    HAVE_C_CORE = False


SCHEDULER_NAMES = ("flooding", "lbp", "static-ep", "dyn-ebp", "dyn-pebp", "rbp-decay")


def active_backend(override: str | None = None) -> str:
    """Resolve the backend name: per-call override, env var, else compiled."""
    choice = override or os.environ.get("LDPCSCHED_BACKEND", "")
    if choice not in ("", "c", "py"):
        raise ValueError(f"unknown backend {choice!r} (use 'c' or 'py')")
    if choice == "c" and not HAVE_C_CORE:
        raise RuntimeError("compiled core requested but not built")
    if choice:
        return choice
    return "c" if HAVE_C_CORE else "py"


@dataclass(frozen=True)
class DecodeConfig:
    """Knobs shared by all schedulers; defaults follow the evaluation setup."""

    max_iters: int = 5
    gamma: float = 0.35
    prior_ratio: float = 1.0
    beta: float = 0.95
    granularity: str = "check"
    syndrome_every: int = 0  # extra mid-iteration cadence in updates; 0 = boundaries only
    first_node_rule: bool = True
    record_sequence: bool = False
    record_trace: bool = False
    audit_balance: bool = False

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")
        if self.prior_ratio <= 0.0:
            raise ValueError("prior_ratio must be positive")
        if self.granularity not in ("check", "layer"):
            raise ValueError("granularity must be 'check' or 'layer'")
        if self.syndrome_every < 0:
            raise ValueError("syndrome_every must be >= 0")


@dataclass(frozen=True)
class TraceRecord:
    """One check-node update: scheduling key before/after and the new count."""

    ordinal: int
    check: int
    layer: int
    key_before: float
    key_after: float
    count: int


@dataclass
class DecodeOutcome:
    scheduler: str
    success: bool
    iterations: int
    check_updates: int
    x: np.ndarray
    posterior: np.ndarray
    counters: dict[str, int]
    update_counts: np.ndarray
    max_spread: int = -1
    sequence: np.ndarray | None = None
    trace: list[TraceRecord] | None = None


_SCHED_CODE = {
    "flooding": _pycore.FLOODING,
    "lbp": _pycore.FIXED_SEQ,
    "static-ep": _pycore.FIXED_SEQ,
    "dyn-ebp": _pycore.DYN_EBP,
    "dyn-pebp": _pycore.DYN_PEBP,
    "rbp-decay": _pycore.RBP_DECAY,
}

_EMPTY_I32 = np.zeros(0, dtype=np.int32)
_EMPTY_I64 = np.zeros(0, dtype=np.int64)


def _layer_arrays(layers: LayerMap | None):
    if layers is None:
        return _EMPTY_I32, _EMPTY_I64, _EMPTY_I32, 0
    order = np.argsort(layers.layer_of_check, kind="stable").astype(np.int32)
    ptr = np.zeros(layers.num_layers + 1, dtype=np.int64)
    np.add.at(ptr, layers.layer_of_check + 1, 1)
    np.cumsum(ptr, out=ptr)
    return layers.layer_of_check, ptr, order, layers.num_layers


def static_error_sequence(graph: TannerGraph, C, lam: float = 1.0,
                          layers: LayerMap | None = None) -> np.ndarray:
    """Fixed schedule from channel information only.

    Initial check error probabilities are computed from the channel LLRs and
    sorted ascending (stable, so ties keep natural order); in layer mode the
    per-layer averages are sorted instead.
    """
    p0 = np.array([
        check_error_prob((float(C[v]) for v in graph.check_neighbors(k)), lam)
        for k in range(graph.num_checks)
    ])
    keys = layer_average(p0, layers) if layers is not None else p0
    return np.argsort(keys, kind="stable").astype(np.int32)


def decode(graph: TannerGraph, channel_llrs, scheduler: str,
           cfg: DecodeConfig = DecodeConfig(), *,
           layers: LayerMap | None = None,
           punctured=None,
           sequence=None,
           backend: str | None = None) -> DecodeOutcome:
    """Run one decode of ``channel_llrs`` under the named scheduler.

    ``layers`` is required for layer granularity; ``punctured`` feeds the
    first-update rule of the dynamic schedulers; ``sequence`` overrides the
    natural order of "lbp" (one iteration's unit permutation).
    """
    if scheduler not in SCHEDULER_NAMES:
        raise ValueError(f"unknown scheduler {scheduler!r}; pick one of {SCHEDULER_NAMES}")
    layer_mode = cfg.granularity == "layer"
    if layer_mode and scheduler != "flooding":
        if layers is None:
            raise ValueError("layer granularity needs a LayerMap")
    C = np.array(channel_llrs, dtype=np.float64)  # fresh writable copy for the kernels
    if C.shape != (graph.num_vars,):
        raise ValueError("channel LLR vector length must equal num_vars")

    layer_of_check, layer_ptr, layer_members, n_layers = _layer_arrays(
        layers if layer_mode else None)
    unit_count = n_layers if layer_mode else graph.num_checks

    if scheduler == "static-ep":
        if sequence is not None:
            raise ValueError("static-ep derives its own sequence")
        sequence = static_error_sequence(graph, C, cfg.prior_ratio,
                                         layers if layer_mode else None)
    if scheduler == "lbp":
        if sequence is None:
            sequence = np.arange(unit_count, dtype=np.int32)
        else:
            sequence = np.asarray(sequence, dtype=np.int32)
            if not np.array_equal(np.sort(sequence), np.arange(unit_count)):
                raise ValueError("lbp sequence must be a permutation of all units")

    first_check = -1
    if cfg.first_node_rule and scheduler in ("dyn-ebp", "dyn-pebp") and punctured is not None:
        try:
            first_check = first_check_node(graph, punctured)
        except NoQualifyingCheckError:
            first_check = -1

    impl = _core if active_backend(backend) == "c" else _pycore
    raw = impl.run_decode(
        graph.check_ptr, graph.check_vars, graph.var_ptr, graph.var_checks,
        graph.var_edge, graph.num_vars, graph.num_checks,
        layer_of_check, layer_ptr, layer_members, n_layers,
        C, _SCHED_CODE[scheduler], cfg.max_iters, cfg.gamma, cfg.prior_ratio,
        cfg.beta, layer_mode, first_check, cfg.syndrome_every,
        cfg.record_sequence, cfg.record_trace, cfg.audit_balance,
        sequence if sequence is None else np.asarray(sequence, dtype=np.int32),
    )

    trace = None
    if cfg.record_trace:
        trace = [TraceRecord(i, int(t[0]), int(t[1]), float(t[2]), float(t[3]), int(t[4]))
                 for i, t in enumerate(raw["trace"])]
    return DecodeOutcome(
        scheduler=scheduler,
        success=bool(raw["success"]),
        iterations=int(raw["iterations"]),
        check_updates=int(raw["updates"]),
        x=raw["x"],
        posterior=raw["posterior"],
        counters=dict(raw["counters"]),
        update_counts=raw["update_counts"],
        max_spread=int(raw["max_spread"]),
        sequence=raw["sequence"],
        trace=trace,
    )


def decode_code(code: LiftedCode, channel_llrs, scheduler: str,
                cfg: DecodeConfig = DecodeConfig(), *,
                backend: str | None = None, sequence=None) -> DecodeOutcome:
    """decode() with the graph, layers, and puncturing taken from a LiftedCode."""
    punct = np.nonzero(code.punctured)[0]
    return decode(code.graph, channel_llrs, scheduler, cfg,
                  layers=code.layers, punctured=punct if punct.size else None,
                  sequence=sequence, backend=backend)
