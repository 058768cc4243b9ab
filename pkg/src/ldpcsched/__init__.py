"""Quasi-cyclic LDPC decoding with reliability-driven dynamic scheduling."""

from .bpcore import CLAMP, MessageState, apply_c2v, c2v_update, hard_decision, syndrome_ok, v2c_update
from .channel import ChannelConfig, sample_llrs, trial_rng
from .codegraph import (
    BaseGraph,
    CodeSpec,
    GraphFormatError,
    LayerMap,
    LiftedCode,
    NoQualifyingCheckError,
    TannerGraph,
    build_code,
    first_check_node,
    from_dense,
    lift_base_graph,
    load_base_graph,
    load_code_spec,
    parse_alist,
    serialize_alist,
)
from .ipq import IndexedMinQueue
from .reliability import (
    ReliabilityState,
    affected_checks,
    check_error_prob,
    layer_average,
    penalized_prob,
    var_error_prob,
)
from .harness import (
    BlerPoint,
    ExperimentConfig,
    ExperimentResult,
    emit_csv,
    mcnemar_pvalue,
    parse_csv,
    run_experiment,
    wilson_interval,
)
from .schedulers import (
    HAVE_C_CORE,
    SCHEDULER_NAMES,
    DecodeConfig,
    DecodeOutcome,
    TraceRecord,
    active_backend,
    decode,
    decode_code,
    static_error_sequence,
)
from .trace import TraceReport, analyze_trace, write_trace_jsonl

__version__ = "0.1.0"
