import json

import numpy as np
import pytest
from conftest import random_code

from ldpcsched.codegraph import from_dense
from ldpcsched.schedulers import DecodeConfig, decode
from ldpcsched.trace import analyze_trace, write_trace_jsonl


def run_and_dump(tmp_path, graph, C, name, cfg):
    out = decode(graph, C, name, cfg)
    path = tmp_path / "trace.jsonl"
    with open(path, "w") as f:
        write_trace_jsonl(out, f)
    return out, path


def test_dyn_ebp_repeats_only_at_boundaries(tmp_path, toy48):
    rng = np.random.default_rng(30)
    for _ in range(10):
        C = 2.0 * (1.0 + rng.normal(0, 1.4, 8)) / 1.4**2
        out, path = run_and_dump(tmp_path, toy48, C, "dyn-ebp",
                                 DecodeConfig(max_iters=4, record_trace=True,
                                              record_sequence=True))
        report = analyze_trace(path)
        assert report.total_updates == out.check_updates
        # within-iteration repeats are impossible: count boundary coincidences
        m = toy48.num_checks
        seq = out.sequence.tolist()
        boundary = sum(1 for i in range(m - 1, len(seq) - 1, m)
                       if seq[i] == seq[i + 1])
        assert report.immediate_repeats == boundary


def test_gamma_zero_repeat_detected(tmp_path):
    g = from_dense(np.array([[1, 1, 0], [0, 0, 1]], dtype=np.uint8))
    C = np.array([8.0, 7.0, 0.3])
    out, path = run_and_dump(tmp_path, g, C, "dyn-pebp",
                             DecodeConfig(max_iters=3, gamma=0.0,
                                          record_trace=True, syndrome_every=0))
    report = analyze_trace(path)
    assert report.immediate_repeats >= 1
    assert report.max_count >= 2  # the favored check was hit back to back


def test_empty_trace_zero_report(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    report = analyze_trace(path)
    assert report.total_updates == 0
    assert report.immediate_repeats == 0
    assert report.check_histogram == {}
    assert report.count_spread == 0


def test_malformed_line_names_lineno(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"ord": 0, "check": 1, "layer": -1}\nnot json\n')
    with pytest.raises(ValueError, match="line 2"):
        analyze_trace(path)


def test_histogram_matches_update_counts(tmp_path):
    rng = np.random.default_rng(31)
    g = from_dense(random_code(rng, n_vars=12, n_checks=6))
    C = rng.normal(1.0, 1.5, 12) * 2
    out, path = run_and_dump(tmp_path, g, C, "dyn-pebp",
                             DecodeConfig(max_iters=3, gamma=0.35,
                                          record_trace=True))
    report = analyze_trace(path)
    for k, cnt in report.check_histogram.items():
        assert cnt == out.update_counts[k]
    assert report.max_count == out.update_counts.max()


def test_layer_mode_trace_has_layer_repeats(tmp_path, small_lifted):
    graph, layers = small_lifted
    rng = np.random.default_rng(32)
    C = rng.normal(1.0, 1.3, graph.num_vars) * 2
    out = decode(graph, C, "dyn-pebp",
                 DecodeConfig(max_iters=2, gamma=0.0, granularity="layer",
                              record_trace=True, syndrome_every=0),
                 layers=layers)
    path = tmp_path / "layer.jsonl"
    with open(path, "w") as f:
        write_trace_jsonl(out, f)
    report = analyze_trace(path)
    assert report.total_updates == out.check_updates
    assert report.layer_immediate_repeats >= 0  # field present and counted
    rows = [json.loads(l) for l in path.read_text().splitlines()]
    assert all(r["layer"] >= 0 for r in rows)


def test_write_without_trace_raises(toy48):
    out = decode(toy48, np.full(8, 3.0), "lbp", DecodeConfig())
    with pytest.raises(ValueError, match="record_trace"):
        import io
        write_trace_jsonl(out, io.StringIO())
