import numpy as np
import pytest
from conftest import random_code
from oracles import gf2_syndrome, scripted_dyn_ebp, scripted_rbp_decay

from ldpcsched.codegraph import from_dense, lift_base_graph, BaseGraph
from ldpcsched.reliability import check_error_prob, layer_average
from ldpcsched.schedulers import (
    HAVE_C_CORE,
    SCHEDULER_NAMES,
    DecodeConfig,
    decode,
    static_error_sequence,
)

ALL_BACKENDS = ("py", "c") if HAVE_C_CORE else ("py",)


def noisy_llrs(rng, n, sigma=0.9):
    y = 1.0 + rng.normal(0.0, sigma, n)
    return 2.0 * y / sigma**2


def test_unknown_scheduler_rejected(toy48):
    with pytest.raises(ValueError, match="unknown scheduler"):
        decode(toy48, np.zeros(8), "magic", DecodeConfig())


def test_config_validation():
    with pytest.raises(ValueError):
        DecodeConfig(max_iters=0)
    with pytest.raises(ValueError):
        DecodeConfig(gamma=1.5)
    with pytest.raises(ValueError):
        DecodeConfig(granularity="edge")
    with pytest.raises(ValueError):
        DecodeConfig(beta=0.0)


def test_success_iff_syndrome(toy48, toy48_dense):
    rng = np.random.default_rng(10)
    for trial in range(40):
        C = noisy_llrs(rng, 8, sigma=1.3)
        for name in SCHEDULER_NAMES:
            out = decode(toy48, C, name, DecodeConfig(max_iters=3))
            assert np.array_equal(out.x, (out.posterior < 0).astype(np.uint8))
            assert out.success == (not gf2_syndrome(toy48_dense, out.x).any())


def test_noiseless_all_schedulers_one_iteration(toy48):
    C = np.full(8, 30.0)
    for name in SCHEDULER_NAMES:
        out = decode(toy48, C, name, DecodeConfig())
        assert out.success
        assert out.iterations == 1
        assert out.check_updates == toy48.num_checks


def test_lbp_natural_order_default(toy48):
    out = decode(toy48, np.full(8, 5.0), "lbp",
                 DecodeConfig(record_sequence=True))
    assert out.sequence.tolist() == [0, 1, 2, 3]


def test_lbp_rejects_non_permutation(toy48):
    with pytest.raises(ValueError, match="permutation"):
        decode(toy48, np.zeros(8), "lbp", DecodeConfig(), sequence=[0, 1, 1, 3])


def test_lbp_accepts_custom_permutation(toy48):
    rng = np.random.default_rng(0)
    C = noisy_llrs(rng, 8)
    out = decode(toy48, C, "lbp", DecodeConfig(record_sequence=True, max_iters=2),
                 sequence=[3, 1, 0, 2])
    assert out.sequence[:4].tolist() == [3, 1, 0, 2]


def test_dyn_ebp_sequence_is_per_iteration_permutation(toy48):
    rng = np.random.default_rng(11)
    for _ in range(20):
        C = noisy_llrs(rng, 8, sigma=1.6)
        out = decode(toy48, C, "dyn-ebp",
                     DecodeConfig(max_iters=4, record_sequence=True))
        m = toy48.num_checks
        assert len(out.sequence) % m == 0
        for i in range(0, len(out.sequence), m):
            assert sorted(out.sequence[i:i + m].tolist()) == list(range(m))


def test_dyn_ebp_matches_scripted_algorithm(toy48, toy48_dense):
    # fixed toy code and seed: the step-by-step dense simulation with
    # enumeration-based probabilities must reproduce the schedule exactly
    rng = np.random.default_rng(20240517)
    for _ in range(5):
        C = noisy_llrs(rng, 8, sigma=1.2)
        out = decode(toy48, C, "dyn-ebp",
                     DecodeConfig(max_iters=5, record_sequence=True))
        seq_ref, L_ref, ok_ref = scripted_dyn_ebp(toy48_dense, C, 5)
        assert out.sequence.tolist() == seq_ref
        assert out.success == ok_ref
        assert np.max(np.abs(out.posterior - L_ref)) < 1e-9


def test_static_ep_matches_argsort_oracle():
    rng = np.random.default_rng(12)
    for _ in range(20):
        H = random_code(rng, n_vars=16, n_checks=8)
        g = from_dense(H)
        C = rng.normal(0.5, 2.0, 16)
        seq = static_error_sequence(g, C)
        p = np.array([check_error_prob([float(C[v]) for v in g.check_neighbors(k)])
                      for k in range(8)])
        assert seq.tolist() == np.argsort(p, kind="stable").tolist()
        out = decode(g, C, "static-ep", DecodeConfig(record_sequence=True, max_iters=2))
        assert out.sequence[:8].tolist() == seq.tolist()


def test_static_ep_uniform_channel_natural_order(toy48):
    # equal |C| and equal degrees leave ties everywhere: stable sort keeps 0..M-1
    C = np.full(8, 4.0)
    assert static_error_sequence(toy48, C).tolist() == [0, 1, 2, 3]


def test_static_ep_punctured_adjacent_scheduled_last():
    H = np.array([
        [1, 1, 1, 0, 0, 0],
        [0, 0, 1, 1, 1, 0],
        [0, 1, 0, 1, 0, 1],
    ], dtype=np.uint8)
    g = from_dense(H)
    C = np.array([0.0, 2.0, 3.0, 2.5, 4.0, 3.5])  # v0 punctured: only check 0 touches it
    seq = static_error_sequence(g, C).tolist()
    assert seq[-1] == 0  # its p is 0.5, every other check has p < 0.5


def test_static_ep_rejects_explicit_sequence(toy48):
    with pytest.raises(ValueError):
        decode(toy48, np.zeros(8), "static-ep", DecodeConfig(), sequence=[0, 1, 2, 3])


def test_pebp_gamma_one_balanced_updates(toy48):
    rng = np.random.default_rng(13)
    for _ in range(30):
        C = noisy_llrs(rng, 8, sigma=1.5)
        out = decode(toy48, C, "dyn-pebp",
                     DecodeConfig(max_iters=4, gamma=1.0, audit_balance=True))
        assert out.max_spread <= 1


def test_pebp_gamma_zero_immediate_repeat():
    # two disjoint checks; the reliable one keeps winning under pure greed
    H = np.array([[1, 1, 0], [0, 0, 1]], dtype=np.uint8)
    g = from_dense(H)
    C = np.array([8.0, 7.0, 0.3])
    out = decode(g, C, "dyn-pebp",
                 DecodeConfig(max_iters=3, gamma=0.0, record_sequence=True,
                              syndrome_every=0))
    seq = out.sequence.tolist()
    assert any(a == b for a, b in zip(seq, seq[1:]))


def test_rbp_decay_matches_scripted_oracle(toy48, toy48_dense):
    rng = np.random.default_rng(14)
    for beta in (1.0, 0.95, 0.5):
        C = noisy_llrs(rng, 8, sigma=1.4)
        out = decode(toy48, C, "rbp-decay",
                     DecodeConfig(max_iters=2, beta=beta, record_sequence=True,
                                  syndrome_every=0))
        n_sel = len(out.sequence)
        seq_ref, L_ref = scripted_rbp_decay(toy48_dense, C, n_sel, beta)
        assert out.sequence.tolist() == seq_ref
        assert np.max(np.abs(out.posterior - L_ref)) < 1e-9


def test_rbp_zero_residuals_runs_to_budget():
    # two zero-LLR neighbors freeze every prospective message at zero, so
    # residuals stay zero while the syndrome stays dirty: only the update
    # budget can end the decode
    g = from_dense(np.array([[1, 1, 1]], dtype=np.uint8))
    C = np.array([-5.0, 0.0, 0.0])
    out = decode(g, C, "rbp-decay", DecodeConfig(max_iters=2))
    assert not out.success
    assert out.check_updates == 2 * g.num_checks
    assert np.array_equal(out.posterior, C)


def test_first_node_rule_selects_designated_check():
    bg = BaseGraph(
        3, 6,
        np.array([0, 0, 0, 1, 1, 1, 2, 2]),
        np.array([0, 2, 3, 1, 3, 4, 2, 5]),
        np.array([0, 1, 0, 1, 2, 0, 2, 1]),
    )
    g, layers = lift_base_graph(bg, 2)
    punctured = [0, 1, 2, 3]  # base columns 0 and 1
    from ldpcsched.codegraph import first_check_node
    fc = first_check_node(g, punctured)
    rng = np.random.default_rng(15)
    C = noisy_llrs(rng, g.num_vars, sigma=1.0)
    C[punctured] = 0.0
    for name in ("dyn-ebp", "dyn-pebp"):
        out = decode(g, C, name, DecodeConfig(record_sequence=True),
                     punctured=punctured)
        assert out.sequence[0] == fc
        out_layer = decode(g, C, name,
                           DecodeConfig(record_sequence=True, granularity="layer"),
                           layers=layers, punctured=punctured)
        assert out_layer.sequence[0] == layers.layer_of_check[fc]
        off = decode(g, C, name, DecodeConfig(record_sequence=True,
                                              first_node_rule=False),
                     punctured=punctured)
        assert off.sequence is not None  # rule off still decodes


def test_first_node_rule_fallback_without_qualifier(toy48):
    # every check of this graph touches >= 2 of the punctured variables
    rng = np.random.default_rng(16)
    C = noisy_llrs(rng, 8)
    out = decode(toy48, C, "dyn-ebp", DecodeConfig(record_sequence=True),
                 punctured=list(range(8)))
    assert out.sequence is not None


def test_layer_mode_each_layer_once_per_iteration(small_lifted):
    graph, layers = small_lifted
    rng = np.random.default_rng(17)
    C = noisy_llrs(rng, graph.num_vars, sigma=1.5)
    out = decode(graph, C, "dyn-ebp",
                 DecodeConfig(max_iters=3, granularity="layer", record_sequence=True),
                 layers=layers)
    nl = layers.num_layers
    assert len(out.sequence) % nl == 0
    for i in range(0, len(out.sequence), nl):
        assert sorted(out.sequence[i:i + nl].tolist()) == list(range(nl))
    # member checks of one layer are updated together, ascending
    assert np.all(out.update_counts == out.check_updates // graph.num_checks)


def test_layer_mode_requires_layer_map(small_lifted):
    graph, _ = small_lifted
    with pytest.raises(ValueError, match="LayerMap"):
        decode(graph, np.zeros(graph.num_vars), "dyn-ebp",
               DecodeConfig(granularity="layer"))


def test_layer_keys_average_members(small_lifted):
    graph, layers = small_lifted
    rng = np.random.default_rng(18)
    C = noisy_llrs(rng, graph.num_vars, sigma=1.2)
    seq = static_error_sequence(graph, C, layers=layers)
    p0 = np.array([check_error_prob([float(C[v]) for v in graph.check_neighbors(k)])
                   for k in range(graph.num_checks)])
    keys = layer_average(p0, layers)
    assert seq.tolist() == np.argsort(keys, kind="stable").tolist()


def test_backend_parity_bit_identical(small_lifted):
    if not HAVE_C_CORE:
        pytest.skip("compiled core not built")
    graph, layers = small_lifted
    rng = np.random.default_rng(19)
    for trial in range(10):
        C = noisy_llrs(rng, graph.num_vars, sigma=1.4)
        for name in SCHEDULER_NAMES:
            for gran in ("check", "layer"):
                if gran == "layer" and name == "flooding":
                    continue
                cfg = DecodeConfig(max_iters=3, granularity=gran,
                                   record_sequence=True, record_trace=True,
                                   gamma=float(rng.choice([0.0, 0.35, 1.0])))
                a = decode(graph, C, name, cfg, layers=layers,
                           punctured=[0, 1], backend="py")
                b = decode(graph, C, name, cfg, layers=layers,
                           punctured=[0, 1], backend="c")
                assert a.success == b.success
                assert a.check_updates == b.check_updates
                assert np.array_equal(a.posterior, b.posterior)
                assert np.array_equal(a.sequence, b.sequence)
                assert np.array_equal(a.update_counts, b.update_counts)
                assert a.counters == b.counters


def test_counters_account_for_messages(toy48):
    rng = np.random.default_rng(20)
    C = noisy_llrs(rng, 8, sigma=0.4)
    out = decode(toy48, C, "lbp", DecodeConfig(max_iters=1))
    assert out.counters["v2c_msgs"] == toy48.num_edges
    assert out.counters["c2v_msgs"] == toy48.num_edges
    out = decode(toy48, C, "dyn-ebp", DecodeConfig(max_iters=1))
    assert out.counters["rel_recomputes"] > 0
    assert out.counters["queue_ops"] >= toy48.num_checks


def test_trace_records_well_formed(toy48):
    rng = np.random.default_rng(21)
    C = noisy_llrs(rng, 8, sigma=1.2)
    out = decode(toy48, C, "dyn-pebp",
                 DecodeConfig(max_iters=2, record_trace=True))
    assert len(out.trace) == out.check_updates
    for i, rec in enumerate(out.trace):
        assert rec.ordinal == i
        assert 0 <= rec.check < toy48.num_checks
        assert rec.count >= 1
