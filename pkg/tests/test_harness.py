import math

import numpy as np
import pytest
from scipy.optimize import brentq

from ldpcsched.harness import (
    BlerPoint,
    ExperimentConfig,
    emit_csv,
    mcnemar_pvalue,
    parse_csv,
    run_experiment,
    wilson_interval,
)
from ldpcsched.schedulers import DecodeConfig


def make_cfg(tmp_path, **kw):
    spec = tmp_path / "code.toml"
    spec.write_text('base_graph = "bg1"\nz = 4\nparity_truncation = 44\n')
    defaults = dict(
        code_spec=str(spec),
        schedulers=("lbp", "dyn-ebp"),
        decode=DecodeConfig(),
        snrs_db=(1.0,),
        trials=40,
        master_seed=7,
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        make_cfg(tmp_path, trials=0)
    with pytest.raises(ValueError):
        make_cfg(tmp_path, snrs_db=())
    with pytest.raises(ValueError):
        make_cfg(tmp_path, schedulers=("lbp", "nope"))


def test_noiseless_single_trial_zero_bler(tmp_path):
    cfg = make_cfg(tmp_path, trials=1, noiseless=True,
                   schedulers=("flooding", "lbp", "static-ep", "dyn-ebp",
                               "dyn-pebp", "rbp-decay"))
    result = run_experiment(cfg)
    assert len(result.points) == 6
    for p in result.points:
        assert p.trials == 1 and p.bler == 0.0 and p.block_errors == 0


def test_same_seed_byte_identical_csv(tmp_path):
    cfg = make_cfg(tmp_path, snrs_db=(0.0, 1.0), trials=60)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_experiment(cfg).points, out1)
    emit_csv(run_experiment(cfg).points, out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_worker_count_does_not_change_results(tmp_path):
    cfg1 = make_cfg(tmp_path, trials=64, workers=1, batch_size=16)
    cfg2 = make_cfg(tmp_path, trials=64, workers=2, batch_size=16)
    out1, out2 = tmp_path / "w1.csv", tmp_path / "w2.csv"
    emit_csv(run_experiment(cfg1).points, out1)
    emit_csv(run_experiment(cfg2).points, out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_paired_trials_and_kept_outcomes(tmp_path):
    cfg = make_cfg(tmp_path, trials=50, snrs_db=(0.5,), keep_trial_outcomes=True,
                   schedulers=("lbp", "lbp".replace("l", "l"), "dyn-ebp")[::2])
    result = run_experiment(cfg)
    a = result.trial_errors[("lbp", 0)]
    b = result.trial_errors[("dyn-ebp", 0)]
    assert len(a) == len(b) == 50


def test_stop_at_errors_records_actual_trials(tmp_path):
    # SNR low enough that everything fails: stop after one batch
    cfg = make_cfg(tmp_path, trials=400, batch_size=50, stop_errors=20,
                   snrs_db=(-12.0,), schedulers=("lbp",))
    result = run_experiment(cfg)
    p = result.points[0]
    assert p.trials == 50  # decided at the batch boundary
    assert p.block_errors >= 20
    assert p.bler == p.block_errors / p.trials
    assert p.ci_lo <= p.bler <= p.ci_hi


def test_csv_round_trip(tmp_path):
    points = [
        BlerPoint("lbp", -1.5, 1000, 66, 1234, 0.066, 1.234e-3,
                  0.052, 0.083, 4.2, 2345.6),
        BlerPoint("dyn-ebp", -1.5, 1000, 33, 600, 0.033, 6.0e-4,
                  0.023, 0.046, 3.7, 2100.0),
    ]
    path = tmp_path / "t.csv"
    emit_csv(points, path)
    text = path.read_text()
    assert text.endswith("\n")
    assert text.splitlines()[0] == ("scheduler,es_n0_db,trials,block_errors,"
                                    "bit_errors,bler,ber,ci_lo,ci_hi,"
                                    "mean_iters,mean_updates")
    assert parse_csv(path) == points


def test_csv_empty_table_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert path.read_text() == ("scheduler,es_n0_db,trials,block_errors,"
                                "bit_errors,bler,ber,ci_lo,ci_hi,"
                                "mean_iters,mean_updates\n")
    assert parse_csv(path) == []


def test_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n")
    with pytest.raises(ValueError, match="header"):
        parse_csv(path)


def _wilson_by_root_finding(k, n):
    z = 1.959963984540054
    phat = k / n

    def low_edge(p):
        return (phat - p) - z * math.sqrt(p * (1 - p) / n)

    def high_edge(p):
        return (phat - p) + z * math.sqrt(p * (1 - p) / n)

    # avoid the degenerate root at p = phat when k is 0 or n
    lo = 0.0 if k == 0 else brentq(low_edge, 1e-12, phat if k < n else 1 - 1e-12)
    hi = 1.0 if k == n else brentq(high_edge, max(phat, 1e-12), 1 - 1e-12)
    return lo, hi


def test_wilson_interval_against_root_finding_oracle():
    for k, n in [(0, 10), (1, 10), (5, 10), (10, 10), (66, 1000), (200, 20000)]:
        lo, hi = wilson_interval(k, n)
        lo_ref, hi_ref = _wilson_by_root_finding(k, n)
        assert lo == pytest.approx(lo_ref, abs=1e-9)
        assert hi == pytest.approx(hi_ref, abs=1e-9)
        assert lo <= k / n <= hi


def test_mcnemar_matches_enumeration():
    def exact(n01, n10):
        n = n01 + n10
        return sum(math.comb(n, i) for i in range(n01, n + 1)) / 2.0**n

    for n01, n10 in [(0, 0), (5, 5), (12, 3), (3, 12), (30, 10)]:
        want = 1.0 if n01 + n10 == 0 else exact(n01, n10)
        assert mcnemar_pvalue(n01, n10) == pytest.approx(want, rel=1e-12)


def test_mcnemar_direction():
    # many baseline-only failures: strong evidence the challenger is better
    assert mcnemar_pvalue(40, 5) < 1e-6
    assert mcnemar_pvalue(5, 40) > 0.999


def test_golden_csv_frozen(tmp_path):
    # regenerate the checked-in artifact from its recorded configuration
    from pathlib import Path

    from ldpcsched.codegraph import resolve_base_graph_path

    spec = str(resolve_base_graph_path("bg1").parent / "nr_z16_r040.toml")
    cfg = ExperimentConfig(
        code_spec=spec,
        schedulers=("flooding", "lbp", "static-ep", "dyn-ebp", "dyn-pebp",
                    "rbp-decay"),
        decode=DecodeConfig(max_iters=5, granularity="layer"),
        snrs_db=(-2.2, -1.8, -1.4),
        trials=400,
        stop_errors=10**9,
        master_seed=424242,
        workers=2,
        batch_size=200,
    )
    out = tmp_path / "regen.csv"
    emit_csv(run_experiment(cfg).points, out)
    golden = Path(__file__).parent / "data" / "golden_z16.csv"
    assert out.read_bytes() == golden.read_bytes()


def test_statistical_self_consistency(tmp_path):
    # two independently seeded runs on a small code agree within the
    # Wilson interval of the first
    spec = tmp_path / "toy.toml"
    spec.write_text('base_graph = "bg1"\nz = 2\nparity_truncation = 22\n')
    base = dict(
        code_spec=str(spec),
        schedulers=("lbp",),
        decode=DecodeConfig(),
        snrs_db=(-1.0,),
        trials=10_000,
        stop_errors=10**9,
        batch_size=5000,
    )
    p1 = run_experiment(ExperimentConfig(master_seed=1, **base)).points[0]
    p2 = run_experiment(ExperimentConfig(master_seed=2, **base)).points[0]
    assert p1.trials == p2.trials == 10_000
    # both estimates carry sampling noise, so the sound consistency check
    # is that the two Wilson intervals overlap
    assert max(p1.ci_lo, p2.ci_lo) <= min(p1.ci_hi, p2.ci_hi)
