"""Command line entry points: sim, trace, graphinfo.

Precedence for sim settings: built-in defaults, then the --config TOML file,
then explicit flags.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from .codegraph import build_code, load_code_spec, parse_alist
from .harness import ExperimentConfig, emit_csv, run_experiment
from .schedulers import DecodeConfig, active_backend, decode_code
from .channel import sample_llrs, trial_rng
from .trace import analyze_trace, write_trace_jsonl

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def _add_sim_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file with any of the sim settings")
    p.add_argument("--code", help="code spec TOML path")
    p.add_argument("--schedulers", help="comma-separated list, e.g. lbp,dyn-ebp,dyn-pebp")
    p.add_argument("--snrs", help="comma-separated Es/N0 list in dB")
    p.add_argument("--trials", type=int)
    p.add_argument("--stop-errors", type=int, dest="stop_errors")
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--max-iters", type=int, dest="max_iters")
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--prior-ratio", type=float, dest="prior_ratio")
    p.add_argument("--granularity", choices=["check", "layer"])
    p.add_argument("--no-first-node-rule", action="store_true")
    p.add_argument("--noiseless", action="store_true")
    p.add_argument("--record-trace", dest="record_trace",
                   help="JSONL path for per-update traces (single worker only)")


def _sim_settings(args) -> dict:
    settings: dict = {}
    if args.config:
        with open(args.config, "rb") as f:
            settings.update(tomllib.load(f))
    flag_map = {
        "code": args.code,
        "schedulers": args.schedulers,
        "snrs": args.snrs,
        "trials": args.trials,
        "stop_errors": args.stop_errors,
        "master_seed": args.master_seed,
        "workers": args.workers,
        "out": args.out,
        "max_iters": args.max_iters,
        "gamma": args.gamma,
        "beta": args.beta,
        "prior_ratio": args.prior_ratio,
        "granularity": args.granularity,
        "noiseless": args.noiseless or settings.get("noiseless", False),
        "record_trace": args.record_trace,
    }
    for key, val in flag_map.items():
        if val is not None and val is not False:
            settings[key] = val
    if args.no_first_node_rule:
        settings["first_node_rule"] = False
    return settings


def _parse_list(val, cast):
    if isinstance(val, (list, tuple)):
        return tuple(cast(v) for v in val)
    return tuple(cast(v) for v in str(val).split(",") if v != "")


def cmd_sim(args) -> int:
    s = _sim_settings(args)
    if "code" not in s:
        print("sim: a code spec is required (--code or config file)", file=sys.stderr)
        return 1
    decode_keys = {f.name for f in fields(DecodeConfig)}
    dc_kwargs = {k: s[k] for k in decode_keys if k in s}
    record_trace = s.get("record_trace")
    if record_trace:
        dc_kwargs["record_trace"] = True
    cfg = ExperimentConfig(
        code_spec=s["code"],
        schedulers=_parse_list(s.get("schedulers", "lbp,dyn-ebp,dyn-pebp"), str),
        decode=DecodeConfig(**dc_kwargs),
        snrs_db=_parse_list(s.get("snrs", "0.0"), float),
        trials=int(s.get("trials", 1000)),
        stop_errors=int(s.get("stop_errors", 200)),
        master_seed=int(s.get("master_seed", 1)),
        workers=int(s.get("workers", 1)),
        noiseless=bool(s.get("noiseless", False)),
    )
    if record_trace and cfg.workers != 1:
        print("sim: --record-trace requires --workers 1", file=sys.stderr)
        return 1

    if record_trace:
        # Trace-recording path decodes inline so rows stay in trial order.
        code = build_code(load_code_spec(cfg.code_spec))
        with open(record_trace, "w") as tf:
            for snr_idx, snr in enumerate(cfg.snrs_db):
                for t in range(cfg.trials):
                    llrs = sample_llrs(code, snr, trial_rng(cfg.master_seed, snr_idx, t))
                    for name in cfg.schedulers:
                        out = decode_code(code, llrs, name, cfg.decode)
                        write_trace_jsonl(out, tf)
        print(f"trace written to {record_trace}")

    result = run_experiment(cfg, log=lambda msg: print(msg, file=sys.stderr))
    out_path = s.get("out")
    if out_path:
        emit_csv(result.points, out_path)
        print(f"wrote {out_path}")
    else:
        header = f"{'scheduler':>10s} {'es_n0_db':>9s} {'trials':>7s} {'bler':>12s} {'ci':>25s} {'mean_iters':>10s}"
        print(header)
        for p in result.points:
            print(f"{p.scheduler:>10s} {p.es_n0_db:9.3g} {p.trials:7d} {p.bler:12.4e} "
                  f"[{p.ci_lo:10.4e},{p.ci_hi:10.4e}] {p.mean_iters:10.3f}")
    return 0


def cmd_trace(args) -> int:
    report = analyze_trace(args.infile)
    print(report.to_json())
    return 0


def cmd_graphinfo(args) -> int:
    code = build_code(load_code_spec(args.code)) if args.code else None
    if code is None:
        text = Path(args.alist).read_text()
        graph = parse_alist(text)
        layers = None
    else:
        graph, layers = code.graph, code.layers
    cd, vd = graph.check_degrees(), graph.var_degrees()
    print(f"variables      {graph.num_vars}")
    print(f"checks         {graph.num_checks}")
    print(f"edges          {graph.num_edges}")
    print(f"check degrees  min {cd.min()} mean {cd.mean():.3f} max {cd.max()}")
    print(f"var degrees    min {vd.min()} mean {vd.mean():.3f} max {vd.max()}")
    if code is not None:
        print(f"layers         {layers.num_layers} x {layers.layer_size}")
        print(f"punctured      {int(code.punctured.sum())}")
        print(f"shortened      {int(code.shortened.sum())}")
        print(f"blocklength    {code.blocklength}")
        print(f"rate           {code.rate:.6f}")
    print(f"backend        {active_backend()}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ldpcsched",
        description="LDPC layered-decoding scheduler comparison harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("sim", help="run a Monte Carlo BLER sweep")
    _add_sim_args(p_sim)
    p_sim.set_defaults(func=cmd_sim)

    p_trace = sub.add_parser("trace", help="analyze a JSONL update trace")
    p_trace.add_argument("--in", dest="infile", required=True)
    p_trace.set_defaults(func=cmd_trace)

    p_info = sub.add_parser("graphinfo", help="print code statistics")
    g = p_info.add_mutually_exclusive_group(required=True)
    g.add_argument("--code", help="code spec TOML path")
    g.add_argument("--alist", help="alist file path")
    p_info.set_defaults(func=cmd_graphinfo)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
