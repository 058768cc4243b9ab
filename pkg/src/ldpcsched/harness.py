"""Monte Carlo experiment driver: SNR sweeps, paired trials, BLER/BER stats.

Pairing discipline: the channel stream for trial t at SNR index s depends
only on (master_seed, s, t), so every scheduler decodes identical LLR
realizations at matched trial indices. Early stopping is decided per
(scheduler, SNR) at fixed batch boundaries from merged tallies, which keeps
results byte-identical for any worker count.

Error accounting (all-zero codeword): a block error is any wrong bit among
the non-shortened positions; bit errors are counted over the transmitted
positions only.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import sample_llrs, trial_rng
from .codegraph import LiftedCode, build_code, load_code_spec
from .bpcore import CLAMP
from .schedulers import SCHEDULER_NAMES, DecodeConfig, decode_code

_WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class ExperimentConfig:
    code_spec: str
    schedulers: tuple[str, ...] = ("lbp", "dyn-ebp", "dyn-pebp")
    decode: DecodeConfig = field(default_factory=DecodeConfig)
    snrs_db: tuple[float, ...] = (0.0,)
    trials: int = 1000
    stop_errors: int = 200
    master_seed: int = 1
    workers: int = 1
    batch_size: int = 500
    noiseless: bool = False
    keep_trial_outcomes: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.snrs_db:
            raise ValueError("SNR list must be nonempty")
        bad = [s for s in self.schedulers if s not in SCHEDULER_NAMES]
        if bad:
            raise ValueError(f"unknown scheduler names {bad}; pick from {SCHEDULER_NAMES}")
        if not self.schedulers:
            raise ValueError("at least one scheduler is required")
        if self.stop_errors < 1 or self.batch_size < 1 or self.workers < 1:
            raise ValueError("stop_errors, batch_size, and workers must be positive")


@dataclass(frozen=True)
class BlerPoint:
    scheduler: str
    es_n0_db: float
    trials: int
    block_errors: int
    bit_errors: int
    bler: float
    ber: float
    ci_lo: float
    ci_hi: float
    mean_iters: float
    mean_updates: float


@dataclass
class ExperimentResult:
    points: list[BlerPoint]
    # (scheduler, snr_index) -> uint8 array of per-trial block errors, in
    # trial order; only filled when keep_trial_outcomes is set.
    trial_errors: dict[tuple[str, int], np.ndarray] = field(default_factory=dict)


def wilson_interval(k: int, n: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if n == 0:
        return 0.0, 1.0
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    # exact endpoints at the degenerate corners so the interval always
    # contains the point estimate
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


def mcnemar_pvalue(n01: int, n10: int) -> float:
    """Exact one-sided McNemar p-value for paired block outcomes.

    ``n01`` counts trials where the baseline failed and the challenger
    succeeded; small p means the challenger is better than the baseline.
    """
    from scipy.stats import binomtest

    n = n01 + n10
    if n == 0:
        return 1.0
    return float(binomtest(n01, n, 0.5, alternative="greater").pvalue)


def _noiseless_llrs(code: LiftedCode) -> np.ndarray:
    llrs = np.zeros(code.graph.num_vars, dtype=np.float64)
    llrs[code.transmitted] = CLAMP
    llrs[code.shortened] = CLAMP
    return llrs


@dataclass
class _Tally:
    trials: int = 0
    block_errors: int = 0
    bit_errors: int = 0
    sum_iters: int = 0
    sum_updates: int = 0
    outcomes: list = field(default_factory=list)

    def merge(self, other: "_Tally") -> None:
        self.trials += other.trials
        self.block_errors += other.block_errors
        self.bit_errors += other.bit_errors
        self.sum_iters += other.sum_iters
        self.sum_updates += other.sum_updates
        self.outcomes.extend(other.outcomes)


# Per-process cache so pool workers assemble the lifted code once.
_CODE_CACHE: dict[str, LiftedCode] = {}


def _get_code(spec_path: str) -> LiftedCode:
    code = _CODE_CACHE.get(spec_path)
    if code is None:
        code = build_code(load_code_spec(spec_path))
        # all-zero simulation is only legitimate if the all-zero word is a
        # codeword, which holds for any parity-check construction
        from .bpcore import syndrome_ok

        assert syndrome_ok(code.graph, np.zeros(code.graph.num_vars, dtype=np.uint8))
        _CODE_CACHE[spec_path] = code
    return code


def _run_batch(spec_path: str, decode_cfg: DecodeConfig, master_seed: int,
               snr_db: float, snr_idx: int, lo: int, hi: int,
               schedulers: tuple[str, ...], noiseless: bool,
               keep_outcomes: bool) -> dict[str, _Tally]:
    code = _get_code(spec_path)
    tx = code.transmitted
    scored = ~code.shortened
    tallies = {s: _Tally() for s in schedulers}
    for t in range(lo, hi):
        if noiseless:
            llrs = _noiseless_llrs(code)
        else:
            llrs = sample_llrs(code, snr_db, trial_rng(master_seed, snr_idx, t))
        for name in schedulers:
            out = decode_code(code, llrs, name, decode_cfg)
            blk = int(np.any(out.x[scored] != 0))
            tl = tallies[name]
            tl.trials += 1
            tl.block_errors += blk
            tl.bit_errors += int(out.x[tx].sum())
            tl.sum_iters += out.iterations
            tl.sum_updates += out.check_updates
            if keep_outcomes:
                tl.outcomes.append(blk)
    return tallies


def run_experiment(cfg: ExperimentConfig, log=None) -> ExperimentResult:
    """Run the configured sweep and aggregate one BlerPoint per (scheduler, SNR)."""
    # Assemble once up front so config errors surface before any forking.
    _get_code(cfg.code_spec)
    result = ExperimentResult(points=[])
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for snr_idx, snr_db in enumerate(cfg.snrs_db):
            tallies = {s: _Tally() for s in cfg.schedulers}
            done = 0
            while done < cfg.trials:
                active = tuple(s for s in cfg.schedulers
                               if tallies[s].block_errors < cfg.stop_errors)
                if not active:
                    break
                hi_batch = min(done + cfg.batch_size, cfg.trials)
                args = []
                if pool is None:
                    args.append((done, hi_batch))
                else:
                    step = max(1, (hi_batch - done + cfg.workers - 1) // cfg.workers)
                    for lo in range(done, hi_batch, step):
                        args.append((lo, min(lo + step, hi_batch)))
                futures = [
                    (lo, hi,
                     pool.submit(_run_batch, cfg.code_spec, cfg.decode, cfg.master_seed,
                                 snr_db, snr_idx, lo, hi, active, cfg.noiseless,
                                 cfg.keep_trial_outcomes)
                     if pool else None)
                    for lo, hi in args
                ]
                # Merge in submission order so aggregation is reproducible.
                for lo, hi, fut in futures:
                    part = fut.result() if fut else _run_batch(
                        cfg.code_spec, cfg.decode, cfg.master_seed, snr_db, snr_idx,
                        lo, hi, active, cfg.noiseless, cfg.keep_trial_outcomes)
                    for name in active:
                        tallies[name].merge(part[name])
                done = hi_batch
                if log:
                    worst = max(tallies[s].block_errors for s in cfg.schedulers)
                    log(f"snr={snr_db:g} dB: {done}/{cfg.trials} trials, "
                        f"max block errors {worst}")
            for name in cfg.schedulers:
                tl = tallies[name]
                lo_ci, hi_ci = wilson_interval(tl.block_errors, tl.trials)
                n_tx = int(_get_code(cfg.code_spec).transmitted.sum())
                result.points.append(BlerPoint(
                    scheduler=name,
                    es_n0_db=snr_db,
                    trials=tl.trials,
                    block_errors=tl.block_errors,
                    bit_errors=tl.bit_errors,
                    bler=tl.block_errors / tl.trials if tl.trials else 0.0,
                    ber=tl.bit_errors / (tl.trials * n_tx) if tl.trials else 0.0,
                    ci_lo=lo_ci,
                    ci_hi=hi_ci,
                    mean_iters=tl.sum_iters / tl.trials if tl.trials else 0.0,
                    mean_updates=tl.sum_updates / tl.trials if tl.trials else 0.0,
                ))
                if cfg.keep_trial_outcomes:
                    result.trial_errors[(name, snr_idx)] = np.asarray(
                        tl.outcomes, dtype=np.uint8)
    finally:
        if pool is not None:
            pool.shutdown()
    return result


CSV_COLUMNS = ("scheduler", "es_n0_db", "trials", "block_errors", "bit_errors",
               "bler", "ber", "ci_lo", "ci_hi", "mean_iters", "mean_updates")


def emit_csv(points: list[BlerPoint], path) -> None:
    """Write the documented CSV schema; floats use repr so they round-trip."""
    with open(path, "w", newline="") as f:
        f.write(",".join(CSV_COLUMNS) + "\n")
        for p in points:
            f.write(",".join([
                p.scheduler, repr(p.es_n0_db), str(p.trials), str(p.block_errors),
                str(p.bit_errors), repr(p.bler), repr(p.ber), repr(p.ci_lo),
                repr(p.ci_hi), repr(p.mean_iters), repr(p.mean_updates),
            ]) + "\n")


def parse_csv(path) -> list[BlerPoint]:
    with open(path) as f:
        header = f.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        points = []
        for line in f:
            if not line.strip():
                continue
            tok = line.strip().split(",")
            points.append(BlerPoint(
                scheduler=tok[0], es_n0_db=float(tok[1]), trials=int(tok[2]),
                block_errors=int(tok[3]), bit_errors=int(tok[4]), bler=float(tok[5]),
                ber=float(tok[6]), ci_lo=float(tok[7]), ci_hi=float(tok[8]),
                mean_iters=float(tok[9]), mean_updates=float(tok[10]),
            ))
    return points
