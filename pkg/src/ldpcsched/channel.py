"""BPSK-over-AWGN channel LLRs with puncturing and shortening applied.

Convention: Es/N0 is specified with unit symbol energy, so the per-dimension
noise variance is sigma^2 = 1 / (2 * 10^(es_n0_db/10)) and a transmitted bit
x maps to the symbol 1 - 2x. Channel LLRs are 2y / sigma^2.

Randomness: every trial owns one numpy Generator built as
PCG64(SeedSequence((master_seed, snr_index, trial_index))), and noise is
drawn with Generator.standard_normal (the ziggurat transform). The stream
therefore depends only on the trial coordinates, never on the scheduler, so
paired comparisons see identical noise; a golden-vector test freezes the
byte-level output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bpcore import CLAMP
from .codegraph import LiftedCode


@dataclass(frozen=True)
class ChannelConfig:
    """Channel settings for one trial stream."""

    es_n0_db: float
    seed: int = 0
    all_zero: bool = True
    prior_ratio: float = 1.0

    def __post_init__(self):
        if self.prior_ratio <= 0.0:
            raise ValueError("prior ratio must be positive")

    @property
    def noise_var(self) -> float:
        return 1.0 / (2.0 * 10.0 ** (self.es_n0_db / 10.0))


def trial_rng(master_seed: int, snr_index: int, trial_index: int) -> np.random.Generator:
    """The documented per-trial stream splitting rule."""
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((master_seed, snr_index, trial_index))))


def sample_llrs(code: LiftedCode, es_n0_db: float, rng: np.random.Generator,
                bits: np.ndarray | None = None) -> np.ndarray:
    """Channel LLR vector for one codeword transmission.

    Transmitted variables get 2y/sigma^2 with y = (1-2x) + N(0, sigma^2);
    punctured variables carry no observation (exactly 0); shortened
    variables are known zeros and get the saturating +CLAMP.
    """
    n = code.graph.num_vars
    if bits is None:
        bits = np.zeros(n, dtype=np.uint8)
    else:
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (n,):
            raise ValueError("codeword length must equal num_vars")
        if np.any(bits[code.shortened] != 0):
            raise ValueError("shortened positions must hold zero bits")
    sigma2 = ChannelConfig(es_n0_db).noise_var
    tx = code.transmitted
    n_tx = int(tx.sum())
    y = (1.0 - 2.0 * bits[tx]) + rng.standard_normal(n_tx) * np.sqrt(sigma2)
    llrs = np.zeros(n, dtype=np.float64)
    llrs[tx] = np.clip(2.0 * y / sigma2, -CLAMP, CLAMP)
    llrs[code.shortened] = CLAMP
    return llrs
