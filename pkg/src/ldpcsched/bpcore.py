"""Belief-propagation message kernels on edge-indexed flat storage.

All kernels here are the plain-Python reference; the compiled backend in
``_core`` mirrors them operation for operation so both produce bit-identical
decodes. Messages live in per-check contiguous slices (edge id = check-side
slot), so one check-node update touches a single cache-friendly span.

Numerics: variable-to-check messages are clamped to +-CLAMP LLR units, and
each tanh factor inside the check update is clamped to magnitude
1 - TANH_EPS so the product never reaches +-1 and atanh stays finite.
"""

from __future__ import annotations

import math

import numpy as np

from .codegraph import TannerGraph

# |tanh(x/2)| reaches 1.0 in double precision near x = 60, so +-60 is the
# saturation point for anything that feeds the check-node rule.
CLAMP = 60.0
TANH_EPS = 1e-12


def clamp_llr(x: float) -> float:
    if x > CLAMP:
        return CLAMP
    if x < -CLAMP:
        return -CLAMP
    return x


def tanh_factor(m: float) -> float:
    """tanh(m/2) with magnitude capped below 1 so atanh of products is finite."""
    t = math.tanh(0.5 * m)
    hi = 1.0 - TANH_EPS
    if t > hi:
        return hi
    if t < -hi:
        return -hi
    return t


class MessageState:
    """Edge-indexed V2C/C2V storage plus the running posterior.

    After construction: all c2v are 0, every v2c equals the channel LLR of
    its variable, and the posterior equals the channel vector. The posterior
    is maintained incrementally (subtract old C2V, add new) so that
    L[j] == C[j] + sum of stored c2v into j at all times.
    """

    __slots__ = ("graph", "C", "v2c", "c2v", "L")

    def __init__(self, graph: TannerGraph, channel_llrs) -> None:
        C = np.asarray(channel_llrs, dtype=np.float64)
        if C.shape != (graph.num_vars,):
            raise ValueError("channel LLR vector length must equal num_vars")
        self.graph = graph
        self.C = np.clip(C, -CLAMP, CLAMP)
        self.C.setflags(write=False)
        self.v2c = self.C[graph.check_vars].astype(np.float64)
        self.c2v = np.zeros(graph.num_edges, dtype=np.float64)
        self.L = self.C.copy()

    def posterior_consistency_error(self) -> float:
        """max_j |L[j] - (C[j] + sum c2v into j)|; diagnostic for tests."""
        acc = self.C.copy()
        g = self.graph
        for j in range(g.num_vars):
            for s in range(g.var_ptr[j], g.var_ptr[j + 1]):
                acc[j] += self.c2v[g.var_edge[s]]
        return float(np.max(np.abs(self.L - acc))) if g.num_vars else 0.0


def v2c_update(state: MessageState, k: int) -> None:
    """Refresh all variable-to-check messages into check k.

    Uses the posterior form L[a] - c2v[k->a], which equals the channel LLR
    plus the other checks' messages as long as the posterior is consistent.
    """
    g = state.graph
    for e in range(g.check_ptr[k], g.check_ptr[k + 1]):
        a = g.check_vars[e]
        state.v2c[e] = clamp_llr(state.L[a] - state.c2v[e])


def c2v_update(state: MessageState, k: int) -> np.ndarray:
    """Compute the new check-to-variable messages of check k without applying.

    Returns the per-edge new messages in slot order; old values stay in
    state.c2v so callers can form residuals and maintain the posterior.
    Exclusion products use prefix/suffix passes (no division).
    """
    g = state.graph
    lo, hi = int(g.check_ptr[k]), int(g.check_ptr[k + 1])
    d = hi - lo
    t = [tanh_factor(state.v2c[lo + i]) for i in range(d)]
    pre = [1.0] * (d + 1)
    for i in range(d):
        pre[i + 1] = pre[i] * t[i]
    suf = 1.0
    hi_p = 1.0 - TANH_EPS
    out = np.empty(d, dtype=np.float64)
    for i in range(d - 1, -1, -1):
        # The factor clamp bounds any nonempty product below 1; the product
        # clamp only engages for degree-1 checks, whose exclusion product is
        # empty and would otherwise send atanh to infinity.
        p = pre[i] * suf
        p = hi_p if p > hi_p else (-hi_p if p < -hi_p else p)
        out[i] = 2.0 * math.atanh(p)
        suf *= t[i]
    return out


def apply_c2v(state: MessageState, k: int, new_msgs) -> None:
    """Overwrite check k's C2V storage and maintain the posterior.

    Each neighbor's posterior gets the new message minus the previously
    stored one; the first application after init adds the message outright
    because the stored value is 0.
    """
    g = state.graph
    lo = int(g.check_ptr[k])
    for i, e in enumerate(range(lo, int(g.check_ptr[k + 1]))):
        a = g.check_vars[e]
        m_new = float(new_msgs[i])
        state.L[a] += m_new - state.c2v[e]
        state.c2v[e] = m_new


def hard_decision(llrs) -> np.ndarray:
    """0 where the LLR is >= 0, else 1."""
    return (np.asarray(llrs) < 0).astype(np.uint8)


def syndrome_ok(graph: TannerGraph, x) -> bool:
    """True iff every check has even parity over its hard-decision neighbors."""
    x = np.asarray(x)
    if x.shape != (graph.num_vars,):
        raise ValueError("hard decision length must equal num_vars")
    for k in range(graph.num_checks):
        parity = 0
        for e in range(graph.check_ptr[k], graph.check_ptr[k + 1]):
            parity ^= int(x[graph.check_vars[e]])
        if parity:
            return False
    return True
