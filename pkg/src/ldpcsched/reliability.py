"""Check-node reliability metrics driving the dynamic schedulers.

A variable is in error when its hard decision disagrees with the transmitted
bit; its error probability follows from the posterior LLR and the prior
ratio. A check node is in error when an odd number of its neighbors are, so
its probability is the classic half-of-one-minus-product form. Scheduling
keys add a per-check penalty proportional to how often the check has already
been updated.
"""

from __future__ import annotations

import math

import numpy as np

from .codegraph import LayerMap, TannerGraph


def var_error_prob(llr: float, lam: float = 1.0) -> float:
    """Error probability of a variable node given its posterior LLR.

    ``lam`` is the prior ratio P(x=0)/P(x=1). Evaluated as
    exp(-|L|) / (exp(-|L|) + g) with g = lam for L >= 0 and 1/lam otherwise,
    which never overflows and collapses to 1/(1 + exp(|L|)) at lam = 1.
    """
    if lam <= 0.0:
        raise ValueError("prior ratio must be positive")
    g = lam if llr >= 0.0 else 1.0 / lam
    t = math.exp(-abs(llr))
    return t / (t + g)


def check_error_prob(neighbor_llrs, lam: float = 1.0) -> float:
    """Probability that an odd number of the check's neighbors are in error."""
    prod = 1.0
    n = 0
    for llr in neighbor_llrs:
        prod *= 1.0 - 2.0 * var_error_prob(float(llr), lam)
        n += 1
    if n == 0:
        raise ValueError("check node has no neighbors")
    return 0.5 * (1.0 - prod)


def penalized_prob(p: float, count: int, gamma: float) -> float:
    """Scheduling key: error probability plus gamma times the update count."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if count < 0:
        raise ValueError("update count must be non-negative")
    return p + gamma * count


def affected_checks(graph: TannerGraph, k: int, include_self: bool) -> list[int]:
    """Checks whose error probability changes when check k is updated.

    These are all checks sharing a variable with k; k itself is included
    only in penalized mode, where its own key is refreshed after its update
    count increments.
    """
    seen = set()
    for e in range(graph.check_ptr[k], graph.check_ptr[k + 1]):
        a = graph.check_vars[e]
        for s in range(graph.var_ptr[a], graph.var_ptr[a + 1]):
            seen.add(int(graph.var_checks[s]))
    if not include_self:
        seen.discard(k)
    return sorted(seen)


def layer_average(values, layers: LayerMap) -> np.ndarray:
    """Arithmetic mean of a per-check quantity over each layer."""
    vals = np.asarray(values, dtype=np.float64)
    sums = np.zeros(layers.num_layers, dtype=np.float64)
    np.add.at(sums, layers.layer_of_check, vals)
    return sums / layers.layer_size


class ReliabilityState:
    """Incrementally maintained per-check error probabilities.

    Caches the per-variable factor (1 - 2 p_v); a check recompute is then a
    short product over its neighbors' cached factors. ``refresh_var`` must be
    called whenever a posterior changes; ``recompute_check`` rereads the
    cache. ``multiplies`` counts product work for the complexity audit.
    """

    __slots__ = ("graph", "lam", "factor_var", "p_check", "update_count",
                 "recomputes", "multiplies")

    def __init__(self, graph: TannerGraph, posteriors, lam: float = 1.0) -> None:
        self.graph = graph
        self.lam = lam
        self.factor_var = np.empty(graph.num_vars, dtype=np.float64)
        for j in range(graph.num_vars):
            self.factor_var[j] = 1.0 - 2.0 * var_error_prob(float(posteriors[j]), lam)
        self.p_check = np.empty(graph.num_checks, dtype=np.float64)
        self.update_count = np.zeros(graph.num_checks, dtype=np.int64)
        self.recomputes = 0
        self.multiplies = 0
        for i in range(graph.num_checks):
            self.recompute_check(i)
        # Initial fill is not part of the per-update accounting.
        self.recomputes = 0
        self.multiplies = 0

    def refresh_var(self, j: int, posterior: float) -> None:
        self.factor_var[j] = 1.0 - 2.0 * var_error_prob(posterior, self.lam)

    def recompute_check(self, i: int) -> float:
        g = self.graph
        prod = 1.0
        for e in range(g.check_ptr[i], g.check_ptr[i + 1]):
            prod *= self.factor_var[g.check_vars[e]]
            self.multiplies += 1
        p = 0.5 * (1.0 - prod)
        self.p_check[i] = p
        self.recomputes += 1
        return p

    def key(self, i: int, gamma: float) -> float:
        return self.p_check[i] + gamma * self.update_count[i]
