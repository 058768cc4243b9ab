"""Pure-Python decode loops: the fallback backend.

``run_decode`` here and in the compiled ``_core`` extension share one calling
convention and are kept in lockstep operation-for-operation, so both produce
bit-identical outcomes; a parity test enforces that. This file is the
readable reference; read it top to bottom to understand the schedulers.

Scheduler codes: 0 flooding, 1 fixed-sequence layered (classic or
channel-ordered), 2 dynamic error-probability (one update per check per
iteration), 3 penalized dynamic (free repetition, penalty 'gamma' per prior
update), 4 decaying-residual baseline.
"""

from __future__ import annotations

import math

import numpy as np

from .bpcore import CLAMP, TANH_EPS
from .ipq import IndexedMinQueue

FLOODING, FIXED_SEQ, DYN_EBP, DYN_PEBP, RBP_DECAY = range(5)

_FACTOR_HI = 1.0 - TANH_EPS


def _clamp(x: float) -> float:
    if x > CLAMP:
        return CLAMP
    if x < -CLAMP:
        return -CLAMP
    return x


def _tanh_factor(m: float) -> float:
    t = math.tanh(0.5 * m)
    if t > _FACTOR_HI:
        return _FACTOR_HI
    if t < -_FACTOR_HI:
        return -_FACTOR_HI
    return t


def _var_factor(llr: float, lam: float) -> float:
    """1 - 2 p_v for the scheduling products."""
    g = lam if llr >= 0.0 else 1.0 / lam
    t = math.exp(-abs(llr))
    return 1.0 - 2.0 * (t / (t + g))


class _Ctx:
    """Mutable decode state shared by the scheduler loops."""

    __slots__ = (
        "check_ptr", "check_vars", "var_ptr", "var_checks", "var_edge",
        "n_vars", "n_checks", "lam",
        "C", "v2c", "c2v", "L", "factor_var", "p_check", "update_count",
        "n_v2c", "n_c2v", "n_rel_recompute", "n_rel_multiply", "n_queue_op",
        "updates", "seq", "trace", "max_spread", "audit_balance",
        "layer_of_check",
    )

    def __init__(self, check_ptr, check_vars, var_ptr, var_checks, var_edge,
                 n_vars, n_checks, C, lam, audit_balance, layer_of_check):
        self.check_ptr = check_ptr
        self.check_vars = check_vars
        self.var_ptr = var_ptr
        self.var_checks = var_checks
        self.var_edge = var_edge
        self.n_vars = int(n_vars)
        self.n_checks = int(n_checks)
        self.lam = float(lam)
        self.C = C
        self.v2c = C[check_vars].astype(np.float64)
        self.c2v = np.zeros(len(check_vars), dtype=np.float64)
        self.L = C.astype(np.float64).copy()
        self.factor_var = np.empty(self.n_vars, dtype=np.float64)
        for j in range(self.n_vars):
            self.factor_var[j] = _var_factor(self.L[j], self.lam)
        self.p_check = np.zeros(self.n_checks, dtype=np.float64)
        self.update_count = np.zeros(self.n_checks, dtype=np.int64)
        self.n_v2c = 0
        self.n_c2v = 0
        self.n_rel_recompute = 0
        self.n_rel_multiply = 0
        self.n_queue_op = 0
        self.updates = 0
        self.seq = []
        self.trace = []
        self.max_spread = 0
        self.audit_balance = audit_balance
        self.layer_of_check = layer_of_check

    def recompute_p(self, i: int) -> float:
        prod = 1.0
        for e in range(self.check_ptr[i], self.check_ptr[i + 1]):
            prod *= self.factor_var[self.check_vars[e]]
            self.n_rel_multiply += 1
        p = 0.5 * (1.0 - prod)
        self.p_check[i] = p
        self.n_rel_recompute += 1
        return p

    def recompute_all_p(self) -> None:
        for i in range(self.n_checks):
            self.recompute_p(i)

    def new_c2v(self, k: int, out: list) -> None:
        """Prospective C2V messages of check k from fresh V2C inputs (in v2c)."""
        lo = self.check_ptr[k]
        d = self.check_ptr[k + 1] - lo
        t = [_tanh_factor(self.v2c[lo + i]) for i in range(d)]
        pre = [1.0] * (d + 1)
        for i in range(d):
            pre[i + 1] = pre[i] * t[i]
        suf = 1.0
        del out[:]
        out.extend([0.0] * d)
        for i in range(d - 1, -1, -1):
            p = pre[i] * suf
            p = _FACTOR_HI if p > _FACTOR_HI else (-_FACTOR_HI if p < -_FACTOR_HI else p)
            out[i] = 2.0 * math.atanh(p)
            suf *= t[i]
        self.n_c2v += d

    def fresh_v2c(self, k: int) -> None:
        lo, hi = self.check_ptr[k], self.check_ptr[k + 1]
        for e in range(lo, hi):
            self.v2c[e] = _clamp(self.L[self.check_vars[e]] - self.c2v[e])
        self.n_v2c += hi - lo

    def syndrome_ok(self) -> bool:
        for k in range(self.n_checks):
            parity = 0
            for e in range(self.check_ptr[k], self.check_ptr[k + 1]):
                if self.L[self.check_vars[e]] < 0.0:
                    parity ^= 1
            if parity:
                return False
        return True

    def note_update(self, k: int, key_before: float, key_after: float) -> None:
        self.update_count[k] += 1
        self.updates += 1
        if self.trace is not None:
            layer = -1 if self.layer_of_check is None else int(self.layer_of_check[k])
            self.trace.append((k, layer, key_before, key_after, int(self.update_count[k])))
        if self.audit_balance:
            spread = int(self.update_count.max() - self.update_count.min())
            if spread > self.max_spread:
                self.max_spread = spread


def _residual(ctx: _Ctx, k: int, scratch: list) -> float:
    """Max |prospective - stored| C2V message magnitude change at check k."""
    lo = ctx.check_ptr[k]
    d = ctx.check_ptr[k + 1] - lo
    t = scratch
    del t[:]
    for i in range(d):
        v = _clamp(ctx.L[ctx.check_vars[lo + i]] - ctx.c2v[lo + i])
        t.append(_tanh_factor(v))
    pre = [1.0] * (d + 1)
    for i in range(d):
        pre[i + 1] = pre[i] * t[i]
        ctx.n_rel_multiply += 1
    suf = 1.0
    best = 0.0
    for i in range(d - 1, -1, -1):
        p = pre[i] * suf
        p = _FACTOR_HI if p > _FACTOR_HI else (-_FACTOR_HI if p < -_FACTOR_HI else p)
        r = abs(2.0 * math.atanh(p) - ctx.c2v[lo + i])
        if r > best:
            best = r
        suf *= t[i]
    ctx.n_rel_recompute += 1
    return best


def _update_check_plain(ctx: _Ctx, k: int, msgs: list) -> None:
    """One layered update of check k without reliability maintenance."""
    ctx.fresh_v2c(k)
    ctx.new_c2v(k, msgs)
    lo = ctx.check_ptr[k]
    for i in range(len(msgs)):
        e = lo + i
        a = ctx.check_vars[e]
        ctx.L[a] += msgs[i] - ctx.c2v[e]
        ctx.c2v[e] = msgs[i]


def _update_check_tracked(ctx: _Ctx, k: int, msgs: list, queue, gamma: float,
                          include_self: bool, unit_of_check, touched_units: set) -> None:
    """Layered update of check k plus error-probability maintenance.

    Follows the per-neighbor order of the dynamic algorithms: after each
    posterior moves, the error probabilities of that variable's checks are
    recomputed; queue keys are refreshed for members (check granularity),
    or the owning units are collected for a per-unit refresh (layer mode).
    """
    ctx.fresh_v2c(k)
    ctx.new_c2v(k, msgs)
    lo = ctx.check_ptr[k]
    for i in range(len(msgs)):
        e = lo + i
        a = ctx.check_vars[e]
        ctx.L[a] += msgs[i] - ctx.c2v[e]
        ctx.c2v[e] = msgs[i]
        ctx.factor_var[a] = _var_factor(ctx.L[a], ctx.lam)
        for s in range(ctx.var_ptr[a], ctx.var_ptr[a + 1]):
            b = int(ctx.var_checks[s])
            if b == k and not include_self:
                continue
            ctx.recompute_p(b)
            if b != k:
                if unit_of_check is None:
                    if b in queue:
                        queue.update_key(b, ctx.p_check[b] + gamma * ctx.update_count[b])
                        ctx.n_queue_op += 1
                else:
                    touched_units.add(int(unit_of_check[b]))


def _layer_key(ctx: _Ctx, layer_ptr, layer_members, u: int, gamma: float,
               unit_count_arr) -> float:
    s = 0.0
    lo, hi = layer_ptr[u], layer_ptr[u + 1]
    for i in range(lo, hi):
        s += ctx.p_check[layer_members[i]]
    return s / (hi - lo) + gamma * unit_count_arr[u]


def run_decode(check_ptr, check_vars, var_ptr, var_checks, var_edge,
               n_vars, n_checks, layer_of_check, layer_ptr, layer_members,
               n_layers, C, scheduler, max_iters, gamma, lam, beta,
               layer_mode, first_check, syndrome_every,
               record_sequence, record_trace, audit_balance, sequence):
    """Decode one channel realization; see schedulers.decode for the API."""
    ctx = _Ctx(check_ptr, check_vars, var_ptr, var_checks, var_edge,
               n_vars, n_checks, C, lam, audit_balance,
               layer_of_check if layer_mode else None)
    if not record_trace:
        ctx.trace = None
    m = int(n_checks)
    unit_count = int(n_layers) if layer_mode else m
    cadence = int(syndrome_every) if syndrome_every else m
    success = False
    iterations = 0
    msgs: list = []
    scratch: list = []

    def members(u):
        if layer_mode:
            return [int(layer_members[i]) for i in range(layer_ptr[u], layer_ptr[u + 1])]
        return [u]

    def note_seq(u):
        if record_sequence:
            ctx.seq.append(u)

    if scheduler == FLOODING:
        for it in range(1, max_iters + 1):
            for e in range(len(check_vars)):
                ctx.v2c[e] = _clamp(ctx.L[check_vars[e]] - ctx.c2v[e])
            ctx.n_v2c += len(check_vars)
            for k in range(m):
                ctx.new_c2v(k, msgs)
                lo = check_ptr[k]
                for i in range(len(msgs)):
                    e = lo + i
                    a = check_vars[e]
                    ctx.L[a] += msgs[i] - ctx.c2v[e]
                    ctx.c2v[e] = msgs[i]
                ctx.note_update(k, math.nan, math.nan)
                note_seq(k)
            iterations = it
            if ctx.syndrome_ok():
                success = True
                break

    elif scheduler == FIXED_SEQ:
        seq = [int(u) for u in sequence]
        for it in range(1, max_iters + 1):
            stop = False
            for u in seq:
                note_seq(u)
                for k in members(u):
                    _update_check_plain(ctx, k, msgs)
                    ctx.note_update(k, math.nan, math.nan)
                    if syndrome_every and ctx.updates % cadence == 0 and ctx.syndrome_ok():
                        success = True
                        stop = True
                        break
                if stop:
                    break
            iterations = it
            if stop:
                break
            if ctx.syndrome_ok():
                success = True
                break

    elif scheduler == DYN_EBP:
        unit_counts = np.zeros(unit_count, dtype=np.int64)  # for layer keys (gamma 0 here)
        for it in range(1, max_iters + 1):
            ctx.recompute_all_p()
            queue = IndexedMinQueue(unit_count)
            skip_unit = -1
            if it == 1 and first_check >= 0:
                skip_unit = int(layer_of_check[first_check]) if layer_mode else int(first_check)
            for u in range(unit_count):
                if u == skip_unit:
                    continue
                if layer_mode:
                    queue.insert(u, _layer_key(ctx, layer_ptr, layer_members, u, 0.0, unit_counts))
                else:
                    queue.insert(u, ctx.p_check[u])
                ctx.n_queue_op += 1

            def run_unit(u):
                note_seq(u)
                touched: set = set()
                hit = False
                for k in members(u):
                    before = ctx.p_check[k]
                    _update_check_tracked(ctx, k, msgs, queue, 0.0, False,
                                          layer_of_check if layer_mode else None, touched)
                    ctx.note_update(k, before, ctx.p_check[k])
                    if syndrome_every and ctx.updates % cadence == 0 and ctx.syndrome_ok():
                        hit = True
                        break
                if layer_mode:
                    touched.discard(u)
                    for t_u in sorted(touched):
                        if t_u in queue:
                            queue.update_key(t_u, _layer_key(ctx, layer_ptr, layer_members,
                                                             t_u, 0.0, unit_counts))
                            ctx.n_queue_op += 1
                return hit

            stop = False
            if skip_unit >= 0:
                stop = run_unit(skip_unit)
            while len(queue) and not stop:
                u, _ = queue.pop_min()
                ctx.n_queue_op += 1
                stop = run_unit(u)
            iterations = it
            if stop or ctx.syndrome_ok():
                success = True
                break

    elif scheduler in (DYN_PEBP, RBP_DECAY):
        penal = scheduler == DYN_PEBP
        unit_counts = np.zeros(unit_count, dtype=np.int64)
        res_check = np.zeros(m, dtype=np.float64)
        queue = IndexedMinQueue(unit_count)
        if penal:
            ctx.recompute_all_p()
        else:
            for k in range(m):
                res_check[k] = _residual(ctx, k, scratch)

        def unit_key(u):
            if penal:
                if layer_mode:
                    return _layer_key(ctx, layer_ptr, layer_members, u, gamma, unit_counts)
                return ctx.p_check[u] + gamma * unit_counts[u]
            scale = math.pow(beta, unit_counts[u])
            if layer_mode:
                s = 0.0
                lo, hi = layer_ptr[u], layer_ptr[u + 1]
                for i in range(lo, hi):
                    s += res_check[layer_members[i]]
                return -(scale * (s / (hi - lo)))
            return -(scale * res_check[u])

        for u in range(unit_count):
            queue.insert(u, unit_key(u))
            ctx.n_queue_op += 1

        budget = max_iters * m
        first_pending = -1
        if first_check >= 0:
            first_pending = int(layer_of_check[first_check]) if layer_mode else int(first_check)
        stop = False
        while ctx.updates < budget and not stop:
            if first_pending >= 0:
                u = first_pending
                first_pending = -1
                ctx.n_queue_op += 1  # peek replaced by the override
            else:
                u, _ = queue.peek_min()
                ctx.n_queue_op += 1
            note_seq(u)
            touched: set = set()
            for k in members(u):
                before = unit_key(u) if not penal else ctx.p_check[k] + gamma * unit_counts[u]
                if penal:
                    _update_check_tracked(ctx, k, msgs, queue, gamma, True,
                                          layer_of_check if layer_mode else None, touched)
                    after = ctx.p_check[k] + gamma * unit_counts[u]
                else:
                    _update_check_plain(ctx, k, msgs)
                    lo = check_ptr[k]
                    for i in range(check_ptr[k + 1] - lo):
                        a = check_vars[lo + i]
                        for s in range(var_ptr[a], var_ptr[a + 1]):
                            b = int(var_checks[s])
                            if b == k:
                                continue
                            res_check[b] = _residual(ctx, b, scratch)
                            if layer_mode:
                                touched.add(int(layer_of_check[b]))
                            else:
                                queue.update_key(b, unit_key(b))
                                ctx.n_queue_op += 1
                    after = before
                ctx.note_update(k, before, after)
                if ctx.updates % cadence == 0 and ctx.syndrome_ok():
                    success = True
                    stop = True
                    break
            if penal:
                # Refresh the touched units, then the selected unit once its
                # update count has risen; its own probability is already
                # current from the in-loop recomputes. In check granularity
                # the touched set is empty because keys were refreshed inline.
                touched.discard(u)
                for t_u in sorted(touched):
                    queue.update_key(t_u, unit_key(t_u))
                    ctx.n_queue_op += 1
                unit_counts[u] += 1
                queue.update_key(u, unit_key(u))
                ctx.n_queue_op += 1
            else:
                for k in members(u):
                    res_check[k] = _residual(ctx, k, scratch)
                touched.discard(u)
                for t_u in sorted(touched):
                    queue.update_key(t_u, unit_key(t_u))
                    ctx.n_queue_op += 1
                unit_counts[u] += 1
                queue.update_key(u, unit_key(u))
                ctx.n_queue_op += 1
        iterations = ctx.updates // m + (1 if ctx.updates % m else 0)

    else:
        raise ValueError(f"unknown scheduler code {scheduler}")

    x = np.empty(n_vars, dtype=np.uint8)
    for j in range(n_vars):
        x[j] = 1 if ctx.L[j] < 0.0 else 0

    return {
        "success": success,
        "iterations": iterations,
        "updates": ctx.updates,
        "x": x,
        "posterior": ctx.L,
        "update_counts": ctx.update_count,
        "max_spread": ctx.max_spread if audit_balance else -1,
        "sequence": np.asarray(ctx.seq, dtype=np.int32) if record_sequence else None,
        "trace": ctx.trace,
        "counters": {
            "v2c_msgs": int(ctx.n_v2c),
            "c2v_msgs": int(ctx.n_c2v),
            "rel_recomputes": int(ctx.n_rel_recompute),
            "rel_multiplies": int(ctx.n_rel_multiply),
            "queue_ops": int(ctx.n_queue_op),
        },
    }
