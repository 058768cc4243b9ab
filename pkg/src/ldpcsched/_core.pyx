# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled decode loops: the fast backend.

Operation-for-operation mirror of ``ldpcsched._pycore`` (read that module
for the algorithm narrative). Every arithmetic step, its order, and the
tie-breaking all match the Python twin so the two backends produce
bit-identical outcomes; keep them in lockstep when changing either.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atanh, exp, fabs, tanh
from libc.math cimport pow as cpow

cnp.import_array()

from .bpcore import CLAMP as _CLAMP_PY
from .bpcore import TANH_EPS as _EPS_PY

cdef double CLAMP = _CLAMP_PY
cdef double FACTOR_HI = 1.0 - _EPS_PY

FLOODING, FIXED_SEQ, DYN_EBP, DYN_PEBP, RBP_DECAY = 0, 1, 2, 3, 4


cdef inline double _clamp(double x) nogil:
    if x > CLAMP:
        return CLAMP
    if x < -CLAMP:
        return -CLAMP
    return x


cdef inline double _tanh_factor(double m) nogil:
    cdef double t = tanh(0.5 * m)
    if t > FACTOR_HI:
        return FACTOR_HI
    if t < -FACTOR_HI:
        return -FACTOR_HI
    return t


cdef inline double _var_factor(double llr, double lam) nogil:
    cdef double g = lam if llr >= 0.0 else 1.0 / lam
    cdef double t = exp(-fabs(llr))
    return 1.0 - 2.0 * (t / (t + g))


cdef inline bint _entry_less(double ka, int ia, double kb, int ib) nogil:
    return ka < kb or (ka == kb and ia < ib)


cdef class _Ctx:
    cdef cnp.int64_t[::1] check_ptr
    cdef cnp.int32_t[::1] check_vars
    cdef cnp.int64_t[::1] var_ptr
    cdef cnp.int32_t[::1] var_checks
    cdef Py_ssize_t n_vars, n_checks, n_edges
    cdef double lam
    cdef double[::1] C, v2c, c2v, L, factor_var, p_check
    cdef cnp.int64_t[::1] update_count
    cdef long long n_v2c, n_c2v, n_rel_recompute, n_rel_multiply, n_queue_op
    cdef long long updates, max_spread
    cdef bint record_sequence, audit_balance, has_layers
    cdef cnp.int32_t[::1] seq_buf
    cdef Py_ssize_t seq_len
    cdef list trace
    cdef cnp.int32_t[::1] layer_of_check
    cdef cnp.int64_t[::1] layer_ptr
    cdef cnp.int32_t[::1] layer_members
    # scratch buffers sized to the max check degree
    cdef double[::1] tfac, pre, msgs
    # indexed binary min-heap over (key, id)
    cdef double[::1] hkey
    cdef cnp.int32_t[::1] hid
    cdef cnp.int64_t[::1] hpos
    cdef Py_ssize_t hsize

    # ---- heap ----

    cdef void q_reset(self, Py_ssize_t capacity):
        cdef Py_ssize_t i
        self.hsize = 0
        for i in range(capacity):
            self.hpos[i] = -1

    cdef void _sift_up(self, Py_ssize_t slot):
        cdef double k = self.hkey[slot]
        cdef int i = self.hid[slot]
        cdef Py_ssize_t parent
        while slot > 0:
            parent = (slot - 1) >> 1
            if not _entry_less(k, i, self.hkey[parent], self.hid[parent]):
                break
            self.hkey[slot] = self.hkey[parent]
            self.hid[slot] = self.hid[parent]
            self.hpos[self.hid[slot]] = slot
            slot = parent
        self.hkey[slot] = k
        self.hid[slot] = i
        self.hpos[i] = slot

    cdef void _sift_down(self, Py_ssize_t slot):
        cdef double k = self.hkey[slot]
        cdef int i = self.hid[slot]
        cdef Py_ssize_t n = self.hsize, child, right
        while True:
            child = 2 * slot + 1
            if child >= n:
                break
            right = child + 1
            if right < n and _entry_less(self.hkey[right], self.hid[right],
                                         self.hkey[child], self.hid[child]):
                child = right
            if not _entry_less(self.hkey[child], self.hid[child], k, i):
                break
            self.hkey[slot] = self.hkey[child]
            self.hid[slot] = self.hid[child]
            self.hpos[self.hid[slot]] = slot
            slot = child
        self.hkey[slot] = k
        self.hid[slot] = i
        self.hpos[i] = slot

    cdef void q_insert(self, int item, double key):
        self.hkey[self.hsize] = key
        self.hid[self.hsize] = item
        self.hpos[item] = self.hsize
        self.hsize += 1
        self._sift_up(self.hsize - 1)

    cdef int q_pop_min(self):
        cdef int item = self.hid[0]
        self.hpos[item] = -1
        self.hsize -= 1
        if self.hsize > 0:
            self.hkey[0] = self.hkey[self.hsize]
            self.hid[0] = self.hid[self.hsize]
            self.hpos[self.hid[0]] = 0
            self._sift_down(0)
        return item

    cdef int q_peek_min(self):
        return self.hid[0]

    cdef void q_update(self, int item, double key):
        cdef Py_ssize_t slot = self.hpos[item]
        cdef double old = self.hkey[slot]
        if key == old:
            return
        self.hkey[slot] = key
        if key < old:
            self._sift_up(slot)
        else:
            self._sift_down(slot)

    cdef inline bint q_contains(self, int item):
        return self.hpos[item] != -1

    # ---- kernels ----

    cdef double recompute_p(self, Py_ssize_t i):
        cdef double prod = 1.0
        cdef Py_ssize_t e
        for e in range(self.check_ptr[i], self.check_ptr[i + 1]):
            prod *= self.factor_var[self.check_vars[e]]
            self.n_rel_multiply += 1
        cdef double p = 0.5 * (1.0 - prod)
        self.p_check[i] = p
        self.n_rel_recompute += 1
        return p

    cdef void recompute_all_p(self):
        cdef Py_ssize_t i
        for i in range(self.n_checks):
            self.recompute_p(i)

    cdef Py_ssize_t new_c2v(self, Py_ssize_t k):
        """Prospective C2V messages of check k into self.msgs; returns degree."""
        cdef Py_ssize_t lo = self.check_ptr[k]
        cdef Py_ssize_t d = self.check_ptr[k + 1] - lo
        cdef Py_ssize_t i
        cdef double suf, p
        for i in range(d):
            self.tfac[i] = _tanh_factor(self.v2c[lo + i])
        self.pre[0] = 1.0
        for i in range(d):
            self.pre[i + 1] = self.pre[i] * self.tfac[i]
        suf = 1.0
        for i in range(d - 1, -1, -1):
            p = self.pre[i] * suf
            p = FACTOR_HI if p > FACTOR_HI else (-FACTOR_HI if p < -FACTOR_HI else p)
            self.msgs[i] = 2.0 * atanh(p)
            suf *= self.tfac[i]
        self.n_c2v += d
        return d

    cdef void fresh_v2c(self, Py_ssize_t k):
        cdef Py_ssize_t lo = self.check_ptr[k], hi = self.check_ptr[k + 1], e
        for e in range(lo, hi):
            self.v2c[e] = _clamp(self.L[self.check_vars[e]] - self.c2v[e])
        self.n_v2c += hi - lo

    cdef bint syndrome_ok(self):
        cdef Py_ssize_t k, e
        cdef int parity
        for k in range(self.n_checks):
            parity = 0
            for e in range(self.check_ptr[k], self.check_ptr[k + 1]):
                if self.L[self.check_vars[e]] < 0.0:
                    parity ^= 1
            if parity:
                return False
        return True

    cdef void note_update(self, Py_ssize_t k, double key_before, double key_after):
        cdef long long spread
        cdef cnp.int64_t mx, mn
        cdef Py_ssize_t i
        self.update_count[k] += 1
        self.updates += 1
        if self.trace is not None:
            self.trace.append((
                int(k),
                int(self.layer_of_check[k]) if self.has_layers else -1,
                key_before, key_after, int(self.update_count[k]),
            ))
        if self.audit_balance:
            mx = self.update_count[0]
            mn = self.update_count[0]
            for i in range(1, self.n_checks):
                if self.update_count[i] > mx:
                    mx = self.update_count[i]
                if self.update_count[i] < mn:
                    mn = self.update_count[i]
            spread = mx - mn
            if spread > self.max_spread:
                self.max_spread = spread

    cdef void note_seq(self, int u):
        if self.record_sequence:
            self.seq_buf[self.seq_len] = u
            self.seq_len += 1

    cdef double residual(self, Py_ssize_t k):
        cdef Py_ssize_t lo = self.check_ptr[k]
        cdef Py_ssize_t d = self.check_ptr[k + 1] - lo
        cdef Py_ssize_t i
        cdef double v, suf, p, r, best = 0.0
        for i in range(d):
            v = _clamp(self.L[self.check_vars[lo + i]] - self.c2v[lo + i])
            self.tfac[i] = _tanh_factor(v)
        self.pre[0] = 1.0
        for i in range(d):
            self.pre[i + 1] = self.pre[i] * self.tfac[i]
            self.n_rel_multiply += 1
        suf = 1.0
        for i in range(d - 1, -1, -1):
            p = self.pre[i] * suf
            p = FACTOR_HI if p > FACTOR_HI else (-FACTOR_HI if p < -FACTOR_HI else p)
            r = fabs(2.0 * atanh(p) - self.c2v[lo + i])
            if r > best:
                best = r
            suf *= self.tfac[i]
        self.n_rel_recompute += 1
        return best

    cdef void apply_msgs(self, Py_ssize_t k, Py_ssize_t d):
        """Write self.msgs into storage, maintaining the posterior."""
        cdef Py_ssize_t lo = self.check_ptr[k], i, e
        cdef int a
        for i in range(d):
            e = lo + i
            a = self.check_vars[e]
            self.L[a] += self.msgs[i] - self.c2v[e]
            self.c2v[e] = self.msgs[i]

    cdef void update_check_plain(self, Py_ssize_t k):
        self.fresh_v2c(k)
        self.apply_msgs(k, self.new_c2v(k))

    cdef void update_check_tracked(self, Py_ssize_t k, double gamma, bint include_self,
                                   bint layer_mode, cnp.uint8_t[::1] touched_flag,
                                   cnp.int32_t[::1] touched_list, Py_ssize_t *n_touched):
        cdef Py_ssize_t d = 0, lo, i, e, s
        cdef int a, b, u
        self.fresh_v2c(k)
        d = self.new_c2v(k)
        lo = self.check_ptr[k]
        for i in range(d):
            e = lo + i
            a = self.check_vars[e]
            self.L[a] += self.msgs[i] - self.c2v[e]
            self.c2v[e] = self.msgs[i]
            self.factor_var[a] = _var_factor(self.L[a], self.lam)
            for s in range(self.var_ptr[a], self.var_ptr[a + 1]):
                b = self.var_checks[s]
                if b == k and not include_self:
                    continue
                self.recompute_p(b)
                if b != k:
                    if not layer_mode:
                        if self.q_contains(b):
                            self.q_update(b, self.p_check[b] + gamma * self.update_count[b])
                            self.n_queue_op += 1
                    else:
                        u = self.layer_of_check[b]
                        if not touched_flag[u]:
                            touched_flag[u] = 1
                            touched_list[n_touched[0]] = u
                            n_touched[0] += 1


cdef void _sort_i32(cnp.int32_t[::1] arr, Py_ssize_t n):
    """Insertion sort; touched-unit lists are tiny."""
    cdef Py_ssize_t i, j
    cdef cnp.int32_t v
    for i in range(1, n):
        v = arr[i]
        j = i - 1
        while j >= 0 and arr[j] > v:
            arr[j + 1] = arr[j]
            j -= 1
        arr[j + 1] = v


cdef double _layer_key(_Ctx ctx, Py_ssize_t u, double gamma, cnp.int64_t[::1] unit_counts):
    cdef double s = 0.0
    cdef Py_ssize_t lo = ctx.layer_ptr[u], hi = ctx.layer_ptr[u + 1], i
    for i in range(lo, hi):
        s += ctx.p_check[ctx.layer_members[i]]
    return s / (hi - lo) + gamma * unit_counts[u]


cdef double _unit_key(_Ctx ctx, Py_ssize_t u, bint penal, bint layer_mode, double gamma,
                      double beta, cnp.int64_t[::1] unit_counts, double[::1] res_check):
    cdef double scale, s
    cdef Py_ssize_t lo, hi, i
    if penal:
        if layer_mode:
            return _layer_key(ctx, u, gamma, unit_counts)
        return ctx.p_check[u] + gamma * unit_counts[u]
    scale = cpow(beta, unit_counts[u])
    if layer_mode:
        s = 0.0
        lo = ctx.layer_ptr[u]
        hi = ctx.layer_ptr[u + 1]
        for i in range(lo, hi):
            s += res_check[ctx.layer_members[i]]
        return -(scale * (s / (hi - lo)))
    return -(scale * res_check[u])


cdef bint _ebp_run_unit(_Ctx ctx, int u, bint layer_mode, long long cadence,
                        bint use_cadence, cnp.int64_t[::1] unit_counts,
                        cnp.uint8_t[::1] touched_flag, cnp.int32_t[::1] touched_list):
    """One Dyn-EBP unit update; returns True when a cadence syndrome hit."""
    cdef Py_ssize_t n_touched = 0, i
    cdef Py_ssize_t mlo, mhi
    cdef int k, t_u
    cdef double before
    cdef bint hit = False
    ctx.note_seq(u)
    if layer_mode:
        mlo = ctx.layer_ptr[u]
        mhi = ctx.layer_ptr[u + 1]
    else:
        mlo = 0
        mhi = 1
    for i in range(mlo, mhi):
        k = ctx.layer_members[i] if layer_mode else u
        before = ctx.p_check[k]
        ctx.update_check_tracked(k, 0.0, False, layer_mode, touched_flag,
                                 touched_list, &n_touched)
        ctx.note_update(k, before, ctx.p_check[k])
        if use_cadence and ctx.updates % cadence == 0 and ctx.syndrome_ok():
            hit = True
            break
    if layer_mode:
        _sort_i32(touched_list, n_touched)
        for i in range(n_touched):
            t_u = touched_list[i]
            touched_flag[t_u] = 0
            if t_u == u:
                continue
            if ctx.q_contains(t_u):
                ctx.q_update(t_u, _layer_key(ctx, t_u, 0.0, unit_counts))
                ctx.n_queue_op += 1
    return hit


def run_decode(check_ptr, check_vars, var_ptr, var_checks, var_edge,
               n_vars, n_checks, layer_of_check, layer_ptr, layer_members,
               n_layers, C, scheduler, max_iters, gamma, lam, beta,
               layer_mode, first_check, syndrome_every,
               record_sequence, record_trace, audit_balance, sequence):
    """Decode one channel realization; see schedulers.decode for the API."""
    cdef _Ctx ctx = _Ctx()
    ctx.check_ptr = np.ascontiguousarray(check_ptr, dtype=np.int64)
    ctx.check_vars = np.ascontiguousarray(check_vars, dtype=np.int32)
    ctx.var_ptr = np.ascontiguousarray(var_ptr, dtype=np.int64)
    ctx.var_checks = np.ascontiguousarray(var_checks, dtype=np.int32)
    ctx.n_vars = int(n_vars)
    ctx.n_checks = int(n_checks)
    ctx.n_edges = len(check_vars)
    ctx.lam = float(lam)

    c_arr = np.ascontiguousarray(C, dtype=np.float64)
    ctx.C = c_arr
    v2c_arr = c_arr[np.asarray(check_vars)].astype(np.float64)
    ctx.v2c = v2c_arr
    ctx.c2v = np.zeros(ctx.n_edges, dtype=np.float64)
    post_arr = c_arr.copy()
    ctx.L = post_arr
    ctx.factor_var = np.empty(ctx.n_vars, dtype=np.float64)
    cdef Py_ssize_t j
    for j in range(ctx.n_vars):
        ctx.factor_var[j] = _var_factor(ctx.L[j], ctx.lam)
    ctx.p_check = np.zeros(ctx.n_checks, dtype=np.float64)
    counts_arr = np.zeros(ctx.n_checks, dtype=np.int64)
    ctx.update_count = counts_arr
    ctx.n_v2c = ctx.n_c2v = ctx.n_rel_recompute = ctx.n_rel_multiply = ctx.n_queue_op = 0
    ctx.updates = 0
    ctx.max_spread = 0
    ctx.record_sequence = bool(record_sequence)
    ctx.audit_balance = bool(audit_balance)
    ctx.trace = [] if record_trace else None
    ctx.has_layers = bool(layer_mode)
    ctx.layer_of_check = np.ascontiguousarray(layer_of_check, dtype=np.int32)
    ctx.layer_ptr = np.ascontiguousarray(layer_ptr, dtype=np.int64)
    ctx.layer_members = np.ascontiguousarray(layer_members, dtype=np.int32)

    cdef Py_ssize_t max_deg = 0, dk
    cdef Py_ssize_t k_
    for k_ in range(ctx.n_checks):
        dk = ctx.check_ptr[k_ + 1] - ctx.check_ptr[k_]
        if dk > max_deg:
            max_deg = dk
    ctx.tfac = np.empty(max_deg, dtype=np.float64)
    ctx.pre = np.empty(max_deg + 1, dtype=np.float64)
    ctx.msgs = np.empty(max_deg, dtype=np.float64)

    cdef Py_ssize_t m = ctx.n_checks
    cdef int sched = int(scheduler)
    cdef int iters_max = int(max_iters)
    cdef double gam = float(gamma)
    cdef double bet = float(beta)
    cdef bint lmode = bool(layer_mode)
    cdef int first = int(first_check)
    cdef long long synd_every = int(syndrome_every)
    cdef Py_ssize_t unit_count = int(n_layers) if lmode else m
    cdef long long cadence = synd_every if synd_every else m

    ctx.hkey = np.empty(unit_count, dtype=np.float64)
    ctx.hid = np.empty(unit_count, dtype=np.int32)
    ctx.hpos = np.empty(unit_count, dtype=np.int64)
    ctx.q_reset(unit_count)

    seq_arr = np.empty(iters_max * unit_count + 2, dtype=np.int32) if record_sequence \
        else np.empty(0, dtype=np.int32)
    ctx.seq_buf = seq_arr
    ctx.seq_len = 0

    touched_flag_arr = np.zeros(unit_count, dtype=np.uint8)
    touched_list_arr = np.empty(unit_count, dtype=np.int32)
    cdef cnp.uint8_t[::1] touched_flag = touched_flag_arr
    cdef cnp.int32_t[::1] touched_list = touched_list_arr
    cdef Py_ssize_t n_touched = 0

    cdef cnp.int64_t[::1] unit_counts = np.zeros(unit_count, dtype=np.int64)
    cdef double[::1] res_check = np.zeros(m, dtype=np.float64)
    cdef cnp.int32_t[::1] seq_view
    cdef bint success = False, stop = False, penal = False, hit = False
    cdef long long iterations = 0, budget
    cdef Py_ssize_t it, e, i, s, lo, mlo, mhi
    cdef int u, k, a, b, t_u, skip_unit, first_pending
    cdef double before, after, key

    if sched == 0:  # flooding
        for it in range(1, iters_max + 1):
            for e in range(ctx.n_edges):
                ctx.v2c[e] = _clamp(ctx.L[ctx.check_vars[e]] - ctx.c2v[e])
            ctx.n_v2c += ctx.n_edges
            for k in range(m):
                ctx.apply_msgs(k, ctx.new_c2v(k))
                ctx.note_update(k, float("nan"), float("nan"))
                ctx.note_seq(k)
            iterations = it
            if ctx.syndrome_ok():
                success = True
                break

    elif sched == 1:  # fixed sequence
        seq_view = np.ascontiguousarray(sequence, dtype=np.int32)
        for it in range(1, iters_max + 1):
            stop = False
            for i in range(seq_view.shape[0]):
                u = seq_view[i]
                ctx.note_seq(u)
                if lmode:
                    mlo = ctx.layer_ptr[u]
                    mhi = ctx.layer_ptr[u + 1]
                else:
                    mlo = 0
                    mhi = 1
                for s in range(mlo, mhi):
                    k = ctx.layer_members[s] if lmode else u
                    ctx.update_check_plain(k)
                    ctx.note_update(k, float("nan"), float("nan"))
                    if synd_every and ctx.updates % cadence == 0 and ctx.syndrome_ok():
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

    elif sched == 2:  # dynamic error-probability, once per unit per iteration
        for it in range(1, iters_max + 1):
            ctx.recompute_all_p()
            ctx.q_reset(unit_count)
            skip_unit = -1
            if it == 1 and first >= 0:
                skip_unit = ctx.layer_of_check[first] if lmode else first
            for u in range(unit_count):
                if u == skip_unit:
                    continue
                if lmode:
                    ctx.q_insert(u, _layer_key(ctx, u, 0.0, unit_counts))
                else:
                    ctx.q_insert(u, ctx.p_check[u])
                ctx.n_queue_op += 1
            stop = False
            if skip_unit >= 0:
                stop = _ebp_run_unit(ctx, skip_unit, lmode, cadence, synd_every != 0,
                                     unit_counts, touched_flag, touched_list)
            while ctx.hsize > 0 and not stop:
                u = ctx.q_pop_min()
                ctx.n_queue_op += 1
                stop = _ebp_run_unit(ctx, u, lmode, cadence, synd_every != 0,
                                     unit_counts, touched_flag, touched_list)
            iterations = it
            if stop or ctx.syndrome_ok():
                success = True
                break

    elif sched == 3 or sched == 4:  # penalized dynamic / decaying residual
        penal = sched == 3
        if penal:
            ctx.recompute_all_p()
        else:
            for k in range(m):
                res_check[k] = ctx.residual(k)
        for u in range(unit_count):
            ctx.q_insert(u, _unit_key(ctx, u, penal, lmode, gam, bet, unit_counts, res_check))
            ctx.n_queue_op += 1
        budget = iters_max * m
        first_pending = -1
        if first >= 0:
            first_pending = ctx.layer_of_check[first] if lmode else first
        stop = False
        while ctx.updates < budget and not stop:
            if first_pending >= 0:
                u = first_pending
                first_pending = -1
                ctx.n_queue_op += 1  # peek replaced by the override
            else:
                u = ctx.q_peek_min()
                ctx.n_queue_op += 1
            ctx.note_seq(u)
            n_touched = 0
            if lmode:
                mlo = ctx.layer_ptr[u]
                mhi = ctx.layer_ptr[u + 1]
            else:
                mlo = 0
                mhi = 1
            for i in range(mlo, mhi):
                k = ctx.layer_members[i] if lmode else u
                if penal:
                    before = ctx.p_check[k] + gam * unit_counts[u]
                    ctx.update_check_tracked(k, gam, True, lmode, touched_flag,
                                             touched_list, &n_touched)
                    after = ctx.p_check[k] + gam * unit_counts[u]
                else:
                    before = _unit_key(ctx, u, penal, lmode, gam, bet, unit_counts, res_check)
                    ctx.update_check_plain(k)
                    lo = ctx.check_ptr[k]
                    for e in range(ctx.check_ptr[k + 1] - lo):
                        a = ctx.check_vars[lo + e]
                        for s in range(ctx.var_ptr[a], ctx.var_ptr[a + 1]):
                            b = ctx.var_checks[s]
                            if b == k:
                                continue
                            res_check[b] = ctx.residual(b)
                            if lmode:
                                t_u = ctx.layer_of_check[b]
                                if not touched_flag[t_u]:
                                    touched_flag[t_u] = 1
                                    touched_list[n_touched] = t_u
                                    n_touched += 1
                            else:
                                ctx.q_update(b, _unit_key(ctx, b, penal, lmode, gam, bet,
                                                          unit_counts, res_check))
                                ctx.n_queue_op += 1
                    after = before
                ctx.note_update(k, before, after)
                if ctx.updates % cadence == 0 and ctx.syndrome_ok():
                    success = True
                    stop = True
                    break
            if penal:
                _sort_i32(touched_list, n_touched)
                for i in range(n_touched):
                    t_u = touched_list[i]
                    touched_flag[t_u] = 0
                    if t_u == u:
                        continue
                    ctx.q_update(t_u, _unit_key(ctx, t_u, penal, lmode, gam, bet,
                                                unit_counts, res_check))
                    ctx.n_queue_op += 1
                unit_counts[u] += 1
                ctx.q_update(u, _unit_key(ctx, u, penal, lmode, gam, bet,
                                          unit_counts, res_check))
                ctx.n_queue_op += 1
            else:
                if lmode:
                    mlo = ctx.layer_ptr[u]
                    mhi = ctx.layer_ptr[u + 1]
                else:
                    mlo = 0
                    mhi = 1
                for i in range(mlo, mhi):
                    k = ctx.layer_members[i] if lmode else u
                    res_check[k] = ctx.residual(k)
                _sort_i32(touched_list, n_touched)
                for i in range(n_touched):
                    t_u = touched_list[i]
                    touched_flag[t_u] = 0
                    if t_u == u:
                        continue
                    ctx.q_update(t_u, _unit_key(ctx, t_u, penal, lmode, gam, bet,
                                                unit_counts, res_check))
                    ctx.n_queue_op += 1
                unit_counts[u] += 1
                ctx.q_update(u, _unit_key(ctx, u, penal, lmode, gam, bet,
                                          unit_counts, res_check))
                ctx.n_queue_op += 1
        iterations = ctx.updates // m + (1 if ctx.updates % m else 0)

    else:
        raise ValueError(f"unknown scheduler code {scheduler}")

    x_arr = np.empty(ctx.n_vars, dtype=np.uint8)
    cdef cnp.uint8_t[::1] x = x_arr
    for j in range(ctx.n_vars):
        x[j] = 1 if ctx.L[j] < 0.0 else 0

    return {
        "success": bool(success),
        "iterations": int(iterations),
        "updates": int(ctx.updates),
        "x": x_arr,
        "posterior": post_arr,
        "update_counts": counts_arr,
        "max_spread": int(ctx.max_spread) if audit_balance else -1,
        "sequence": seq_arr[:ctx.seq_len].copy() if record_sequence else None,
        "trace": ctx.trace,
        "counters": {
            "v2c_msgs": int(ctx.n_v2c),
            "c2v_msgs": int(ctx.n_c2v),
            "rel_recomputes": int(ctx.n_rel_recompute),
            "rel_multiplies": int(ctx.n_rel_multiply),
            "queue_ops": int(ctx.n_queue_op),
        },
    }
