# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled event kernels: a line-by-line twin of ``_pykernel``.

Any change to the draw protocol or to an arithmetic expression here must
be mirrored there (and vice versa); the parity tests assert bit-identical
outcomes between the two backends.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport log1p, pow
from libcpp.vector cimport vector
from numpy.random cimport bitgen_t

BACKEND = "cython"

STATUS_EXTINCT = 0
STATUS_ALIVE = 1
STATUS_ESCAPED = 2
STATUS_CAPACITY = 3

cdef unsigned long long MASK64 = 0xFFFFFFFFFFFFFFFFULL
cdef unsigned long long GOLDEN = 0x9E3779B97F4A7C15ULL
cdef unsigned long long MIX1 = 0xBF58476D1CE4E5B9ULL
cdef unsigned long long MIX2 = 0x94D049BB133111EBULL
cdef unsigned long long STEP_LO = 0xD1B54A32D192ED03ULL
cdef unsigned long long OUT_TWEAK = 0x632BE59BD9B4E019ULL

cdef long long ZETA_CAP = (<long long>1) << 62

cdef int KIND_CONSTANT = 0
cdef int KIND_BERNOULLI = 1
cdef int KIND_UNIFORM = 2
cdef int KIND_POWER_LAW = 3
cdef int KIND_DISCRETE = 4

cdef double TWO_NEG53 = 1.1102230246251565e-16  # 2 ** -53


cdef inline unsigned long long mix64(unsigned long long z) nogil:
    z = z + GOLDEN
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline void child_key(unsigned long long hi, unsigned long long lo,
                           unsigned long long index,
                           unsigned long long *out_hi, unsigned long long *out_lo) nogil:
    cdef unsigned long long s = mix64(hi ^ mix64(lo ^ index))
    out_hi[0] = s
    out_lo[0] = mix64(s ^ lo ^ STEP_LO)


cdef inline double key_uniform(unsigned long long hi, unsigned long long lo) nogil:
    cdef unsigned long long z = mix64(hi + OUT_TWEAK) ^ lo
    return <double>(mix64(z) >> 11) * TWO_NEG53


cdef inline double quantile(int kind, double da, double db,
                            double *values, double *cumprobs, int ncp,
                            double u) nogil:
    cdef int j, last
    if kind == KIND_CONSTANT:
        return da
    if kind == KIND_BERNOULLI:
        return db if u < da else 0.0
    if kind == KIND_UNIFORM:
        return da + (db - da) * u
    if kind == KIND_POWER_LAW:
        return pow(u, 1.0 / da)
    j = 0
    last = ncp - 1
    while j < last and u >= cumprobs[j]:
        j += 1
    return values[j]


def contact_batch(bitgen, long long reps, long long n, long long depth_d,
                  double lam, double horizon,
                  int kind, double da, double db, values_in, cumprobs_in,
                  double bound, bint escape, bint init_all, bint sir,
                  bint quenched, unsigned long long seed_hi, unsigned long long seed_lo,
                  long long vertex_cap, long long infected_cap, sample_times):
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")

    cdef double[::1] values_arr = np.ascontiguousarray(values_in, dtype=np.float64)
    cdef double[::1] cumprobs_arr = np.ascontiguousarray(cumprobs_in, dtype=np.float64)
    cdef double[::1] stimes = np.ascontiguousarray(sample_times, dtype=np.float64)
    cdef int ncp = cumprobs_arr.shape[0]
    cdef long long ns = stimes.shape[0]
    cdef double *values = &values_arr[0] if values_arr.shape[0] else NULL
    cdef double *cumprobs = &cumprobs_arr[0] if ncp else NULL

    status_np = np.empty(reps, dtype=np.int8)
    time_np = np.empty(reps, dtype=np.float64)
    maxinf_np = np.empty(reps, dtype=np.int64)
    events_np = np.empty(reps, dtype=np.int64)
    progeny_np = np.empty(reps, dtype=np.int64)
    reached_np = np.empty(reps, dtype=np.int64)
    rootinf_np = np.empty(reps, dtype=np.int8)
    series_np = np.zeros((reps, ns), dtype=np.int64)
    cdef signed char[::1] status = status_np
    cdef double[::1] time_out = time_np
    cdef long long[::1] max_infected = maxinf_np
    cdef long long[::1] event_count = events_np
    cdef long long[::1] progeny = progeny_np
    cdef long long[::1] reached = reached_np
    cdef signed char[::1] root_infected = rootinf_np
    cdef long long[:, ::1] series = series_np.reshape(reps, max(ns, 1))[:, :ns] if ns else series_np.reshape(reps, 0)

    cdef long long slots = n if sir else n + 1
    cdef double c = 1.0 + lam * bound * slots
    cdef double nan = float("nan")

    cdef vector[long long] parent_, childnum, depth_, child_id, infected, inf_pos
    cdef vector[unsigned long long] key_hi, key_lo
    cdef vector[signed char] state
    cdef vector[double] w_edge

    cdef long long rep, n_inf, max_inf, ever, max_depth, events, si
    cdef long long yi, y, x, j, k, base, cid, v, level_start, level_end, dv, last
    cdef double t, tn, u, w, rmax, out_time
    cdef int out_status
    cdef unsigned long long hi, lo

    for rep in range(reps):
        parent_.clear(); parent_.push_back(-1)
        childnum.clear(); childnum.push_back(-1)
        depth_.clear(); depth_.push_back(0)
        key_hi.clear(); key_hi.push_back(seed_hi)
        key_lo.clear(); key_lo.push_back(seed_lo)
        state.clear(); state.push_back(0)
        child_id.clear(); child_id.resize(n, -1)
        w_edge.clear(); w_edge.resize(n, nan)
        infected.clear()
        inf_pos.clear()

        if init_all:
            level_start = 0
            level_end = 1
            for _ in range(depth_d):
                for v in range(level_start, level_end):
                    base = v * n
                    dv = depth_[v] + 1
                    for j in range(n):
                        cid = parent_.size()
                        child_id[base + j] = cid
                        parent_.push_back(v)
                        childnum.push_back(j)
                        depth_.push_back(dv)
                        if quenched:
                            child_key(key_hi[v], key_lo[v], j + 1, &hi, &lo)
                        else:
                            hi = 0; lo = 0
                        key_hi.push_back(hi)
                        key_lo.push_back(lo)
                        state.push_back(0)
                        child_id.resize(child_id.size() + n, -1)
                        w_edge.resize(w_edge.size() + n, nan)
                level_start = level_end
                level_end = parent_.size()
            for v in range(<long long>parent_.size()):
                infected.push_back(v)
                inf_pos.push_back(v)
                state[v] = 1
        else:
            state[0] = 1
            infected.push_back(0)
            inf_pos.push_back(0)

        n_inf = infected.size()
        max_inf = n_inf
        ever = n_inf
        max_depth = depth_d if init_all else 0
        events = 0
        t = 0.0
        si = 0
        out_status = STATUS_ALIVE
        out_time = horizon

        while True:
            if n_inf == 0:
                out_status = STATUS_EXTINCT
                out_time = t
                break
            rmax = (<double>n_inf) * c
            u = rng.next_double(rng.state)
            tn = t + (-log1p(-u) / rmax)
            while si < ns and stimes[si] < tn:
                series[rep, si] = n_inf
                si += 1
            if tn > horizon:
                out_status = STATUS_ALIVE
                out_time = horizon
                break
            t = tn

            u = rng.next_double(rng.state)
            yi = <long long>(u * (<double>n_inf))
            if yi >= n_inf:
                yi = n_inf - 1
            y = infected[yi]

            u = rng.next_double(rng.state)
            if u * c < 1.0:
                last = infected.back()
                infected.pop_back()
                if yi < n_inf - 1:
                    infected[yi] = last
                    inf_pos[last] = yi
                n_inf -= 1
                inf_pos[y] = -1
                # NB: do not fold into a conditional expression: Cython 3.2
                # miscompiles ternaries assigned into vector elements.
                if sir:
                    state[y] = 2
                else:
                    state[y] = 0
                events += 1
                continue

            u = rng.next_double(rng.state)
            k = <long long>(u * (<double>slots))
            if k >= slots:
                k = slots - 1
            if (not sir) and k == 0:
                x = parent_[y]
                if x < 0 or state[x] != 0:
                    continue
                j = childnum[y]
                base = x * n + j
                w = w_edge[base]
                if w != w:
                    if quenched:
                        w = quantile(kind, da, db, values, cumprobs, ncp,
                                     key_uniform(key_hi[y], key_lo[y]))
                    else:
                        w = quantile(kind, da, db, values, cumprobs, ncp,
                                     rng.next_double(rng.state))
                    w_edge[base] = w
                u = rng.next_double(rng.state)
                if u * bound >= w:
                    continue
            else:
                j = k if sir else k - 1
                if depth_[y] >= depth_d:
                    continue
                base = y * n + j
                x = child_id[base]
                if x >= 0 and state[x] != 0:
                    continue
                w = w_edge[base]
                if w != w:
                    if quenched:
                        child_key(key_hi[y], key_lo[y], j + 1, &hi, &lo)
                        w = quantile(kind, da, db, values, cumprobs, ncp,
                                     key_uniform(hi, lo))
                    else:
                        w = quantile(kind, da, db, values, cumprobs, ncp,
                                     rng.next_double(rng.state))
                    w_edge[base] = w
                u = rng.next_double(rng.state)
                if u * bound >= w:
                    continue
                if x < 0:
                    x = parent_.size()
                    if x >= vertex_cap:
                        out_status = STATUS_CAPACITY
                        out_time = t
                        break
                    child_id[base] = x
                    parent_.push_back(y)
                    childnum.push_back(j)
                    depth_.push_back(depth_[y] + 1)
                    if quenched:
                        child_key(key_hi[y], key_lo[y], j + 1, &hi, &lo)
                    else:
                        hi = 0; lo = 0
                    key_hi.push_back(hi)
                    key_lo.push_back(lo)
                    state.push_back(0)
                    inf_pos.push_back(-1)
                    child_id.resize(child_id.size() + n, -1)
                    w_edge.resize(w_edge.size() + n, nan)

            state[x] = 1
            inf_pos[x] = n_inf
            infected.push_back(x)
            n_inf += 1
            events += 1
            ever += 1
            if depth_[x] > max_depth:
                max_depth = depth_[x]
            if n_inf > max_inf:
                max_inf = n_inf
            if n_inf > infected_cap:
                out_status = STATUS_CAPACITY
                out_time = t
                break
            if escape and depth_[x] >= depth_d:
                out_status = STATUS_ESCAPED
                out_time = t
                break

        while si < ns:
            series[rep, si] = n_inf
            si += 1
        status[rep] = out_status
        time_out[rep] = out_time
        max_infected[rep] = max_inf
        event_count[rep] = events
        progeny[rep] = ever
        reached[rep] = max_depth
        if state[0] == 1:
            root_infected[rep] = 1
        else:
            root_infected[rep] = 0

    return {
        "status": status_np,
        "time": time_np,
        "max_infected": maxinf_np,
        "event_count": events_np,
        "progeny": progeny_np,
        "reached_depth": reached_np,
        "root_infected": rootinf_np,
        "series": series_np,
    }


def bcpp_batch(bitgen, long long reps, long long v, long long n, double lam,
               double horizon, parent_idx_in, edge_w_in, sample_times, bint keep_final):
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")

    cdef long long[::1] parent_idx = np.ascontiguousarray(parent_idx_in, dtype=np.int64)
    cdef double[::1] edge_w = np.ascontiguousarray(edge_w_in, dtype=np.float64)
    cdef double[::1] stimes = np.ascontiguousarray(sample_times, dtype=np.float64)
    cdef long long ns = stimes.shape[0]
    cdef long long m = 2 * (v - 1)

    cdef vector[double] cum
    cum.resize(m, 0.0)
    cdef double acc = 0.0
    cdef long long e, i
    for e in range(m):
        i = e + 1 if e < v - 1 else e - (v - 1) + 1
        acc += lam * edge_w[i]
        cum[e] = acc
    cdef double wtot = acc
    cdef double rate = (<double>v) + wtot

    series_np = np.zeros((reps, ns), dtype=np.int64)
    overflow_np = np.zeros(reps, dtype=np.uint8)
    events_np = np.empty(reps, dtype=np.int64)
    final_np = np.zeros((reps, v), dtype=np.int64) if keep_final else None
    cdef long long[:, ::1] series = series_np.reshape(reps, max(ns, 1))[:, :ns] if ns else series_np.reshape(reps, 0)
    cdef unsigned char[::1] overflow = overflow_np
    cdef long long[::1] event_count = events_np
    cdef long long[:, ::1] final
    if keep_final:
        final = final_np

    cdef vector[long long] zeta
    cdef long long rep, si, events, x, lo_i, hi_i, mid, src, dst, zs
    cdef double t, tn, u, target
    cdef bint oflow

    for rep in range(reps):
        zeta.clear()
        zeta.resize(v, 1)
        t = 0.0
        si = 0
        events = 0
        oflow = False
        while True:
            u = rng.next_double(rng.state)
            tn = t + (-log1p(-u) / rate)
            while si < ns and stimes[si] < tn:
                series[rep, si] = zeta[0]
                si += 1
            if tn > horizon:
                break
            t = tn
            u = rng.next_double(rng.state)
            if u * rate < (<double>v):
                u = rng.next_double(rng.state)
                x = <long long>(u * (<double>v))
                if x >= v:
                    x = v - 1
                zeta[x] = 0
            else:
                u = rng.next_double(rng.state)
                target = u * wtot
                lo_i = 0
                hi_i = m
                while lo_i < hi_i:
                    mid = (lo_i + hi_i) // 2
                    if target < cum[mid]:
                        hi_i = mid
                    else:
                        lo_i = mid + 1
                e = lo_i if lo_i < m else m - 1
                if e < v - 1:
                    dst = e + 1
                    src = parent_idx[dst]
                else:
                    src = e - (v - 1) + 1
                    dst = parent_idx[src]
                zs = zeta[src]
                if zs > ZETA_CAP - zeta[dst]:
                    oflow = True
                    break
                zeta[dst] += zs
            events += 1
        while si < ns:
            series[rep, si] = zeta[0]
            si += 1
        if oflow:
            overflow[rep] = 1
        else:
            overflow[rep] = 0
        event_count[rep] = events
        if keep_final:
            for x in range(v):
                final[rep, x] = zeta[x]

    return {
        "series": series_np,
        "overflow": overflow_np,
        "event_count": events_np,
        "final": final_np,
    }


def selfcheck_mix(seed):
    cdef unsigned long long hi = <unsigned long long>seed
    cdef unsigned long long lo = (<unsigned long long>seed) * 3ULL
    cdef unsigned long long nhi, nlo
    out = []
    for j in (1, 2, 5):
        child_key(hi, lo, j, &nhi, &nlo)
        hi = nhi
        lo = nlo
        out.append(key_uniform(hi, lo))
    return out


def selfcheck_quantile(int kind, double da, double db, double u):
    return quantile(kind, da, db, NULL, NULL, 0, u)
