"""Pure-Python event kernels: the reference backend.

The compiled backend in ``_ckernel.pyx`` is a line-by-line twin of this
module.  Both consume the replicate stream through the same protocol (one
``next_double`` per draw, draws in the same order, IEEE double arithmetic
in the same expression order), so a given (configuration, stream) produces
bit-identical outcomes on either backend.

Contact / SIR engine: exact continuous-time sampling by uniformization.
Every infected vertex carries the constant dominating rate
``c = 1 + lam * M * slots`` (slots = N+1 neighbors for the contact
process, N children for SIR).  Each step draws the event time from the
total dominating rate, picks an infected vertex uniformly, then either
recovers it (probability 1/c) or proposes a uniformly chosen neighbor
slot and accepts the infection with probability ``weight / M`` if the
target is healthy.  Rejections advance time without changing state, which
is exactly the thinning construction of the process.

Draw order per event: u_time, u_vertex, u_branch, then for infection
attempts u_slot, [u_weight if this edge has never been sampled, annealed
mode only], u_accept.  Proposals that cannot hit a live target (parent of
the root, children past the truncation depth, infected or removed
targets) stop before the weight and acceptance draws.

The vertex arena grows lazily: only vertices that have ever been proposed
for infection exist.  Vertices past the configured caps raise the
capacity status instead of growing further.
"""

from __future__ import annotations

import math

import numpy as np

from .protocol import (
    KIND_BERNOULLI,
    KIND_CONSTANT,
    KIND_POWER_LAW,
    KIND_UNIFORM,
    MASK64,
    ZETA_CAP,
    child_key,
    key_uniform,
)

BACKEND = "python"

STATUS_EXTINCT = 0
STATUS_ALIVE = 1
STATUS_ESCAPED = 2
STATUS_CAPACITY = 3


def _quantile(kind, da, db, values, cumprobs, u):
    if kind == KIND_CONSTANT:
        return da
    if kind == KIND_BERNOULLI:
        return db if u < da else 0.0
    if kind == KIND_UNIFORM:
        return da + (db - da) * u
    if kind == KIND_POWER_LAW:
        return u ** (1.0 / da)
    j = 0
    last = len(cumprobs) - 1
    while j < last and u >= cumprobs[j]:
        j += 1
    return values[j]


def contact_batch(
    bitgen,
    reps,
    n,
    depth_d,
    lam,
    horizon,
    kind,
    da,
    db,
    values,
    cumprobs,
    bound,
    escape,
    init_all,
    sir,
    quenched,
    seed_hi,
    seed_lo,
    vertex_cap,
    infected_cap,
    sample_times,
):
    rng = np.random.Generator(bitgen).random
    values = [float(v) for v in values]
    cumprobs = [float(c) for c in cumprobs]
    stimes = [float(s) for s in sample_times]
    ns = len(stimes)

    status = np.empty(reps, dtype=np.int8)
    time_out = np.empty(reps, dtype=np.float64)
    max_infected = np.empty(reps, dtype=np.int64)
    event_count = np.empty(reps, dtype=np.int64)
    progeny = np.empty(reps, dtype=np.int64)
    reached = np.empty(reps, dtype=np.int64)
    root_infected = np.empty(reps, dtype=np.int8)
    series = np.zeros((reps, ns), dtype=np.int64)

    slots = n if sir else n + 1
    c = 1.0 + lam * bound * slots
    nan = float("nan")

    for rep in range(reps):
        # arena, index 0 = root
        parent_ = [-1]
        childnum = [-1]
        depth_ = [0]
        key_hi = [seed_hi]
        key_lo = [seed_lo]
        state = [0]
        child_id = [-1] * n
        w_edge = [nan] * n

        if init_all:
            level_start, level_end = 0, 1
            for _ in range(depth_d):
                for v in range(level_start, level_end):
                    base = v * n
                    dv = depth_[v] + 1
                    for j in range(n):
                        cid = len(parent_)
                        child_id[base + j] = cid
                        parent_.append(v)
                        childnum.append(j)
                        depth_.append(dv)
                        if quenched:
                            hi, lo = child_key(key_hi[v], key_lo[v], j + 1)
                        else:
                            hi, lo = 0, 0
                        key_hi.append(hi)
                        key_lo.append(lo)
                        state.append(0)
                        child_id.extend([-1] * n)
                        w_edge.extend([nan] * n)
                level_start, level_end = level_end, len(parent_)
            infected = list(range(len(parent_)))
            inf_pos = list(range(len(parent_)))
            for v in infected:
                state[v] = 1
        else:
            state[0] = 1
            infected = [0]
            inf_pos = [0]

        n_inf = len(infected)
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
            rmax = n_inf * c
            u = rng()
            tn = t + (-math.log1p(-u) / rmax)
            while si < ns and stimes[si] < tn:
                series[rep, si] = n_inf
                si += 1
            if tn > horizon:
                out_status = STATUS_ALIVE
                out_time = horizon
                break
            t = tn

            u = rng()
            yi = int(u * n_inf)
            if yi >= n_inf:
                yi = n_inf - 1
            y = infected[yi]

            u = rng()
            if u * c < 1.0:
                # recovery (contact) or removal (SIR)
                last = infected.pop()
                if yi < n_inf - 1:
                    infected[yi] = last
                    inf_pos[last] = yi
                n_inf -= 1
                inf_pos[y] = -1
                state[y] = 2 if sir else 0
                events += 1
                continue

            u = rng()
            k = int(u * slots)
            if k >= slots:
                k = slots - 1
            if not sir and k == 0:
                # parent direction
                x = parent_[y]
                if x < 0 or state[x] != 0:
                    continue
                j = childnum[y]
                base = x * n + j
                w = w_edge[base]
                if w != w:
                    if quenched:
                        w = _quantile(kind, da, db, values, cumprobs,
                                      key_uniform(key_hi[y], key_lo[y]))
                    else:
                        w = _quantile(kind, da, db, values, cumprobs, rng())
                    w_edge[base] = w
                u = rng()
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
                        hi, lo = child_key(key_hi[y], key_lo[y], j + 1)
                        w = _quantile(kind, da, db, values, cumprobs, key_uniform(hi, lo))
                    else:
                        w = _quantile(kind, da, db, values, cumprobs, rng())
                    w_edge[base] = w
                u = rng()
                if u * bound >= w:
                    continue
                if x < 0:
                    x = len(parent_)
                    if x >= vertex_cap:
                        out_status = STATUS_CAPACITY
                        out_time = t
                        break
                    child_id[base] = x
                    parent_.append(y)
                    childnum.append(j)
                    depth_.append(depth_[y] + 1)
                    if quenched:
                        hi, lo = child_key(key_hi[y], key_lo[y], j + 1)
                    else:
                        hi, lo = 0, 0
                    key_hi.append(hi)
                    key_lo.append(lo)
                    state.append(0)
                    inf_pos.append(-1)
                    child_id.extend([-1] * n)
                    w_edge.extend([nan] * n)

            # infect x
            state[x] = 1
            inf_pos[x] = n_inf
            infected.append(x)
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
        root_infected[rep] = 1 if state[0] == 1 else 0

    return {
        "status": status,
        "time": time_out,
        "max_infected": max_infected,
        "event_count": event_count,
        "progeny": progeny,
        "reached_depth": reached,
        "root_infected": root_infected,
        "series": series,
    }


def bcpp_batch(bitgen, reps, v, n, lam, horizon, parent_idx, edge_w, sample_times, keep_final):
    """Counting-process replicates on a dense depth-truncation.

    State: one nonnegative integer per vertex, all starting at 1.  Every
    vertex zeroes at rate 1; for every ordered neighbor pair (x absorbs y)
    the count of y is added onto x at rate ``lam * weight``.  All clocks
    stay active regardless of state, so the total event rate is constant
    and each step costs one time draw, one branch draw and one index draw.

    Draw order per event: u_time, u_branch, then u_vertex (zeroing) or
    u_edge (absorption, chosen by binary search in the cumulative directed
    edge weights).
    """
    rng = np.random.Generator(bitgen).random
    parent_idx = [int(p) for p in parent_idx]
    edge_w = [float(w) for w in edge_w]
    stimes = [float(s) for s in sample_times]
    ns = len(stimes)
    m = 2 * (v - 1)

    # cumulative directed-edge weights; e < v-1: child e+1 absorbs its
    # parent, else the parent absorbs child e-(v-1)+1
    cum = [0.0] * m
    acc = 0.0
    for e in range(m):
        i = e + 1 if e < v - 1 else e - (v - 1) + 1
        acc += lam * edge_w[i]
        cum[e] = acc
    wtot = acc
    rate = v + wtot

    series = np.zeros((reps, ns), dtype=np.int64)
    overflow = np.zeros(reps, dtype=np.uint8)
    event_count = np.empty(reps, dtype=np.int64)
    final = np.zeros((reps, v), dtype=np.int64) if keep_final else None

    for rep in range(reps):
        zeta = [1] * v
        t = 0.0
        si = 0
        events = 0
        oflow = False
        while True:
            u = rng()
            tn = t + (-math.log1p(-u) / rate)
            while si < ns and stimes[si] < tn:
                series[rep, si] = zeta[0]
                si += 1
            if tn > horizon:
                break
            t = tn
            u = rng()
            if u * rate < v:
                u = rng()
                x = int(u * v)
                if x >= v:
                    x = v - 1
                zeta[x] = 0
            else:
                u = rng()
                target = u * wtot
                lo, hi = 0, m
                while lo < hi:
                    mid = (lo + hi) // 2
                    if target < cum[mid]:
                        hi = mid
                    else:
                        lo = mid + 1
                e = lo if lo < m else m - 1
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
        overflow[rep] = 1 if oflow else 0
        event_count[rep] = events
        if keep_final:
            final[rep, :] = zeta

    return {
        "series": series,
        "overflow": overflow,
        "event_count": event_count,
        "final": final,
    }


def selfcheck_mix(seed):
    """Chain a few path keys and uniforms; used by cross-backend tests."""
    hi = seed & MASK64
    lo = (seed * 3) & MASK64
    out = []
    for j in (1, 2, 5):
        hi, lo = child_key(hi, lo, j)
        out.append(key_uniform(hi, lo))
    return out
