"""The weighted contact process and its counting-process companion.

Infected vertices recover at rate 1; a healthy vertex is infected at rate
``lam * sum of edge weights to infected neighbors``.  Simulation is exact
(continuous-time, event-driven with thinning) on a depth truncation of the
tree, with two boundary conventions:

* ``absorbing``: depth-D vertices have no children, so survival estimates
  are biased low relative to the infinite tree;
* ``escape``: the first infection at depth D ends the run with status
  ``escaped``, a survival proxy biased high.

The counting process (binary contact path process) assigns a nonnegative
integer to every vertex, all starting at 1: vertices zero out at rate 1
and, for every ordered neighbor pair, one count is added onto the other at
rate ``lam * weight``.  Its indicator reproduces the contact process
started from everything infected, and the expected root count upper-bounds
the survival probability; :func:`bcpp_expectation` evaluates that
expectation exactly from the truncated rate matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernel
from ._kernel import protocol
from .tree import CapacityError, WeightField, heap_parents, heap_weights, tree_size
from .weights import WeightDistribution

__all__ = [
    "SimulationConfig",
    "ContactOutcome",
    "SirOutcome",
    "BcppResult",
    "DualityReport",
    "simulate_contact",
    "simulate_bcpp",
    "bcpp_expectation",
    "duality_check",
    "contact_batch",
    "sir_batch",
    "exact_duality_pair",
]

STATUS_NAMES = {
    _kernel.STATUS_EXTINCT: "extinct",
    _kernel.STATUS_ALIVE: "alive_at_horizon",
    _kernel.STATUS_ESCAPED: "escaped",
    _kernel.STATUS_CAPACITY: "capacity",
}

DEFAULT_VERTEX_CAP = 10**7
DEFAULT_INFECTED_CAP = 10**5


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of one simulation setting.

    ``infected_cap`` bounds the live infected set: a replicate that grows
    past it stops with status ``capacity`` (it is certainly alive at that
    moment).  Estimators count such replicates as survivors and report them
    separately.
    """

    n: int
    lam: float
    horizon_t: float
    depth_d: int
    dist: WeightDistribution
    boundary: str = "absorbing"
    mode: str = "annealed"
    master_seed: int | None = None
    vertex_cap: int = DEFAULT_VERTEX_CAP
    infected_cap: int = DEFAULT_INFECTED_CAP

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if not self.horizon_t > 0:
            raise ValueError(f"horizon_t must be > 0, got {self.horizon_t}")
        if self.depth_d < 0:
            raise ValueError(f"depth_d must be >= 0, got {self.depth_d}")
        if self.boundary not in ("absorbing", "escape"):
            raise ValueError(f"boundary must be 'absorbing' or 'escape', got {self.boundary!r}")
        if self.mode not in ("annealed", "quenched"):
            raise ValueError(f"mode must be 'annealed' or 'quenched', got {self.mode!r}")
        if self.mode == "quenched" and self.master_seed is None:
            raise ValueError("quenched mode requires a master_seed")

    def field(self) -> WeightField | None:
        if self.mode != "quenched":
            return None
        return WeightField(self.master_seed, self.dist, self.n)


@dataclass(frozen=True)
class ContactOutcome:
    status: str
    time: float
    max_infected: int
    event_count: int
    infected_count_series: np.ndarray | None = None


@dataclass(frozen=True)
class SirOutcome:
    progeny_count: int
    reached_depth: int
    status: str


@dataclass(frozen=True)
class BcppResult:
    """Final counts (heap order) plus the root count at the sample times."""

    values: np.ndarray
    overflow_flag: bool
    event_count: int
    root_series: np.ndarray


@dataclass(frozen=True)
class DualityReport:
    p_forward: float
    p_dual: float
    pooled_se: float
    z_score: float
    reps: int


def _bitgen(stream):
    if isinstance(stream, np.random.Generator):
        return stream.bit_generator
    if isinstance(stream, np.random.BitGenerator):
        return stream
    return np.random.PCG64(np.random.SeedSequence(stream))


def _dist_args(dist: WeightDistribution):
    values = np.asarray(dist.values, dtype=np.float64)
    cumprobs = np.asarray(dist.cumprobs, dtype=np.float64)
    return dist.kind_code, dist.a, dist.b, values, cumprobs, dist.bound


def _field_key(config: SimulationConfig, field: WeightField | None):
    if config.mode != "quenched":
        return False, 0, 0
    if field is None:
        field = config.field()
    if field.n != config.n:
        raise ValueError(f"field has n={field.n}, config has n={config.n}")
    return True, *protocol.root_key(field.master_seed)


def contact_batch(
    config: SimulationConfig,
    stream,
    reps: int,
    init: str = "root_only",
    field: WeightField | None = None,
    sample_times=None,
    sir: bool = False,
) -> dict:
    """Low-level replicate batch; returns the kernel's arrays unchanged.

    All replicates consume the given stream sequentially, so a batch is
    reproducible from (config, stream state, reps) alone.
    """
    if init not in ("root_only", "all_infected"):
        raise ValueError(f"init must be 'root_only' or 'all_infected', got {init!r}")
    if init == "all_infected":
        if config.boundary == "escape":
            raise ValueError("all_infected start is only meaningful with an absorbing boundary")
        total = tree_size(config.n, config.depth_d)
        if total > config.vertex_cap:
            raise CapacityError(f"truncation has {total} vertices, cap {config.vertex_cap}")
    quenched, hi, lo = _field_key(config, field)
    kind, da, db, values, cumprobs, bound = _dist_args(config.dist)
    st = np.asarray(sample_times if sample_times is not None else [], dtype=np.float64)
    if st.size and np.any(np.diff(st) < 0):
        raise ValueError("sample_times must be sorted ascending")
    return _kernel.contact_batch(
        _bitgen(stream),
        reps,
        config.n,
        config.depth_d,
        config.lam,
        config.horizon_t,
        kind,
        da,
        db,
        values,
        cumprobs,
        bound,
        config.boundary == "escape",
        init == "all_infected",
        sir,
        quenched,
        hi,
        lo,
        config.vertex_cap,
        config.infected_cap,
        st,
    )


def simulate_contact(
    config: SimulationConfig,
    field: WeightField | None,
    init: str,
    stream,
    sample_times=None,
) -> ContactOutcome:
    """One exact trajectory of the contact process on the truncation."""
    out = contact_batch(config, stream, 1, init=init, field=field, sample_times=sample_times)
    series = out["series"][0] if sample_times is not None else None
    return ContactOutcome(
        status=STATUS_NAMES[int(out["status"][0])],
        time=float(out["time"][0]),
        max_infected=int(out["max_infected"][0]),
        event_count=int(out["event_count"][0]),
        infected_count_series=series,
    )


def sir_batch(config: SimulationConfig, stream, reps: int, field: WeightField | None = None) -> dict:
    """Replicates of the exact parent-to-child SIR dynamics (shared clocks)."""
    return contact_batch(config, stream, reps, init="root_only", field=field, sir=True)


# -- counting process ------------------------------------------------------


def _bcpp_arrays(config: SimulationConfig, field: WeightField | None):
    if config.mode == "quenched":
        if field is None:
            field = config.field()
    elif field is None:
        raise ValueError("the counting process needs a concrete field; "
                         "pass one or use quenched mode")
    parents = heap_parents(config.n, config.depth_d, config.vertex_cap)
    weights = heap_weights(field, config.depth_d, config.vertex_cap)
    return parents, weights


def simulate_bcpp(
    config: SimulationConfig,
    field: WeightField | None,
    stream,
    sample_times=None,
) -> BcppResult:
    """One exact trajectory of the counting process, all counts starting at 1.

    Counts above 2**62 set the overflow flag; such a run must be discarded
    from statistics (its counts are no longer exact).
    """
    parents, weights = _bcpp_arrays(config, field)
    st = np.asarray(sample_times if sample_times is not None else [], dtype=np.float64)
    out = _kernel.bcpp_batch(
        _bitgen(stream), 1, len(parents), config.n, config.lam,
        config.horizon_t, parents, weights, st, True,
    )
    return BcppResult(
        values=out["final"][0],
        overflow_flag=bool(out["overflow"][0]),
        event_count=int(out["event_count"][0]),
        root_series=out["series"][0],
    )


def bcpp_root_mean_batch(
    config: SimulationConfig,
    field: WeightField | None,
    stream,
    reps: int,
    sample_times,
) -> dict:
    """Replicate batch of root-count series (overflowed replicates flagged)."""
    parents, weights = _bcpp_arrays(config, field)
    st = np.asarray(sample_times, dtype=np.float64)
    return _kernel.bcpp_batch(
        _bitgen(stream), reps, len(parents), config.n, config.lam,
        config.horizon_t, parents, weights, st, False,
    )


def bcpp_expectation(
    config: SimulationConfig,
    field: WeightField | None,
    t: float,
    tol: float = 1e-10,
) -> float:
    """Exact expected root count at time ``t``: e^{-t} * (e^{tG} 1)(root).

    G is the weighted adjacency matrix of the truncation scaled by ``lam``.
    The exponential series is summed by iterated sparse matrix-vector
    products until the explicit tail bound
    sum_{k>n} (t*lam*(N+1)*M)^k e^{-t} / k!  drops below ``tol``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return 1.0
    from scipy import sparse

    parents, weights = _bcpp_arrays(config, field)
    v = len(parents)
    if v == 1:
        return math.exp(-t)
    rows = np.concatenate([np.arange(1, v), parents[1:]])
    cols = np.concatenate([parents[1:], np.arange(1, v)])
    data = np.concatenate([weights[1:], weights[1:]]) * config.lam
    g = sparse.csr_matrix((data, (rows, cols)), shape=(v, v))

    r = t * config.lam * (config.n + 1) * config.dist.bound
    vec = np.ones(v)
    coeff = math.exp(-t)  # e^{-t} t^k / k!, starting at k=0
    total = coeff * vec[0]
    tail_term = coeff  # e^{-t} r^k / k! at current k
    k = 0
    while True:
        # geometric bound on the series tail beyond k
        if r < k + 2:
            tail = tail_term * (r / (k + 1)) / (1.0 - r / (k + 2))
            if tail < tol:
                return float(total)
        k += 1
        vec = g @ vec
        coeff *= t / k
        tail_term *= r / k
        total += coeff * vec[0]
        if k > 200000:
            raise RuntimeError("series failed to converge; check parameters")


# -- duality ---------------------------------------------------------------


def duality_check(
    config: SimulationConfig,
    field: WeightField | None,
    t: float,
    reps: int,
    stream,
) -> DualityReport:
    """Monte Carlo check of the forward/dual identity on one fixed field.

    p_forward estimates P(infected set nonempty at t | root infected);
    p_dual estimates P(root infected at t | everything infected).  The two
    are equal in law on any finite weighted graph, so the z-score should
    behave like a standard normal.  Both sides run on the same field with
    an absorbing boundary.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if config.mode != "quenched" and field is None:
        raise ValueError("duality_check compares both sides on one fixed field; "
                         "use quenched mode or pass a field")
    cfg = SimulationConfig(
        n=config.n, lam=config.lam, horizon_t=t if t > 0 else 1.0, depth_d=config.depth_d,
        dist=config.dist, boundary="absorbing", mode="quenched",
        master_seed=config.master_seed if config.mode == "quenched" else field.master_seed,
        vertex_cap=config.vertex_cap, infected_cap=config.infected_cap,
    )
    if t == 0.0:
        return DualityReport(1.0, 1.0, 0.0, 0.0, reps)
    bg = _bitgen(stream)
    fwd = contact_batch(cfg, bg, reps, init="root_only")
    dual = contact_batch(cfg, bg, reps, init="all_infected")
    p_forward = float(np.mean(fwd["status"] != _kernel.STATUS_EXTINCT))
    p_dual = float(np.mean(dual["root_infected"] == 1))
    pooled_se = math.sqrt(
        p_forward * (1 - p_forward) / reps + p_dual * (1 - p_dual) / reps
    )
    z = abs(p_forward - p_dual) / pooled_se if pooled_se > 0 else 0.0
    return DualityReport(p_forward, p_dual, pooled_se, z, reps)


def exact_duality_pair(config: SimulationConfig, field: WeightField | None, t: float):
    """Both duality probabilities by exact generator exponentiation.

    Enumerates all 2^V infection states of the truncation, so it is only
    for tiny graphs (V <= 12); used as an oracle for the Monte Carlo check.
    """
    from scipy.linalg import expm

    parents, weights = _bcpp_arrays(config, field)
    v = len(parents)
    if v > 12:
        raise CapacityError(f"exact enumeration over 2^{v} states refused")
    nstates = 1 << v
    lam = config.lam
    q = np.zeros((nstates, nstates))
    neighbors = [[] for _ in range(v)]
    for i in range(1, v):
        neighbors[i].append((int(parents[i]), weights[i]))
        neighbors[int(parents[i])].append((i, weights[i]))
    for s in range(nstates):
        for x in range(v):
            if s & (1 << x):
                q[s, s ^ (1 << x)] += 1.0
            else:
                rate = lam * sum(w for y, w in neighbors[x] if s & (1 << y))
                if rate > 0:
                    q[s, s | (1 << x)] += rate
        q[s, s] -= q[s].sum()
    pt = expm(q * t)
    root_only = 1  # state bitmask {root}
    full = nstates - 1
    p_forward = 1.0 - pt[root_only, 0]
    occupied = [s for s in range(nstates) if s & 1]
    p_dual = float(pt[full, occupied].sum())
    return p_forward, p_dual
