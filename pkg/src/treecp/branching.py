"""Galton-Watson analytics and the parent-to-child (SIR) lower-bound process.

The infection genealogy of the SIR dynamics is a branching tree.  Under a
fixed weight sample the offspring law depends on the weights; in annealed
mode the toolkit uses the embedded construction in which every child
independently gets infected with probability ``lam*w / (1 + lam*w)`` for a
fresh weight ``w``, so the progeny tree is exactly Galton-Watson with
Binomial(N, E[lam*w/(1+lam*w)]) offspring.  (The shared removal clock of
the literal continuous-time dynamics correlates sibling infections; the
embedded construction trades that correlation away and is the law all
annealed-mode branching comparisons in this package are made against.)
"""

from __future__ import annotations

import numpy as np

from dataclasses import dataclass

from .contact import STATUS_NAMES, SimulationConfig, SirOutcome, sir_batch
from .tree import WeightField
from .weights import WeightDistribution, expected_infection_ratio

__all__ = [
    "BranchingModel",
    "pgf",
    "extinction_probability",
    "survival_to_depth",
    "simulate_sir",
    "sir_annealed_batch",
    "gw_progeny_batch",
]

_FIXED_POINT_TOL = 1e-12
_MAX_ITER = 100000


@dataclass(frozen=True)
class BranchingModel:
    """Binomial(N, child_success) offspring."""

    n: int
    child_success: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not (0.0 <= self.child_success <= 1.0):
            raise ValueError(f"child_success must lie in [0, 1], got {self.child_success}")

    @property
    def mean_offspring(self) -> float:
        return self.n * self.child_success

    @classmethod
    def annealed_sir(cls, n: int, dist: WeightDistribution, lam: float) -> "BranchingModel":
        """Model of the annealed SIR progeny tree at infection rate ``lam``."""
        return cls(n, expected_infection_ratio(dist, lam))

    @classmethod
    def open_cluster(cls, n: int, dist: WeightDistribution) -> "BranchingModel":
        """Model of the positive-weight cluster of the root."""
        return cls(n, dist.p_positive)


def pgf(model: BranchingModel, x: float) -> float:
    """Offspring probability generating function ((1-p) + p*x)^N."""
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"pgf argument must lie in [0, 1], got {x}")
    p = model.child_success
    return ((1.0 - p) + p * x) ** model.n


def extinction_probability(model: BranchingModel) -> float:
    """Smallest fixed point of the pgf in [0, 1].

    Monotone iteration from 0 provably converges to the minimal fixed
    point; when the offspring mean is at most one the answer is exactly 1.
    """
    if model.mean_offspring <= 1.0:
        return 1.0
    x = 0.0
    for _ in range(_MAX_ITER):
        nx = pgf(model, x)
        if abs(nx - x) < _FIXED_POINT_TOL:
            return nx
        x = nx
    return x


def survival_to_depth(model: BranchingModel, depth: int) -> float:
    """P(generation ``depth`` is nonempty): one minus the pgf iterated from 0."""
    x = 0.0
    for _ in range(depth):
        x = pgf(model, x)
    return 1.0 - x


def simulate_sir(
    config: SimulationConfig,
    field: WeightField | None,
    stream,
) -> SirOutcome:
    """One run of the SIR process on the truncation.

    Quenched mode: exact continuous-time dynamics on the fixed field (each
    infected vertex removes at rate 1 and infects each healthy child at
    rate ``lam * weight``), sharing the event engine of the contact
    process.  Annealed mode: the embedded per-child-independent
    construction described in the module docstring.
    """
    if config.mode == "quenched":
        out = sir_batch(config, stream, 1, field=field)
        return SirOutcome(
            progeny_count=int(out["progeny"][0]),
            reached_depth=int(out["reached_depth"][0]),
            status=STATUS_NAMES[int(out["status"][0])],
        )
    rng = stream if isinstance(stream, np.random.Generator) else np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(stream))
    )
    res = sir_annealed_batch(rng, 1, config.n, config.depth_d, config.lam, config.dist)
    capped = bool(res["capped"][0])
    return SirOutcome(
        progeny_count=int(res["progeny"][0]),
        reached_depth=int(res["reached_depth"][0]),
        status="capacity" if capped else "extinct",
    )


def sir_annealed_batch(
    rng: np.random.Generator,
    reps: int,
    n: int,
    depth_d: int,
    lam: float,
    dist: WeightDistribution,
    frontier_cap: int = 10**6,
) -> dict:
    """Replicates of the embedded annealed SIR, vectorized per generation.

    Every frontier vertex exposes N child edges; each edge draws a fresh
    weight w and succeeds independently with probability lam*w/(1+lam*w).
    A replicate whose frontier exceeds ``frontier_cap`` stops early and is
    flagged ``capped`` (it survives any later depth up to a probability
    below extinction_prob**frontier_cap, far beyond Monte Carlo noise).
    """
    progeny = np.ones(reps, dtype=np.int64)
    reached = np.zeros(reps, dtype=np.int64)
    capped = np.zeros(reps, dtype=bool)
    frontier = np.ones(reps, dtype=np.int64)
    active = np.arange(reps)
    for gen in range(1, depth_d + 1):
        live = frontier[active] > 0
        active = active[live]
        if active.size == 0:
            break
        edges = frontier[active] * n
        total = int(edges.sum())
        w = dist.sample_array(total, rng)
        if lam > 0:
            success = rng.random(total) < (lam * w) / (1.0 + lam * w)
        else:
            rng.random(total)
            success = np.zeros(total, dtype=bool)
        bounds = np.cumsum(edges)
        counts = np.add.reduceat(success, np.r_[0, bounds[:-1]]) if total else np.zeros(0, int)
        counts = counts.astype(np.int64)
        frontier[active] = counts
        progeny[active] += counts
        reached[active] = np.where(counts > 0, gen, reached[active])
        over = counts > frontier_cap
        if np.any(over):
            capped[active[over]] = True
            frontier[active[over]] = 0
    return {"progeny": progeny, "reached_depth": reached, "capped": capped}


def gw_progeny_batch(
    rng: np.random.Generator,
    reps: int,
    model: BranchingModel,
    depth_d: int,
    frontier_cap: int = 10**6,
) -> dict:
    """Direct Galton-Watson totals through generation ``depth_d``.

    Independent oracle for the annealed SIR equivalence: offspring counts
    are drawn as a single Binomial per frontier, not edge by edge.
    """
    progeny = np.ones(reps, dtype=np.int64)
    reached = np.zeros(reps, dtype=np.int64)
    capped = np.zeros(reps, dtype=bool)
    frontier = np.ones(reps, dtype=np.int64)
    active = np.arange(reps)
    for gen in range(1, depth_d + 1):
        live = frontier[active] > 0
        active = active[live]
        if active.size == 0:
            break
        counts = rng.binomial(frontier[active] * model.n, model.child_success).astype(np.int64)
        frontier[active] = counts
        progeny[active] += counts
        reached[active] = np.where(counts > 0, gen, reached[active])
        over = counts > frontier_cap
        if np.any(over):
            capped[active[over]] = True
            frontier[active[over]] = 0
    return {"progeny": progeny, "reached_depth": reached, "capped": capped}
