"""Edge-weight laws: bounded nonnegative distributions with known moments.

A :class:`WeightDistribution` carries the three quantities the analytic
bounds need (mean, essential supremum ``bound``, probability of a positive
weight ``p_positive``) plus reproducible samplers.  All laws are bounded;
unbounded weights are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ._kernel import protocol

__all__ = [
    "WeightDistribution",
    "constant",
    "bernoulli",
    "uniform",
    "power_law",
    "discrete",
    "sample_weight",
    "expected_infection_ratio",
    "distribution_from_spec",
]

_PROB_TOL = 1e-12


class DistributionError(ValueError):
    """Malformed distribution parameters."""


@dataclass(frozen=True)
class WeightDistribution:
    """One of the built-in bounded weight laws.

    Immutable after construction and safe to share across workers.  Use the
    module-level factory functions rather than the constructor.
    """

    kind: str
    kind_code: int
    a: float = 0.0
    b: float = 0.0
    values: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()
    mean: float = field(init=False, default=0.0)
    bound: float = field(init=False, default=0.0)
    p_positive: float = field(init=False, default=0.0)

    def __post_init__(self):
        mean, bound, q = self._moments()
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "bound", bound)
        object.__setattr__(self, "p_positive", q)

    def _moments(self) -> tuple[float, float, float]:
        if self.kind_code == protocol.KIND_CONSTANT:
            c = self.a
            return c, c, 1.0 if c > 0 else 0.0
        if self.kind_code == protocol.KIND_BERNOULLI:
            p, scale = self.a, self.b
            return p * scale, scale, p
        if self.kind_code == protocol.KIND_UNIFORM:
            a, b = self.a, self.b
            return 0.5 * (a + b), b, 1.0 if b > 0 else 0.0
        if self.kind_code == protocol.KIND_POWER_LAW:
            alpha = self.a
            return alpha / (alpha + 1.0), 1.0, 1.0
        mean = math.fsum(v * p for v, p in zip(self.values, self.probs))
        bound = max((v for v, p in zip(self.values, self.probs) if p > 0), default=0.0)
        q = math.fsum(p for v, p in zip(self.values, self.probs) if v > 0)
        return mean, bound, min(q, 1.0)

    # -- sampling ---------------------------------------------------------

    def quantile(self, u: float) -> float:
        """Weight corresponding to the uniform ``u`` (inverse CDF)."""
        return protocol.quantile(self.kind_code, self.a, self.b, self.values, self.cumprobs, u)

    @property
    def cumprobs(self) -> tuple[float, ...]:
        if self.kind_code != protocol.KIND_DISCRETE:
            return ()
        acc, out = 0.0, []
        for p in self.probs:
            acc += p
            out.append(acc)
        out[-1] = 1.0
        return tuple(out)

    def sample_array(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Vectorized i.i.d. sample of size ``n``."""
        u = rng.random(n)
        if self.kind_code == protocol.KIND_CONSTANT:
            return np.full(n, self.a)
        if self.kind_code == protocol.KIND_BERNOULLI:
            return np.where(u < self.a, self.b, 0.0)
        if self.kind_code == protocol.KIND_UNIFORM:
            return self.a + (self.b - self.a) * u
        if self.kind_code == protocol.KIND_POWER_LAW:
            return u ** (1.0 / self.a)
        idx = np.searchsorted(np.asarray(self.cumprobs), u, side="right")
        return np.asarray(self.values)[np.minimum(idx, len(self.values) - 1)]

    def spec(self) -> dict:
        """Tagged-record form used in config files."""
        if self.kind_code == protocol.KIND_CONSTANT:
            return {"kind": "constant", "c": self.a}
        if self.kind_code == protocol.KIND_BERNOULLI:
            return {"kind": "bernoulli", "p": self.a, "scale": self.b}
        if self.kind_code == protocol.KIND_UNIFORM:
            return {"kind": "uniform", "a": self.a, "b": self.b}
        if self.kind_code == protocol.KIND_POWER_LAW:
            return {"kind": "power_law", "alpha": self.a}
        return {"kind": "discrete", "values": list(self.values), "probs": list(self.probs)}


def constant(c: float) -> WeightDistribution:
    if not (c >= 0) or not math.isfinite(c):
        raise DistributionError(f"constant weight must be finite and >= 0, got {c}")
    return WeightDistribution("constant", protocol.KIND_CONSTANT, a=float(c))


def bernoulli(p: float, scale: float = 1.0) -> WeightDistribution:
    if not (0.0 <= p <= 1.0):
        raise DistributionError(f"bernoulli p must lie in [0, 1], got {p}")
    if not (scale > 0) or not math.isfinite(scale):
        raise DistributionError(f"bernoulli scale must be finite and > 0, got {scale}")
    return WeightDistribution("bernoulli", protocol.KIND_BERNOULLI, a=float(p), b=float(scale))


def uniform(a: float, b: float) -> WeightDistribution:
    if not (0 <= a <= b) or not math.isfinite(b):
        raise DistributionError(f"uniform requires 0 <= a <= b, got a={a}, b={b}")
    return WeightDistribution("uniform", protocol.KIND_UNIFORM, a=float(a), b=float(b))


def power_law(alpha: float) -> WeightDistribution:
    """Law on (0, 1) with P(weight < x) = x**alpha."""
    if not (alpha > 0) or not math.isfinite(alpha):
        raise DistributionError(f"power_law alpha must be finite and > 0, got {alpha}")
    return WeightDistribution("power_law", protocol.KIND_POWER_LAW, a=float(alpha))


def discrete(values, probs) -> WeightDistribution:
    values = tuple(float(v) for v in values)
    probs = tuple(float(p) for p in probs)
    if len(values) != len(probs) or not values:
        raise DistributionError("discrete requires equal-length nonempty values/probs")
    if any(v < 0 or not math.isfinite(v) for v in values):
        raise DistributionError("discrete values must be finite and >= 0")
    if any(p < 0 for p in probs):
        raise DistributionError("discrete probs must be >= 0")
    total = math.fsum(probs)
    if abs(total - 1.0) > _PROB_TOL:
        raise DistributionError(f"discrete probs sum to {total}, not 1 within {_PROB_TOL}")
    probs = tuple(p / total for p in probs)
    return WeightDistribution("discrete", protocol.KIND_DISCRETE, values=values, probs=probs)


def sample_weight(dist: WeightDistribution, stream: np.random.Generator) -> float:
    """One weight from ``dist``; consumes exactly one uniform of ``stream``."""
    return dist.quantile(stream.random())


def expected_infection_ratio(dist: WeightDistribution, lam: float) -> float:
    """E[lam*w / (1 + lam*w)] for an edge weight w drawn from ``dist``.

    Closed form for the atomic kinds; adaptive quadrature (abs tol 1e-10)
    for the continuous ones, so downstream bound computations are
    deterministic.
    """
    if lam < 0:
        raise ValueError(f"infection rate must be >= 0, got {lam}")
    if lam == 0.0:
        return 0.0

    def ratio(w: float) -> float:
        lw = lam * w
        return lw / (1.0 + lw)

    k = dist.kind_code
    if k == protocol.KIND_CONSTANT:
        return ratio(dist.a)
    if k == protocol.KIND_BERNOULLI:
        return dist.a * ratio(dist.b)
    if k == protocol.KIND_DISCRETE:
        return math.fsum(p * ratio(v) for v, p in zip(dist.values, dist.probs))
    if k == protocol.KIND_UNIFORM:
        if dist.b == dist.a:
            return ratio(dist.a)
        val, _ = integrate.quad(ratio, dist.a, dist.b, epsabs=1e-10, limit=200)
        return val / (dist.b - dist.a)
    alpha = dist.a
    val, _ = integrate.quad(
        lambda x: ratio(x) * alpha * x ** (alpha - 1.0), 0.0, 1.0, epsabs=1e-10, limit=200
    )
    return val


_KIND_FACTORIES = {
    "constant": (constant, ("c",)),
    "bernoulli": (bernoulli, ("p", "scale")),
    "uniform": (uniform, ("a", "b")),
    "power_law": (power_law, ("alpha",)),
    "discrete": (discrete, ("values", "probs")),
}


def distribution_from_spec(spec: dict) -> WeightDistribution:
    """Build a distribution from its tagged-record config form.

    Unknown kinds or keys are errors; missing optional fields take the
    factory defaults.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DistributionError(f"distribution spec must be a dict with a 'kind': {spec!r}")
    kind = spec["kind"]
    if kind not in _KIND_FACTORIES:
        raise DistributionError(f"unknown distribution kind {kind!r}")
    factory, fields = _KIND_FACTORIES[kind]
    unknown = set(spec) - {"kind", *fields}
    if unknown:
        raise DistributionError(f"unknown keys {sorted(unknown)} for distribution kind {kind!r}")
    kwargs = {f: spec[f] for f in fields if f in spec}
    required = [f for f in fields if f not in spec and f != "scale"]
    if required:
        raise DistributionError(f"distribution kind {kind!r} missing fields {required}")
    return factory(**kwargs)
