"""Deterministic primitives shared by the simulation backends.

Everything that must agree bit for bit between the compiled kernel, the
pure-Python kernel, the weight fields and the coupled-clock engine lives
here: the 64-bit avalanche mixer, the 128-bit path-key chain that names
edges of the tree, the keyed uniform streams used for common-random-number
clocks, and the quantile transform that turns one uniform into one edge
weight.

Edge addressing: every non-root vertex owns the edge to its parent, and is
named by its path of 1-based child indices from the root.  The key of a
vertex is obtained by absorbing the child indices one at a time into a
128-bit state seeded from the master seed, so deriving a child key from a
parent key is O(1) and the result depends only on (seed, path).
"""

from __future__ import annotations

import math

MASK64 = 0xFFFFFFFFFFFFFFFF

# splitmix64 increment and avalanche constants
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# domain-separation constants for the key chain and clock streams
_SEED_HI = 0x243F6A8885A308D3
_SEED_LO = 0x13198A2E03707344
_STEP_LO = 0xD1B54A32D192ED03
_OUT_TWEAK = 0x632BE59BD9B4E019
_CLOCK_A = 0x9E6C63D0876A9A47
_CLOCK_B = 0xC2B2AE3D27D4EB4F

# purpose tags for keyed clock streams (coupled / CRN mode)
TAG_RECOVERY = 1
TAG_ARROW_DOWN = 2  # parent -> child proposals, edge named by child
TAG_ARROW_UP = 3  # child -> parent proposals
TAG_THIN_DOWN = 4
TAG_THIN_UP = 5

# BCPP counts above this value set the overflow flag and void the run
ZETA_CAP = 1 << 62


def mix64(z: int) -> int:
    """splitmix64 finalizer: a bijective avalanche on 64-bit words."""
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def root_key(master_seed: int) -> tuple[int, int]:
    """128-bit state of the root vertex for a given master seed."""
    s = master_seed & MASK64
    return mix64(s ^ _SEED_HI), mix64(s ^ _SEED_LO)


def child_key(hi: int, lo: int, index: int) -> tuple[int, int]:
    """Absorb a 1-based child index into a path state.

    Both output words depend on both input words and the index, so sibling
    subtrees and parent/child states decorrelate after one step.
    """
    s = mix64(hi ^ mix64(lo ^ (index & MASK64)))
    return s, mix64((s ^ lo ^ _STEP_LO) & MASK64)


def key_uniform(hi: int, lo: int) -> float:
    """Uniform in [0, 1) from a path state, decoupled from the chain words."""
    z = mix64((hi + _OUT_TWEAK) & MASK64) ^ lo
    return (mix64(z) >> 11) * 2.0**-53


def stream_uniform(hi: int, lo: int, tag: int, index: int) -> float:
    """index-th uniform of the (vertex/edge, tag) keyed stream.

    Stateless counter construction: used by the coupled engine so that every
    infection-rate value replays the identical clock realization.
    """
    a = mix64(hi ^ ((tag * _CLOCK_A) & MASK64))
    b = mix64((lo ^ a ^ ((index * _CLOCK_B) & MASK64)) & MASK64)
    return (b >> 11) * 2.0**-53


def stream_exponential(hi: int, lo: int, tag: int, index: int, rate: float) -> float:
    """index-th inter-arrival time of a keyed Poisson clock."""
    return -math.log1p(-stream_uniform(hi, lo, tag, index)) / rate


# Distribution kind codes shared with the kernels.
KIND_CONSTANT = 0
KIND_BERNOULLI = 1
KIND_UNIFORM = 2
KIND_POWER_LAW = 3
KIND_DISCRETE = 4


def quantile(kind: int, a: float, b: float, values, cumprobs, u: float) -> float:
    """Inverse-CDF transform of one uniform into one edge weight.

    Same branch structure as the compiled kernel; (kind, a, b) encode the
    scalar-parameter families and (values, cumprobs) the discrete one.
    """
    if kind == KIND_CONSTANT:
        return a
    if kind == KIND_BERNOULLI:
        return b if u < a else 0.0
    if kind == KIND_UNIFORM:
        return a + (b - a) * u
    if kind == KIND_POWER_LAW:
        return u ** (1.0 / a)
    j = 0
    n = len(cumprobs)
    while j < n - 1 and u >= cumprobs[j]:
        j += 1
    return values[j]
