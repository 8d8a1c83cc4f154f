"""Rooted regular tree addressing, truncations, and quenched weight fields.

The tree with root degree N (every other vertex has N children plus a
parent) is addressed implicitly: a vertex is its path of 1-based child
indices from the root, the root being the empty path.  Edges are named by
their child endpoint, which gives every non-root vertex exactly one edge.

A :class:`WeightField` is one frozen sample of i.i.d. edge weights: a pure
function of (master seed, distribution, edge address) realized through the
128-bit path-key chain, so repeated queries agree bit for bit and edge
order never matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernel import protocol
from .weights import WeightDistribution

__all__ = [
    "VertexAddress",
    "CapacityError",
    "Truncation",
    "WeightField",
    "OpenCluster",
    "truncate",
    "explore_open_cluster",
]

DEFAULT_VERTEX_CAP = 10**7

ROOT: "VertexAddress" = ()

# Vertex addresses are plain tuples of 1-based child indices; the root is
# the empty tuple.  Tuples keep them hashable and cheap.
VertexAddress = tuple


class CapacityError(RuntimeError):
    """An enumeration or simulation outgrew its configured vertex cap."""


def depth(address: VertexAddress) -> int:
    return len(address)


def parent(address: VertexAddress) -> VertexAddress:
    if not address:
        raise ValueError("the root has no parent")
    return address[:-1]


def children(address: VertexAddress, n: int):
    return [address + (j,) for j in range(1, n + 1)]


def format_address(address: VertexAddress) -> str:
    """Canonical textual form: "O" for the root, "(2,1,1)" otherwise."""
    if not address:
        return "O"
    return "(" + ",".join(str(j) for j in address) + ")"


def parse_address(text: str) -> VertexAddress:
    text = text.strip()
    if text == "O":
        return ()
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"malformed vertex address {text!r}")
    return tuple(int(part) for part in text[1:-1].split(","))


def tree_size(n: int, d: int) -> int:
    """Number of vertices with depth <= d."""
    if n == 1:
        return d + 1
    return (n ** (d + 1) - 1) // (n - 1)


@dataclass(frozen=True)
class Truncation:
    """All vertices of depth <= depth_d, in breadth-first child-index order."""

    n: int
    depth_d: int
    vertices: tuple[VertexAddress, ...]

    @property
    def edges(self) -> tuple[VertexAddress, ...]:
        """Edges named by child endpoint: every vertex except the root."""
        return self.vertices[1:]


def truncate(n: int, d: int, vertex_cap: int = DEFAULT_VERTEX_CAP) -> Truncation:
    """Enumerate the finite window of depth <= d.

    Deterministic breadth-first order; raises :class:`CapacityError` before
    materializing anything larger than ``vertex_cap``.
    """
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    total = tree_size(n, d)
    if total > vertex_cap:
        raise CapacityError(f"truncation has {total} vertices, cap is {vertex_cap}")
    vertices: list[VertexAddress] = [ROOT]
    frontier: list[VertexAddress] = [ROOT]
    for _ in range(d):
        frontier = [v + (j,) for v in frontier for j in range(1, n + 1)]
        vertices.extend(frontier)
    return Truncation(n, d, tuple(vertices))


@dataclass
class WeightField:
    """One quenched realization of the i.i.d. edge weights.

    Thread-safe for concurrent reads: the weight of an edge is a pure
    function of (master_seed, dist, address), so racing cache fills are
    benign.
    """

    master_seed: int
    dist: WeightDistribution
    n: int
    _cache: dict = field(default_factory=dict, repr=False)

    def key_of(self, address: VertexAddress) -> tuple[int, int]:
        """128-bit path key of a vertex (used for edge weights and clocks)."""
        hi, lo = protocol.root_key(self.master_seed)
        for j in address:
            hi, lo = protocol.child_key(hi, lo, j)
        return hi, lo

    def edge_weight(self, child: VertexAddress) -> float:
        """Weight of the edge between ``child`` and its parent."""
        if not child:
            raise ValueError("the root has no parent edge")
        if not all(1 <= j <= self.n for j in child):
            raise ValueError(f"address {child} has child indices outside 1..{self.n}")
        w = self._cache.get(child)
        if w is None:
            hi, lo = self.key_of(child)
            w = self.dist.quantile(protocol.key_uniform(hi, lo))
            self._cache[child] = w
        return w


def edge_weight(field_: WeightField, child: VertexAddress) -> float:
    return field_.edge_weight(child)


@dataclass(frozen=True)
class OpenCluster:
    """Vertices reachable from the root through strictly positive weights.

    ``boundary_reached`` is False only when no vertex of depth exactly
    ``depth_d`` is reachable, which certifies the whole cluster is finite:
    extinction is then guaranteed at every infection rate.
    """

    depth_d: int
    boundary_reached: bool
    visited: int
    vertices: tuple[VertexAddress, ...] | None


def heap_parents(n: int, d: int, vertex_cap: int = DEFAULT_VERTEX_CAP):
    """Parent index of every vertex in heap order (root first, -1 for root).

    Heap order matches :func:`truncate`: vertex ``i`` has children
    ``i*n + 1 .. i*n + n`` and parent ``(i - 1) // n``.
    """
    total = tree_size(n, d)
    if total > vertex_cap:
        raise CapacityError(f"truncation has {total} vertices, cap is {vertex_cap}")
    idx = np.arange(total, dtype=np.int64)
    parents = (idx - 1) // n
    parents[0] = -1
    return parents


def heap_weights(field_: WeightField, d: int, vertex_cap: int = DEFAULT_VERTEX_CAP):
    """Parent-edge weight of every vertex in heap order (0.0 for the root).

    Agrees with :meth:`WeightField.edge_weight` on the corresponding
    addresses; computed by chaining keys level by level.
    """
    n = field_.n
    total = tree_size(n, d)
    if total > vertex_cap:
        raise CapacityError(f"truncation has {total} vertices, cap is {vertex_cap}")
    weights = np.zeros(total, dtype=np.float64)
    keys: list[tuple[int, int]] = [protocol.root_key(field_.master_seed)]
    for i in range(1, total):
        par = (i - 1) // n
        j = (i - 1) % n + 1
        hi, lo = protocol.child_key(*keys[par], j)
        keys.append((hi, lo))
        weights[i] = field_.dist.quantile(protocol.key_uniform(hi, lo))
    return weights


def explore_open_cluster(
    field_: WeightField,
    d: int,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    collect: bool = True,
) -> OpenCluster:
    """Explore the positive-weight cluster of the root down to depth ``d``.

    With ``collect=False`` the traversal is depth-first and stops at the
    first depth-``d`` vertex found, so certifying a surviving cluster costs
    one root-to-boundary path instead of the (typically exponential) full
    cluster.
    """
    if d < 0:
        raise ValueError(f"need d >= 0, got {d}")
    n = field_.n
    visited = 1
    out: list[VertexAddress] | None = [ROOT] if collect else None
    if d == 0:
        return OpenCluster(0, True, visited, tuple(out) if collect else None)
    boundary = False
    stack: list[VertexAddress] = [ROOT]
    while stack:
        v = stack.pop()
        for j in range(1, n + 1):
            c = v + (j,)
            if field_.edge_weight(c) <= 0.0:
                continue
            visited += 1
            if visited > vertex_cap:
                raise CapacityError(f"open cluster exceeded the vertex cap {vertex_cap}")
            if collect:
                out.append(c)
            if len(c) >= d:
                boundary = True
                if not collect:
                    return OpenCluster(d, True, visited, None)
            else:
                stack.append(c)
    if collect:
        out.sort(key=lambda a: (len(a), a))
        return OpenCluster(d, boundary, visited, tuple(out))
    return OpenCluster(d, boundary, visited, None)
