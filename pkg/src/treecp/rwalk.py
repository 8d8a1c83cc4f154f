"""Distance functionals of simple random walk on the regular tree.

By symmetry the depth of the walk is a birth-death chain reflected at the
root: from depth 0 it moves to 1 surely; from depth k >= 1 it moves up
with probability N/(N+1) and down with probability 1/(N+1).  The chain is
evolved in exact rational arithmetic, so E[x^depth(n)] carries no
accumulated float error, and the closed-form product bound
[N*x/(N+1) + 1/((N+1)*x)]^n dominates it for every x in (0, 1].
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

__all__ = ["depth_distribution", "depth_functional", "depth_functional_bound", "depth_walk_samples"]


def _validate(n: int, steps: int, x: float | None = None):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if x is not None and not (0.0 < x <= 1.0):
        raise ValueError(f"x must lie in (0, 1], got {x}")


def depth_distribution(n: int, steps: int) -> list[Fraction]:
    """Exact law of the walk's depth after ``steps`` steps (index = depth)."""
    _validate(n, steps)
    up = Fraction(n, n + 1)
    down = Fraction(1, n + 1)
    probs = [Fraction(1)] + [Fraction(0)] * steps
    for _ in range(steps):
        nxt = [Fraction(0)] * (steps + 1)
        if probs[0]:
            nxt[1] += probs[0]
        for k in range(1, steps + 1):
            p = probs[k]
            if not p:
                continue
            if k + 1 <= steps:
                nxt[k + 1] += p * up
            nxt[k - 1] += p * down
        probs = nxt
    return probs
