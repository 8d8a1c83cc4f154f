"""Contact processes with random edge weights on rooted regular trees.

Simulation (annealed and quenched), closed-form bounds and branching
analytics, and Monte Carlo estimation of critical values.
"""

__version__ = "0.1.0"

from ._kernel import BACKEND as KERNEL_BACKEND  # noqa: F401
