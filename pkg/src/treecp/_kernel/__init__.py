"""Simulation kernel backends.

The compiled extension is used when importable; the pure-Python kernel is
the fallback.  Both implement the same draw protocol and return identical
results for identical streams, so the choice only affects speed.  Set
``TREECP_PURE_PYTHON=1`` to force the fallback (used by the parity tests
and the backend benchmark).
"""

import os

from . import _pykernel
from . import protocol  # noqa: F401  (re-exported for kernel consumers)

if os.environ.get("TREECP_PURE_PYTHON"):
    _impl = _pykernel
else:
    try:
        from . import _ckernel as _impl
    except ImportError:
        _impl = _pykernel

BACKEND = _impl.BACKEND
contact_batch = _impl.contact_batch
bcpp_batch = _impl.bcpp_batch
selfcheck_mix = _impl.selfcheck_mix

STATUS_EXTINCT = _pykernel.STATUS_EXTINCT
STATUS_ALIVE = _pykernel.STATUS_ALIVE
STATUS_ESCAPED = _pykernel.STATUS_ESCAPED
STATUS_CAPACITY = _pykernel.STATUS_CAPACITY


def get_backend(pure_python: bool = False):
    """Return (module, name) for the requested backend; used by benchmarks."""
    if pure_python:
        return _pykernel, _pykernel.BACKEND
    return _impl, _impl.BACKEND
