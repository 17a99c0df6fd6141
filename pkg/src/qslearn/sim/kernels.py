"""Backend selection for the statevector kernels.

The compiled extension is used when it imports; otherwise the numpy twin.
Set ``QSLEARN_BACKEND=python`` to force the fallback (used by the benchmark
and by the backend-equivalence tests).
"""
import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

_requested = os.environ.get("QSLEARN_BACKEND", "auto").lower()

if _requested == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        log.debug("compiled kernels unavailable, using numpy fallback")
        _impl = _kernels_py
        BACKEND = "python"

apply_1q = _impl.apply_1q
apply_matrix = _impl.apply_matrix
apply_multiplexed_ry = _impl.apply_multiplexed_ry
ansatz_forward = _impl.ansatz_forward
expectation_z = _impl.expectation_z
ring_edges = _impl.ring_edges


def available_backends():
    """Return ``{name: module}`` for every importable kernel backend."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
