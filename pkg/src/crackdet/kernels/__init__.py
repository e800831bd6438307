"""Backend dispatch for the hot per-pixel kernels.

Two interchangeable implementations of the same function set exist:
``backend_numba`` (jitted loops) and ``backend_numpy`` (vectorized /
plain-Python fallback).  The environment variable ``CRACKDET_BACKEND``
selects between them:

* unset or ``auto`` -- use numba when importable, else fall back to numpy
* ``numba``         -- require the jitted backend (ImportError if missing)
* ``numpy``         -- force the fallback, even when numba is installed

Both backends are deterministic and agree to float rounding; see
``benchmarks/bench_backends.py`` for a speed comparison.
"""

import os

_requested = os.environ.get("CRACKDET_BACKEND", "auto").lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        "CRACKDET_BACKEND must be 'numba' or 'numpy', got %r" % _requested
    )

if _requested == "numpy":
    from . import backend_numpy as _impl
else:
    try:
        from . import backend_numba as _impl
    except ImportError:
        if _requested == "numba":
            raise
        from . import backend_numpy as _impl

BACKEND = _impl.NAME

bilateral = _impl.bilateral
window_sum = _impl.window_sum
conv2d_forward = _impl.conv2d_forward
conv2d_backward = _impl.conv2d_backward
maxpool_forward = _impl.maxpool_forward
maxpool_backward = _impl.maxpool_backward
label_components = _impl.label_components
