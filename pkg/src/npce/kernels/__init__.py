"""Backend selection for the hot solver kernels.

The compiled Cython core is used when present; otherwise the NumPy
fallback.  Set NPCE_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import _py

if os.environ.get("NPCE_PURE_PYTHON"):
    _backend = _py
    BACKEND = "python"
else:
    try:
        from . import _core as _backend  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _backend = _py
        BACKEND = "python"

transition = _backend.transition
solve_stationary = _backend.solve_stationary
chain_counts = _backend.chain_counts


def available_backends() -> dict:
    """All importable backends, for benchmarks and cross-checks."""
    out = {"python": _py}
    try:
        from . import _core

        out["cython"] = _core
    except ImportError:
        pass
    return out
