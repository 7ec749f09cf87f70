"""Hot kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when it imports; setting the environment
variable ``ARTIFACT_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _pykernels

if os.environ.get("ARTIFACT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
transport_simplex = _impl.transport_simplex
min_plus_through = _impl.min_plus_through
negative_reduced_costs = _impl.negative_reduced_costs
triangle_violations = _impl.triangle_violations

__all__ = [
    "BACKEND",
    "transport_simplex",
    "min_plus_through",
    "negative_reduced_costs",
    "triangle_violations",
]
