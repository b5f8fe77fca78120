"""Bitmap kernel backend selection.

The compiled Cython core is used when its extension built successfully;
otherwise the numpy fallback takes over. ``SUMMEX_KERNELS=pure`` forces the
fallback (used by tests and the kernel benchmark), ``SUMMEX_KERNELS=compiled``
raises if the extension is missing.
"""

import os

_requested = os.environ.get("SUMMEX_KERNELS", "").lower()

if _requested == "pure":
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _pykernels as _impl  # type: ignore[no-redef]

BACKEND = _impl.BACKEND
popcount = _impl.popcount
and_popcount = _impl.and_popcount
intersect = _impl.intersect
is_subset = _impl.is_subset
facet_counts = _impl.facet_counts
superset_scan = _impl.superset_scan

__all__ = [
    "BACKEND",
    "popcount",
    "and_popcount",
    "intersect",
    "is_subset",
    "facet_counts",
    "superset_scan",
]
