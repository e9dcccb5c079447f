"""Selects the receiver kernel implementation at import.

The compiled extension is used when it was built; ``LPWUS_KERNEL=python``
forces the numpy/scipy fallback.
"""

from __future__ import annotations

import os

from . import _rxkernel_py

__all__ = ["BACKEND", "available_backends", "get_backend", "window_sums"]

_backends = {"python": _rxkernel_py.window_sums}
try:
    from . import _rxkernel

    _backends["cython"] = _rxkernel.window_sums
except ImportError:  # extension not built
    pass

_wanted = os.environ.get("LPWUS_KERNEL", "").strip().lower()
if _wanted and _wanted not in _backends:
    raise ImportError(f"LPWUS_KERNEL={_wanted!r} is not available: {sorted(_backends)}")
BACKEND = _wanted or ("cython" if "cython" in _backends else "python")
window_sums = _backends[BACKEND]


def available_backends():
    return sorted(_backends)


def get_backend(name):
    return _backends[name]
