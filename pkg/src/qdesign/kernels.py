"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the NumPy
fallback.  Setting ``QDESIGN_PURE=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py as fallback

try:
    if os.environ.get("QDESIGN_PURE", "") not in ("", "0"):
        raise ImportError("compiled kernels disabled by QDESIGN_PURE")
    from . import _kernels as compiled
except ImportError:
    compiled = None

active = compiled if compiled is not None else fallback
BACKEND = "cython" if compiled is not None else "numpy"

pair_coverage = active.pair_coverage
subset_coverage = active.subset_coverage


def get(name: str | None = None):
    """Kernel module by name: ``"cython"``, ``"numpy"`` or ``None`` (active)."""
    if name is None:
        return active
    if name == "numpy":
        return fallback
    if name == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def default_threads() -> int:
    env = os.environ.get("QDESIGN_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("QDESIGN_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1
