"""Kernel backend selection.

The compiled extension is used when importable. ``PERSHEAT_BACKEND=python``
forces the pure-Python kernels; ``PERSHEAT_BACKEND=cython`` makes a missing
extension an import error instead of a silent fallback.
"""
import os

from . import _core_py

_choice = os.environ.get("PERSHEAT_BACKEND", "").strip().lower()

if _choice == "python":
    core = _core_py
else:
    try:
        from . import _core as core
    except ImportError:
        if _choice == "cython":
            raise
        core = _core_py

BACKEND = "python" if core is _core_py else "cython"

reduce_columns = core.reduce_columns
segment_cells = core.segment_cells
triangle_cells = core.triangle_cells
