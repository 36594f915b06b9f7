import os
import subprocess
import sys

import numpy as np
import pytest

from persheat import _backend, _core_py
from persheat.complex import filtration_order
from persheat.persistence import boundary_matrix

from conftest import random_filtration

_core = pytest.importorskip("persheat._core")


def _norm(R, V, low):
    return [list(c) for c in R], [list(c) for c in V], list(low)


def test_reduction_agrees():
    rng = np.random.default_rng(0)
    for _ in range(200):
        K, w = random_filtration(rng)
        cols = boundary_matrix(K, filtration_order(K, w)).columns
        assert _norm(*_core.reduce_columns(cols)) == _norm(*_core_py.reduce_columns(cols))


def test_segment_and_triangle_cells_agree_exactly():
    rng = np.random.default_rng(1)
    for _ in range(300):
        g = int(rng.integers(1, 9))
        lo, h = -1.0, 2.0 / g
        p = rng.uniform(-1.2, 1.2, 6)
        if rng.random() < 0.3:  # snap to grid lines to exercise boundary cases
            p = np.round(p / h) * h
        a = _core.segment_cells(p[0], p[1], p[2], p[3], lo, h, g)
        b = _core_py.segment_cells(p[0], p[1], p[2], p[3], lo, h, g)
        assert a == b
        a = _core.triangle_cells(*p, lo, h, g)
        b = _core_py.triangle_cells(*p, lo, h, g)
        assert a.keys() == b.keys()
        for k in a:
            assert a[k] == pytest.approx(b[k], rel=1e-12, abs=1e-15)


def test_environment_switch_selects_python():
    code = "from persheat import _backend; print(_backend.BACKEND)"
    env = dict(os.environ, PERSHEAT_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert _backend.BACKEND in ("python", "cython")
