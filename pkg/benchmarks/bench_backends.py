"""Time the compiled kernels against the pure-Python ones.

    python benchmarks/bench_backends.py [--points 2000] [--g 100] [--repeat 3]
"""
import argparse
import time

import numpy as np

from persheat import _core_py
from persheat.complex import filtration_order
from persheat.geometry import alpha_weights, delaunay2d
from persheat.persistence import boundary_matrix

try:
    from persheat import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(allow_abbrev=False)
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--g", type=int, default=100, help="raster cells per side")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    th = rng.uniform(0, 2 * np.pi, args.points)
    r = rng.uniform(0.8, 1.0, args.points)
    P = np.column_stack([r * np.cos(th), r * np.sin(th)])
    K, R = delaunay2d(P)
    w = alpha_weights(K, R)
    cols = boundary_matrix(K, filtration_order(K, w)).columns
    lo, g = -1.0, args.g
    h = 2.0 / g
    edges = [np.concatenate([R.position(v) for v in s.vertices]) for s in K if s.dim == 1]
    tris = [np.concatenate([R.position(v) for v in s.vertices]) for s in K if s.dim == 2]

    def raster(mod):
        def run():
            for e in edges:
                mod.segment_cells(e[0], e[1], e[2], e[3], lo, h, g)
            for t in tris:
                mod.triangle_cells(*t, lo, h, g)
        return run

    backends = [("python", _core_py)] + ([("cython", _core)] if _core is not None else [])
    print(f"alpha complex of {args.points} annulus points: {K.k} simplices; rasterised on a {g}x{g} grid")
    print(f"{'backend':<8} {'reduce [s]':>11} {'raster [s]':>11}")
    base = None
    for name, mod in backends:
        tr = best_of(lambda: mod.reduce_columns(cols), args.repeat)
        tg = best_of(raster(mod), args.repeat)
        line = f"{name:<8} {tr:>11.4f} {tg:>11.4f}"
        if base:
            line += f"   speed-up x{base[0] / tr:.1f} / x{base[1] / tg:.1f}"
        else:
            base = (tr, tg)
        print(line)
    if _core is None:
        print("compiled extension not available; build with a C compiler to compare")


if __name__ == "__main__":
    main()
