"""Command line interface: ``persheat <command> ...``.

Every command accepts ``--seed`` and writes a manifest JSON next to its main
output (``<output stem>.manifest.json`` unless ``--manifest`` is given). The
manifest echoes the parameters and library versions; it carries no
timestamps and omits ``--workers``, which never changes results.
"""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .complex import read_filtration, write_filtration
from .datagen import ANNULUS_CLASSES, GeneratorSpec, generate, read_points, write_points
from .features import (
    DeathVectorFeaturizer,
    LandscapeFeaturizer,
    LandscapeGrid,
    default_grid,
    featurizer_from_dict,
)
from .geometry import GeometricRealization
from .heatmap import ChainSelector, ConstantF, PersistenceF, heatmap
from .kernels import HeatmapMap, KernelSpec, SlicedMap, expected_heatmap, lipschitz_probe, probe_pairs
from .learn import SCALINGS, LinearModel, ModelF, train_svm, train_svr
from .persistence import AnnotatedDiagram, drop_zero_persistence, persistence_diagram
from .pipeline import experiment_expected_phm, filtration, sample_diagrams
from .raster import RasterGrid, rasterize, write_raster

SELECTORS = [s.value for s in ChainSelector]


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _clean(v):
    if isinstance(v, Path):
        return str(v)
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def write_manifest(args, outputs: list, extra: dict | None = None) -> Path:
    params = {k: _clean(v) for k, v in sorted(vars(args).items()) if k not in ("func", "workers", "manifest")}
    payload = {
        "command": args.command,
        "seed": args.seed,
        "params": params,
        "outputs": [str(o) for o in outputs],
        "versions": {
            "persheat": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
            "backend": _backend.BACKEND,
        },
    }
    if extra:
        payload.update(extra)
    path = Path(args.manifest) if args.manifest else Path(outputs[0]).with_suffix(".manifest.json")
    path.write_text(_dump(payload))
    return path


# ---------------------------------------------------------------- arguments


def _floats(text: str) -> list:
    return [float(t) for t in text.split(",") if t.strip()]


def _add_common(p, workers: bool = False):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest", default=None, help="manifest path (default: next to the output)")
    if workers:
        p.add_argument("--workers", type=int, default=1)


def _add_generator(p):
    p.add_argument("--kind", dest="gen_kind", required=True,
                   choices=["annulus", "double_annulus", "uniform_disc", "linked_twist"])
    _add_generator_params(p)


def _add_generator_params(p):
    p.add_argument("--class", dest="cls", choices=sorted(ANNULUS_CLASSES), default=None,
                   help="annulus class preset (A, B or C)")
    p.add_argument("--annuli", default=None, help="'cx,cy,r_in,r_out;...' overriding the class preset")
    p.add_argument("--n", type=int, default=200, help="points per cloud")
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise standard deviation")
    p.add_argument("--radius", type=float, default=1.0, help="uniform disc radius")
    p.add_argument("--r", type=float, default=4.0, help="linked twist parameter")
    p.add_argument("--x0", default=None, help="linked twist initial point 'x,y' (default: random)")


def spec_from_args(args) -> GeneratorSpec:
    kind = args.gen_kind
    params: dict = {}
    if kind in ("annulus", "double_annulus"):
        if args.annuli:
            params["annuli"] = tuple(tuple(_floats(a)) for a in args.annuli.split(";") if a.strip())
        else:
            cls = args.cls or ("B" if kind == "double_annulus" else "A")
            params["annuli"] = ANNULUS_CLASSES[cls]
    elif kind == "uniform_disc":
        params["radius"] = args.radius
    else:
        params["r"] = args.r
        if args.x0:
            params["x0"] = tuple(_floats(args.x0))
    return GeneratorSpec(kind, args.n, args.noise, params)


def _add_F(p):
    p.add_argument("--F", dest="F", choices=["constant", "persistence", "model"], default="persistence")
    p.add_argument("--c", type=float, default=1.0, help="value of the constant F")
    p.add_argument("--model", default=None, help="model JSON from 'train' (for --F model)")
    p.add_argument("--absolute", action="store_true", help="use coefficient magnitudes")
    p.add_argument("--selector", choices=SELECTORS, default="rep_cycle")
    p.add_argument("--degree", type=int, default=1)


def make_F(args):
    if args.F == "constant":
        return ConstantF(args.c)
    if args.F == "persistence":
        return PersistenceF()
    if not args.model:
        raise SystemExit("--F model needs --model")
    model = LinearModel.from_json(Path(args.model).read_text())
    if "featurizer" not in model.meta:
        raise SystemExit("model file carries no featurizer description")
    return ModelF(model, featurizer_from_dict(model.meta["featurizer"]), args.absolute)


def _grid(values) -> RasterGrid:
    lo, hi, g = values
    return RasterGrid(float(lo), float(hi), int(g))


def _load_diagram(path) -> AnnotatedDiagram:
    return AnnotatedDiagram.from_json(Path(path).read_text())


# ---------------------------------------------------------------- commands


def cmd_gen(args):
    spec = spec_from_args(args)
    pts = generate(spec, np.random.default_rng(args.seed))
    write_points(args.output, pts)
    write_manifest(args, [args.output], {"generator": spec.to_dict()})


def cmd_filtration(args):
    pts = read_points(args.input, shuffle=args.shuffle, seed=args.seed)
    K, w, _ = filtration(pts, args.kind, args.max_dim, args.threshold)
    write_filtration(args.output, K, w)
    write_manifest(args, [args.output], {"n_simplices": K.k})


def cmd_persistence(args):
    K, w = read_filtration(args.input)
    dg = persistence_diagram(K, w)
    if args.drop_zero:
        dg = drop_zero_persistence(dg)
    Path(args.output).write_text(dg.to_json() + "\n")
    write_manifest(args, [args.output], {"n_points": len(dg)})


def _featurizer(args, diagrams):
    if args.kind == "death-vector":
        return DeathVectorFeaturizer(args.length)
    if args.t_max is not None:
        grid = LandscapeGrid(args.t_min, args.t_max, args.n_t, args.levels)
    else:
        g = default_grid(diagrams, args.degree, args.n_t, args.levels)
        grid = LandscapeGrid(args.t_min, g.t_max, args.n_t, args.levels)
    return LandscapeFeaturizer(args.degree, grid)


def cmd_features(args):
    if args.input:
        diagrams = [_load_diagram(p) for p in args.input]
        names = [str(p) for p in args.input]
    elif args.gen_kind:
        spec = spec_from_args(args)
        diagrams = sample_diagrams(spec, args.n_clouds, args.seed, args.filtration, args.workers)
        names = [f"cloud{j}" for j in range(len(diagrams))]
    else:
        raise SystemExit("give diagram files (-i) or a generator (--gen-kind)")
    if args.featurizer:
        d = json.loads(Path(args.featurizer).read_text())
        fz = featurizer_from_dict(d.get("featurizer", d))
    else:
        fz = _featurizer(args, diagrams)
    X = np.array([fz(dg).flat() for dg in diagrams])
    if args.average:
        X = np.array([[math.fsum(c) / len(X) for c in X.T]])
        names = ["mean"]
    with open(args.output, "w") as fh:
        fh.write("# featurizer: " + json.dumps(fz.to_dict(), sort_keys=True) + "\n")
        fh.write("name," + ",".join(f"f{i}" for i in range(X.shape[1])) + "\n")
        for name, row in zip(names, X):
            fh.write(name + "," + ",".join(repr(float(v)) for v in row) + "\n")
    write_manifest(args, [args.output], {"featurizer": fz.to_dict(), "shape": list(X.shape)})


def read_features(path) -> tuple:
    """``(X, names, featurizer_dict)`` from a features CSV."""
    fz = None
    names, rows = [], []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# featurizer: "):
                fz = json.loads(line[len("# featurizer: "):])
            elif line.startswith("#") or not line or line.startswith("name,"):
                continue
            else:
                parts = line.split(",")
                names.append(parts[0])
                rows.append([float(v) for v in parts[1:]])
    return np.array(rows, dtype=np.float64), names, fz


def _read_labels(paths) -> np.ndarray:
    vals = []
    for p in paths:
        for line in Path(p).read_text().split():
            vals.extend(_floats(line))
    return np.array(vals, dtype=np.float64)


def cmd_train(args):
    Xs, fzs = [], []
    for p in args.features:
        X, _, fz = read_features(p)
        Xs.append(X)
        fzs.append(fz)
    if any(f != fzs[0] for f in fzs):
        raise SystemExit("feature files were produced by different featurizers")
    X = np.vstack(Xs)
    y = _read_labels(args.labels)
    if args.kind == "svm":
        model = train_svm(X, y, args.lam, args.epochs, args.seed, args.scaling)
    else:
        model = train_svr(X, y, args.lam, args.eps_tube, args.epochs, args.seed, args.scaling)
    if fzs[0] is not None:
        model.meta["featurizer"] = fzs[0]
    Path(args.output).write_text(model.to_json() + "\n")
    write_manifest(args, [args.output], {"final_objective": model.meta["objective_history"][-1]})


def cmd_heatmap(args):
    dg = _load_diagram(args.input)
    hw = heatmap(dg, args.degree, make_F(args), args.selector, include_essential=args.include_essential)
    payload = {"weights": [float(v) for v in hw.w], "degree": args.degree, "selector": args.selector}
    Path(args.output).write_text(_dump(payload))
    write_manifest(args, [args.output])


def cmd_expected_heatmap(args):
    K, w = read_filtration(args.input)
    spec = KernelSpec(args.kernel, args.alpha, K.k)
    eh = expected_heatmap(w, K, make_F(args), args.selector, spec, args.n_samples, args.seed,
                          args.degree, args.workers)
    Path(args.output).write_text(eh.to_json() + "\n")
    write_manifest(args, [args.output])


def _write_ephm(eh, grid, out: Path, style: str) -> list:
    json_path = out.with_suffix(".json")
    json_path.write_text(eh.to_json() + "\n")
    img, csv_path = write_raster(eh.mean, grid, out, style)
    return [json_path, img, csv_path]


def cmd_experiment_ephm(args):
    spec = spec_from_args(args)
    grid = _grid(args.grid)
    eh = experiment_expected_phm(spec, args.n_clouds, make_F(args), args.selector, grid, args.seed,
                                 args.degree, args.filtration, args.workers)
    outputs = _write_ephm(eh, grid, Path(args.output), args.style)
    write_manifest(args, outputs, {"generator": spec.to_dict(), "mass": eh.meta["mass"],
                                   "raster_sum": float(math.fsum(eh.mean))})


def cmd_raster(args):
    K, _ = read_filtration(args.complex)
    pts = read_points(args.points)
    realization = GeometricRealization(tuple(range(len(pts))), pts)
    weights = np.array(json.loads(Path(args.input).read_text())["weights"], dtype=np.float64)
    if args.grid:
        grid = _grid(args.grid)
    else:
        lo = float(np.min(pts)) - 1e-9
        hi = float(np.max(pts)) + 1e-9
        grid = RasterGrid(lo, hi, args.g)
    heat = rasterize(weights, K, realization, grid)
    img, csv_path = write_raster(heat, grid, args.output, args.style)
    write_manifest(args, [img, csv_path], {"grid": [grid.lo, grid.hi, grid.g],
                                            "heat_sum": float(math.fsum(heat)),
                                            "weight_sum": float(math.fsum(weights))})


def cmd_stability_probe(args):
    K, w = read_filtration(args.input)
    free = [int(i) for i in args.free.split(",")] if args.free else list(range(K.k))
    outs = [int(i) for i in args.outputs.split(",")] if args.outputs else free
    spec = KernelSpec(args.kernel, args.alpha, len(free))
    base = np.array(w, dtype=np.float64)
    sliced = SlicedMap(HeatmapMap(K, make_F(args), args.selector, args.degree), base, tuple(free), tuple(outs))
    x0 = base[free]
    pairs = probe_pairs(x0, spec, args.pairs, args.seed)
    res = lipschitz_probe(sliced, spec, pairs, args.mode, args.nodes, args.n_samples, args.seed)
    payload = res.to_dict()
    payload.update({"ok": res.ok, "kernel": spec.to_dict(), "free": free, "outputs": outs})
    Path(args.output).write_text(_dump(payload))
    write_manifest(args, [args.output])


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="persheat", allow_abbrev=False,
                                 description="Persistence heatmaps from representative chains.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, allow_abbrev=False)
        p.set_defaults(func=func)
        return p

    p = add("gen", cmd_gen, "sample a synthetic point cloud")
    _add_generator(p)
    p.add_argument("-o", "--output", required=True)
    _add_common(p)

    p = add("filtration", cmd_filtration, "alpha or Rips filtration of a point cloud")
    p.add_argument("kind", choices=["alpha", "rips"])
    p.add_argument("-i", "--input", required=True, help="point cloud CSV")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--max-dim", type=int, default=2)
    p.add_argument("--threshold", type=float, default=math.inf, help="Rips distance cut-off")
    p.add_argument("--shuffle", action="store_true", help="permute input rows with the seed")
    _add_common(p)

    p = add("persistence", cmd_persistence, "annotated persistence diagram of a filtration")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--drop-zero", action="store_true", help="drop zero-persistence points")
    _add_common(p)

    p = add("features", cmd_features, "structured feature vectors as CSV")
    p.add_argument("kind", choices=["landscape", "death-vector"])
    p.add_argument("-i", "--input", nargs="*", default=None, help="diagram JSON files")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--n-t", type=int, default=100)
    p.add_argument("--levels", type=int, default=10)
    p.add_argument("--length", type=int, default=100, help="death vector length")
    p.add_argument("--featurizer", default=None, help="featurizer JSON, or the manifest of an earlier features run")
    p.add_argument("--average", action="store_true", help="emit the mean feature vector only")
    p.add_argument("--gen-kind", dest="gen_kind", default=None,
                   choices=["annulus", "double_annulus", "uniform_disc", "linked_twist"],
                   help="sample clouds instead of reading diagrams")
    p.add_argument("--n-clouds", type=int, default=10)
    p.add_argument("--filtration", choices=["alpha", "rips"], default="alpha")
    _add_generator_params(p)
    _add_common(p, workers=True)

    p = add("train", cmd_train, "train a linear SVM or SVR")
    p.add_argument("kind", choices=["svm", "svr"])
    p.add_argument("--features", nargs="+", required=True, help="features CSV files (rows are stacked)")
    p.add_argument("--labels", nargs="+", required=True, help="label files, whitespace or comma separated")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--lam", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--eps-tube", type=float, default=0.01)
    p.add_argument("--scaling", choices=SCALINGS, default="global")
    _add_common(p)

    p = add("heatmap", cmd_heatmap, "persistence heatmap of a diagram")
    p.add_argument("-i", "--input", required=True, help="diagram JSON")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--include-essential", action="store_true")
    _add_F(p)
    _add_common(p)

    p = add("expected-heatmap", cmd_expected_heatmap, "kernel-smoothed heatmap by Monte Carlo")
    p.add_argument("-i", "--input", required=True, help="filtration file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--kernel", choices=["triangular", "epanechnikov", "gaussian"], default="triangular")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--n-samples", type=int, default=100)
    _add_F(p)
    _add_common(p, workers=True)

    p = add("experiment-ephm", cmd_experiment_ephm, "mean raster over freshly sampled clouds")
    _add_generator(p)
    p.add_argument("-o", "--output", required=True, help="image path (.ppm/.pgm); JSON and CSV alongside")
    p.add_argument("--n-clouds", type=int, default=100)
    p.add_argument("--grid", nargs=3, required=True, metavar=("LO", "HI", "G"))
    p.add_argument("--filtration", choices=["alpha", "rips"], default="alpha")
    p.add_argument("--style", choices=["diverging", "grayscale"], default="diverging")
    _add_F(p)
    _add_common(p, workers=True)

    p = add("raster", cmd_raster, "rasterize heatmap weights over a planar complex")
    p.add_argument("-i", "--input", required=True, help="heatmap JSON")
    p.add_argument("--complex", required=True, help="filtration file")
    p.add_argument("--points", required=True, help="point cloud CSV giving vertex positions")
    p.add_argument("-o", "--output", required=True, help="image path; a CSV is written alongside")
    p.add_argument("--grid", nargs=3, default=None, metavar=("LO", "HI", "G"))
    p.add_argument("--g", type=int, default=20, help="cells per side when --grid is not given")
    p.add_argument("--style", choices=["diverging", "grayscale"], default="diverging")
    _add_common(p)

    p = add("stability-probe", cmd_stability_probe, "empirical Lipschitz ratio of the smoothed heatmap")
    p.add_argument("-i", "--input", required=True, help="filtration file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--kernel", choices=["triangular", "epanechnikov", "gaussian"], default="triangular")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--free", default=None, help="comma separated simplex indices that vary (default all)")
    p.add_argument("--outputs", default=None, help="heatmap components to compare (default: --free)")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--mode", choices=["quadrature", "monte_carlo"], default="quadrature")
    p.add_argument("--nodes", type=int, default=61, help="quadrature nodes per axis")
    p.add_argument("--n-samples", type=int, default=100, help="Monte-Carlo samples per evaluation")
    _add_F(p)
    _add_common(p)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
