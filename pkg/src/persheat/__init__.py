"""Persistence heatmaps: per-simplex weights from representative chains."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .complex import (
    Simplex,
    SimplicialComplex,
    build_complex,
    filtration_order,
    monotone_repair,
    validate_monotone,
)
from .features import LandscapeFeaturizer, LandscapeGrid, DeathVectorFeaturizer, landscape, order_diagram
from .heatmap import ChainSelector, ConstantF, PersistenceF, heatmap
from .kernels import KernelSpec, expected_heatmap, expected_theta, kernel_density, lipschitz_probe
from .learn import LinearModel, model_to_F, train_svm, train_svr
from .persistence import AnnotatedDiagram, persistence_diagram
from .raster import RasterGrid, pi_simplex, rasterize, theta

__all__ = [
    "BACKEND",
    "Simplex",
    "SimplicialComplex",
    "build_complex",
    "filtration_order",
    "monotone_repair",
    "validate_monotone",
    "LandscapeFeaturizer",
    "LandscapeGrid",
    "DeathVectorFeaturizer",
    "landscape",
    "order_diagram",
    "ChainSelector",
    "ConstantF",
    "PersistenceF",
    "heatmap",
    "KernelSpec",
    "expected_heatmap",
    "expected_theta",
    "kernel_density",
    "lipschitz_probe",
    "LinearModel",
    "model_to_F",
    "train_svm",
    "train_svr",
    "AnnotatedDiagram",
    "persistence_diagram",
    "RasterGrid",
    "pi_simplex",
    "rasterize",
    "theta",
]
