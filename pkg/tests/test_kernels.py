import math

import numpy as np
import pytest
from scipy import integrate, stats

from persheat.complex import build_complex
from persheat.geometry import GeometricRealization
from persheat.heatmap import ConstantF, PersistenceF, heatmap
from persheat.kernels import (
    FAMILIES,
    ExpectedHeatmap,
    HeatmapMap,
    KernelSpec,
    LatticeConvolution,
    SlicedMap,
    component_lipschitz,
    expected_heatmap,
    expected_theta,
    kernel_density,
    lipschitz_probe,
    probe_pairs,
    quadrature_nodes,
    convolve_quadrature,
    sample_perturbation,
    substream,
    summarize,
    theoretical_bound,
)
from persheat.persistence import persistence_diagram
from persheat.raster import RasterGrid

EDGE = build_complex([["a"], ["b"], ["a", "b"]])


def test_triangular_peak_value():
    assert kernel_density(KernelSpec("triangular", 1.0, 2), [0.0, 0.0]) == pytest.approx(3 / math.pi)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("dim", [1, 2, 3])
def test_density_integrates_to_one(family, dim):
    spec = KernelSpec(family, 0.7, dim)
    surface = dim * math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)

    def radial(r):
        e = np.zeros(dim)
        e[0] = r
        return surface * r ** (dim - 1) * kernel_density(spec, e)

    total, _ = integrate.quad(radial, 0, spec.alpha * (12 if family == "gaussian" else 1), limit=200)
    assert total == pytest.approx(1.0, abs=1e-3)


def test_midpoint_grid_mass_in_two_dims():
    for family in FAMILIES:
        spec = KernelSpec(family, 0.5, 2)
        R, n = spec.support, 400
        h = 2 * R / n
        ax = -R + h * (np.arange(n) + 0.5)
        X, Y = np.meshgrid(ax, ax)
        mass = kernel_density(spec, np.stack([X, Y], -1)).sum() * h * h
        assert mass == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("dim", [1, 2, 3])
def test_radius_distribution_chi_square(family, dim):
    spec = KernelSpec(family, 1.3, dim)
    surface = dim * math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)

    def radial(r):
        e = np.zeros(dim)
        e[0] = r
        return surface * r ** (dim - 1) * kernel_density(spec, e)

    top = spec.alpha if spec.compact else 6 * spec.alpha
    edges = np.linspace(0, top, 21)
    p = np.array([integrate.quad(radial, a, b)[0] for a, b in zip(edges[:-1], edges[1:])])
    p /= p.sum()
    eps = sample_perturbation(spec, np.random.default_rng(7), 100_000)
    r = np.linalg.norm(eps, axis=1)
    obs, _ = np.histogram(np.minimum(r, top * (1 - 1e-12)), edges)
    keep = p * len(r) >= 5
    chi2 = np.sum((obs[keep] - len(r) * p[keep]) ** 2 / (len(r) * p[keep]))
    assert stats.chi2.sf(chi2, keep.sum() - 1) > 1e-3
    # directions are isotropic: the mean direction is near zero
    u = eps / r[:, None]
    assert np.all(np.abs(u.mean(axis=0)) < 0.02)


@pytest.mark.parametrize("family", FAMILIES)
def test_density_slopes_respect_lipschitz_constant(family):
    spec = KernelSpec(family, 0.8, 2)
    L = component_lipschitz(spec)
    rng = np.random.default_rng(0)
    for _ in range(2000):
        x = rng.uniform(-1, 1, 2)
        y = x + rng.normal(scale=1e-3, size=2)
        slope = abs(kernel_density(spec, x) - kernel_density(spec, y)) / np.linalg.norm(x - y)
        assert slope <= L * (1 + 1e-6)


def test_substreams_are_independent_of_each_other():
    a = substream(3, 0).random(4)
    assert np.array_equal(a, substream(3, 0).random(4))
    assert not np.array_equal(a, substream(3, 1).random(4))
    assert not np.array_equal(a, substream(4, 0).random(4))


def test_summarize():
    m, se = summarize([[1.0, 0.0], [3.0, 0.0]])
    assert list(m) == [2.0, 0.0]
    assert se[0] == pytest.approx(1.0)
    m, se = summarize([[1.0, 2.0]])
    assert list(se) == [0.0, 0.0]


def test_small_alpha_recovers_plain_heatmap(worked):
    K, w = worked
    hw = heatmap(persistence_diagram(K, w), 1, PersistenceF(), "rep_cycle").w
    for family in FAMILIES:
        est = expected_heatmap(w, K, PersistenceF(), "rep_cycle", KernelSpec(family, 1e-6, K.k), n=5, seed=1, degree=1)
        np.testing.assert_allclose(est.mean, hw, atol=1e-5)


def test_single_sample_determinism_and_workers(worked):
    K, w = worked
    spec = KernelSpec("gaussian", 0.8, K.k)
    a = expected_heatmap(w, K, PersistenceF(), "rep_cycle", spec, n=1, seed=9, degree=1)
    b = expected_heatmap(w, K, PersistenceF(), "rep_cycle", spec, n=1, seed=9, degree=1)
    assert np.array_equal(a.mean, b.mean) and not a.stderr.any()
    one = expected_heatmap(w, K, PersistenceF(), "rep_cycle", spec, n=40, seed=2, degree=1, workers=1)
    three = expected_heatmap(w, K, PersistenceF(), "rep_cycle", spec, n=40, seed=2, degree=1, workers=3)
    assert one.mean.tobytes() == three.mean.tobytes()
    assert one.stderr.tobytes() == three.stderr.tobytes()
    back = ExpectedHeatmap.from_json(one.to_json())
    assert np.array_equal(back.mean, one.mean) and back.kernel == spec


def test_gaussian_mean_matches_closed_form():
    # heat on b is P(x_b - e_b > x_a - e_a) with e_b - e_a ~ N(0, 2 alpha^2)
    x = np.array([0.0, 0.1, 0.5])
    alpha = 0.3
    est = expected_heatmap(x, EDGE, ConstantF(1.0), "birth_simplex", KernelSpec("gaussian", alpha, 3),
                           n=4000, seed=3, degree=0)
    pb = stats.norm.cdf(0.1 / (alpha * math.sqrt(2)))
    want = np.array([1 - pb, pb, 0.0])
    assert np.all(np.abs(est.mean - want) <= 3 * est.stderr + 1e-12)
    assert est.mean.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("family", ["triangular", "epanechnikov"])
def test_compact_mean_matches_quadrature(family):
    x = np.array([0.0, 0.1, 0.5])
    spec = KernelSpec(family, 0.3, 3)
    eta = HeatmapMap(EDGE, ConstantF(1.0), "birth_simplex", 0)
    want = convolve_quadrature(eta, x, quadrature_nodes(spec, 41))
    est = expected_heatmap(x, EDGE, ConstantF(1.0), "birth_simplex", spec, n=4000, seed=4, degree=0)
    assert np.all(np.abs(est.mean - want) <= 3 * est.stderr + 2e-3)


def test_batch_matches_pointwise(worked):
    K, w = worked
    rng = np.random.default_rng(1)
    Z = w + rng.normal(scale=2.0, size=(30, K.k))
    for F in (ConstantF(1.0), PersistenceF()):
        eta = HeatmapMap(K, F, "rep_cycle", 1)
        np.testing.assert_array_equal(eta.batch(Z), np.array([HeatmapMap(K, F, "rep_cycle", 1)(z) for z in Z]))


def test_constant_map_has_zero_ratio():
    spec = KernelSpec("triangular", 0.5, 2)
    res = lipschitz_probe(lambda z: np.array([2.0, -1.0]), spec, probe_pairs([0.0, 0.0], spec, 50))
    assert res.max_ratio < 1e-9 and res.M == 2.0
    mc = lipschitz_probe(lambda z: np.array([2.0, -1.0]), spec, probe_pairs([0.0, 0.0], spec, 5),
                         mode="monte_carlo", n=20)
    assert mc.max_ratio < 1e-9


def test_lattice_convolution_of_linear_map_is_exact_inside():
    spec = KernelSpec("epanechnikov", 0.4, 2)
    conv = LatticeConvolution(lambda z: np.array([z[0] + 2 * z[1]]), spec, [-0.5, -0.5], [0.5, 0.5], 41)
    # a symmetric kernel reproduces linear functions up to lattice error
    assert conv([0.1, -0.2])[0] == pytest.approx(-0.3, abs=5e-3)


@pytest.mark.parametrize("family", FAMILIES)
def test_probe_on_edge_slice_stays_below_bound(family):
    x = np.array([0.0, 0.0, 0.5])
    spec = KernelSpec(family, 0.5, 2)
    f = SlicedMap(HeatmapMap(EDGE, ConstantF(1.0), "birth_simplex", 0), x, (1, 2), (0, 1))
    res = lipschitz_probe(f, spec, probe_pairs(x[[1, 2]], spec, 200, seed=0))
    assert res.M == 1.0
    assert res.bound == theoretical_bound(spec, 1.0)
    assert 0 < res.max_ratio <= res.bound


def test_expected_theta_mass_and_small_alpha():
    K = EDGE
    x = np.array([0.0, 1.0, 2.0])
    R = GeometricRealization(("a", "b"), np.array([[0.2, 0.3], [0.7, 0.6]]))
    grid = RasterGrid(0.0, 1.0, 8)
    spec = KernelSpec("triangular", 0.05, K.k + 4)
    # F does not depend on the perturbed weights, so every sample carries mass 1
    est = expected_theta(x, R, K, ConstantF(1.0), "death_simplex", grid, spec, n=50, seed=0, degree=0)
    assert est.mean.sum() == pytest.approx(1.0, abs=1e-12)
    from persheat.raster import theta
    tiny = expected_theta(x, R, K, PersistenceF(), "death_simplex", grid, KernelSpec("gaussian", 1e-9, 7),
                          n=3, seed=0, degree=0)
    np.testing.assert_allclose(tiny.mean, theta(x, R, K, PersistenceF(), "death_simplex", grid, 0), atol=1e-6)
