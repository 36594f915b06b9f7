import numpy as np
import pytest

from persheat.features import (
    DeathVectorFeaturizer,
    LandscapeFeaturizer,
    LandscapeGrid,
    OrderedPoint,
    death_vector,
    default_grid,
    featurizer_from_dict,
    landscape,
    order_diagram,
)
from persheat.persistence import persistence_diagram

from conftest import random_filtration


def _brute_landscape(pairs, ts, levels):
    """Per-t sort of tent values, written without the library."""
    out = np.zeros((levels, len(ts)))
    for j, t in enumerate(ts):
        vals = sorted((max(0.0, min(t - b, d - t)) for b, d in pairs), reverse=True)
        for k, v in enumerate(vals[:levels]):
            out[k, j] = v
    return out


def test_landscape_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(0, 8))
        b = rng.uniform(0, 5, n)
        d = b + rng.uniform(0, 3, n)
        od = sorted((OrderedPoint(float(x), float(y), i) for i, (x, y) in enumerate(zip(b, d))),
                    key=lambda p: -p.persistence)
        grid = LandscapeGrid(0.0, 8.0, 57, 4)
        sv = landscape(od, grid)
        want = _brute_landscape(list(zip(b, d)), grid.ts, 4)
        np.testing.assert_allclose(sv.values, want, atol=1e-12)
        # components partition the landscape and each is owned by one point
        total = sum(sv.component(i) for i in range(len(od))) if od else np.zeros_like(sv.values)
        np.testing.assert_allclose(total, sv.values, atol=0)
        assert np.all((sv.attribution >= 0) == (sv.values > 0))


def test_landscape_single_tent():
    od = [OrderedPoint(0.0, 2.0, 0)]
    sv = landscape(od, LandscapeGrid(0.0, 2.0, 5, 2))
    np.testing.assert_allclose(sv.values[0], [0, 0.5, 1.0, 0.5, 0])
    assert not sv.values[1].any()
    assert list(sv.attribution[0]) == [-1, 0, 0, 0, -1]


def test_order_diagram_and_attribution_on_worked_example(worked):
    K, w = worked
    dg = persistence_diagram(K, w)
    od = order_diagram(dg, 1)
    assert [(p.birth, p.death) for p in od] == [(7, 10), (8, 9)]
    assert all(dg.points[p.source].degree == 1 for p in od)


def test_death_vector(worked):
    K, w = worked
    dg = persistence_diagram(K, w)
    sv = death_vector(dg, 5)
    # essential class counts at the largest weight
    np.testing.assert_array_equal(sv.values, [10, 6, 5, 3, 0])
    assert list(sv.attribution) == [0, 1, 2, 3, -1]
    assert len(death_vector(dg, 2)) == 2


def test_featurizer_dict_round_trip():
    f = LandscapeFeaturizer(1, LandscapeGrid(0.0, 1.5, 20, 3))
    assert featurizer_from_dict(f.to_dict()) == f
    g = DeathVectorFeaturizer(7)
    assert featurizer_from_dict(g.to_dict()) == g
    with pytest.raises(ValueError):
        LandscapeGrid(1.0, 1.0)


def test_default_grid_ignores_flat_points():
    rng = np.random.default_rng(2)
    dgs = [persistence_diagram(*random_filtration(rng)) for _ in range(20)]
    g = default_grid(dgs, 0)
    deaths = [p.death for dg in dgs for p in dg if p.degree == 0 and not p.essential and p.death > p.birth]
    assert g.t_max == max(deaths)
