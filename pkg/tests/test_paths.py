import math

import numpy as np
import pytest

from roughsew.grid import DyadicGrid, Grid2Fn, delta2, norm_c1_holder, norm_c3
from roughsew.paths import (
    Coboundary,
    Custom,
    LogGerm,
    MidpointDisplacement,
    PowerGerm,
    PowerPath,
    SmoothPoly,
    Weierstrass,
    YoungProduct,
    generate_germ,
    generate_path,
)


def test_power_path():
    g = DyadicGrid(1.0, 2)
    assert generate_path(PowerPath(0.5), g).values[1] == 0.5


def test_midpoint_displacement_is_deterministic_and_nested():
    g = DyadicGrid(1.0, 8)
    a = MidpointDisplacement(0.45, seed=7).sample(g)
    b = MidpointDisplacement(0.45, seed=7).sample(g)
    assert np.array_equal(a.values, b.values)
    assert a.values[0] == 0
    coarse = MidpointDisplacement(0.45, seed=7).sample(g.at_level(5))
    assert np.array_equal(a.restrict(g.at_level(5)).values, coarse.values)
    other = MidpointDisplacement(0.45, seed=7).component(1).sample(g)
    assert not np.array_equal(a.values, other.values)


def test_midpoint_displacement_frozen_values():
    # first four standard normals drawn from random.Random(7)
    z = [0.45700767402282655, 1.0327981966610056, -0.38784457831235297, 1.4578838047954215]
    end = z[0]
    mid = end / 2 + 0.5 ** 0.5 * 0.5 ** 0.5 * z[1]
    quarter = 0.25 ** 0.5 * 0.5 ** 0.5
    expected = [0.0, mid / 2 + quarter * z[2], mid, (mid + end) / 2 + quarter * z[3], end]
    x = MidpointDisplacement(0.5, seed=7).sample(DyadicGrid(1.0, 2)).values
    np.testing.assert_allclose(x, expected, rtol=0, atol=1e-15)


@pytest.mark.parametrize(
    "spec, alpha",
    [
        (MidpointDisplacement(0.45, 3), 0.45),
        (MidpointDisplacement(0.7, 4), 0.7),
        (Weierstrass(0.5, 3), math.log(2) / math.log(3)),
        (PowerPath(0.6), 0.6),
        (SmoothPoly((0.0, 1.0, -2.0, 0.5)), 1.0),
    ],
)
def test_holder_norm_stable_across_levels(spec, alpha):
    g = DyadicGrid(1.0, 8)
    n1 = norm_c1_holder(generate_path(spec, g), alpha)
    n2 = norm_c1_holder(generate_path(spec, g.refine(2)), alpha)
    assert math.isfinite(n1) and n1 > 0
    assert n2 <= 2 * n1 and n1 <= 2 * n2


def test_weierstrass_declared_exponent():
    spec = Weierstrass(0.5, 3, alpha=0.63)
    path = generate_path(spec, DyadicGrid(1.0, 10))
    assert spec.exponent == pytest.approx(0.6309, abs=1e-4)
    assert math.isfinite(norm_c1_holder(path, 0.63))
    with pytest.raises(ValueError):
        Weierstrass(0.3, 3, alpha=0.5)
    with pytest.raises(ValueError):
        Weierstrass(0.5, 3, alpha=0.9)


def test_weierstrass_exact_phase_matches_float_at_low_frequency():
    g = DyadicGrid(1.0, 6)
    exact = Weierstrass(0.5, 3).sample(g).values
    t = g.points
    naive = sum(0.5 ** n * np.sin(3.0 ** n * np.pi * t) for n in range(12))
    assert np.abs(exact - naive).max() < 1e-3


def test_log_germ():
    g = DyadicGrid(1.0, 1)
    A = generate_germ(LogGerm(), g)
    assert A.at(0, 1) == pytest.approx(-0.5 * math.log(2), abs=1e-16)
    assert np.all(np.diagonal(A.values) == 0)
    for M in range(2, 9):
        B = delta2(LogGerm().on(DyadicGrid(1.0, M)))
        assert norm_c3(B, 1.0, ordered=True) <= math.log(2) * (1 + 1e-12)


def test_coboundary_germ_is_exact():
    g = DyadicGrid(1.0, 5)
    A = Coboundary(MidpointDisplacement(0.5, 1)).on(g)
    assert norm_c3(delta2(A), 1.0) < 1e-13


def test_young_product_coherence():
    g = DyadicGrid(1.0, 4)
    x = PowerPath(0.6)
    A = YoungProduct(x, x).on(g)
    X = x.sample(g).values
    idx = np.arange(g.size)
    s, u, t = np.meshgrid(idx, idx, idx, indexing="ij")
    expected = -(X[u] - X[s]) * (X[t] - X[u])
    np.testing.assert_allclose(delta2(A)(s, u, t), expected, atol=1e-15)


def test_mixtures_and_custom():
    g = DyadicGrid(1.0, 3)
    mix = PowerGerm(2.0) * 3.0 + LogGerm()
    expected = 3.0 * PowerGerm(2.0).on(g).values + LogGerm().on(g).values
    np.testing.assert_allclose(mix.on(g).values, expected)
    custom = Custom(lambda s, t: t - s)
    np.testing.assert_allclose(custom.on(g).values, g.points[None, :] - g.points[:, None])
    table = Custom(Grid2Fn(g.refine(), PowerGerm(1.0).on(g.refine()).values))
    np.testing.assert_allclose(table.on(g).values, PowerGerm(1.0).on(g).values)
    with pytest.raises(ValueError):
        PowerGerm(0.0)


def test_sampled_path_cannot_be_refined():
    coarse = MidpointDisplacement(0.5, 0).sample(DyadicGrid(1.0, 3))
    with pytest.raises(ValueError):
        Coboundary(coarse).on(DyadicGrid(1.0, 4))
