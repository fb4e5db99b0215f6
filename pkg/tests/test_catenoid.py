"""Unit tests for n-catenoid profiles and the plane barriers built from them."""
import numpy as np
import pytest
from scipy.integrate import quad

from soliton_lab.errors import ArgumentError
from soliton_lab.services.catenoid import (
    catenoid_barriers,
    catenoid_height,
    catenoid_limit,
    catenoid_slope,
    catenoid_static_residual,
    neck_radius,
)


def test_neck_radius():
    assert neck_radius(3, 25.0) == pytest.approx(5.0, rel=1e-15)
    assert neck_radius(4, 8.0) == pytest.approx(2.0, rel=1e-15)


@pytest.mark.parametrize("n,c", [(3, 25.0), (4, 8.0), (5, 1.0)])
def test_static_residual(n, c):
    r0 = neck_radius(n, c)
    r = r0 * np.concatenate(([1.0 + 1e-6, 1.0 + 1e-3], np.linspace(1.01, 10.0, 500)))

    assert np.max(np.abs(catenoid_static_residual(n, c, r))) <= 1e-8


def test_height_starts_at_the_neck_and_increases():
    r0 = neck_radius(3, 25.0)
    r = r0 * np.linspace(1.0, 20.0, 400)

    f = catenoid_height(3, 25.0, r)

    assert f[0] == 0.0
    assert np.all(np.diff(f) > 0)


def test_height_matches_adaptive_quadrature():
    n, c = 3, 25.0
    r0 = neck_radius(n, c)

    # r = r0 + s^2 keeps the integrand finite at the neck
    expected, _ = quad(lambda s: 2.0 * s * float(catenoid_slope(n, c, r0 + s * s)), 0.0, np.sqrt(r0),
                       limit=200, epsabs=1e-13)

    assert float(catenoid_height(n, c, [2.0 * r0])[0]) == pytest.approx(expected, abs=1e-8)


def test_height_converges_to_its_limit():
    n, c = 4, 8.0
    r0 = neck_radius(n, c)
    limit = catenoid_limit(n, c)

    far = float(catenoid_height(n, c, [1000.0 * r0])[0])

    assert far < limit
    assert limit - far < 1e-4
    assert catenoid_limit(n, c, r_ref=3.0 * r0) == pytest.approx(limit, abs=1e-9)


def test_barriers():
    n, c, eps = 3, 25.0, 0.05
    r0 = neck_radius(n, c)
    r = r0 * np.linspace(1.0, 200.0, 300)

    upper, lower = catenoid_barriers(n, c, eps, r)

    np.testing.assert_array_equal(lower, -upper)
    assert np.all(upper >= eps)
    assert np.all(np.diff(upper) < 0)
    assert upper[-1] - eps < 0.05


def test_plane_dimension_is_refused():
    with pytest.raises(ArgumentError):
        neck_radius(2, 1.0)
    with pytest.raises(ArgumentError):
        catenoid_barriers(3, -1.0, 0.05, [10.0])
    with pytest.raises(ArgumentError):
        catenoid_slope(3, 25.0, [4.0])
