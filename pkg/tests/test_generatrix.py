import io
import math

import numpy as np
import pytest

from errors import BadParams, OutOfDomain, TurningPointInside
from generatrix import (
    arclength,
    graph_z_of_x,
    reconstruct,
    resample,
    restrict,
    write_curve_csv,
)
from momentum import MomentumFn, catalog_named
from numerics import Interval


def test_plane_is_a_straight_ray():
    c = reconstruct(catalog_named("plane"), 1.0, s_span=2.0, n_samples=11)
    assert c.exit_reason is None
    assert np.allclose(c.x, 1.0 + c.s, atol=1e-12)
    assert np.allclose(c.z, 0.0, atol=1e-12)
    assert c.length == pytest.approx(2.0)


def test_sphere_from_equator():
    c = reconstruct(catalog_named("sphere:R=1"), 1.0, s_span=1.5)
    assert c.exit_reason is None
    assert c.turning_points == (0.0,)
    assert np.max(np.abs(c.x - np.cos(c.s))) < 1e-8
    assert np.max(np.abs(c.z - np.sin(c.s))) < 1e-8


def test_sphere_truncated_at_axis():
    c = reconstruct(catalog_named("sphere:R=1"), 1.0, s_span=3.0)
    assert "axis" in c.exit_reason
    assert c.length == pytest.approx(math.pi / 2, abs=1e-8)
    assert c.x[-1] == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("branch", [1, -1])
def test_catenary_both_branches(branch):
    c = reconstruct(catalog_named("catenoid:a=1"), 1.0, branch=branch, s_span=2.0)
    assert c.span == ((0.0, 2.0) if branch == 1 else (-2.0, 0.0))
    assert np.max(np.abs(c.x - np.sqrt(1.0 + c.s**2))) < 1e-8
    assert np.max(np.abs(c.z - np.arcsinh(c.s))) < 1e-8


def test_sine_of_angle_is_momentum():
    m = catalog_named("elasticoid:a=1,k=0.5")
    c = reconstruct(m, math.sqrt(0.5), s_span=10.0, n_samples=4001)
    assert np.max(np.abs(np.sin(c.theta) - m(c.x))) <= 1e-8


def test_start_height_is_a_translation():
    m = catalog_named("ellipsoid:a=2,b=1")
    c0 = reconstruct(m, 1.0, z0=0.0, s_span=1.0)
    c1 = reconstruct(m, 1.0, z0=3.5, s_span=1.0)
    assert np.array_equal(c0.x, c1.x)
    assert np.array_equal(c0.theta, c1.theta)
    assert np.allclose(c1.z - c0.z, 3.5, atol=1e-12)


def test_resample_is_idempotent():
    c = reconstruct(catalog_named("torus:a=2,R=1"), 2.0, s_span=1.0, n_samples=101)
    again = resample(c, len(c))
    assert np.array_equal(again.s, c.s)
    assert np.array_equal(again.x, c.x)
    assert np.array_equal(again.z, c.z)


def test_restrict():
    c = reconstruct(catalog_named("torus:a=2,R=1"), 2.0, s_span=1.0, n_samples=101)
    sub = restrict(c, 0.2, 0.8)
    assert sub.s[0] == 0.2 and sub.s[-1] == 0.8
    assert len(sub) == 101
    with pytest.raises(BadParams):
        restrict(c, 0.5, 1.5)


def test_antiparaboloid_profile():
    c = reconstruct(catalog_named("antiparaboloid:c=1"), 1.0, s_span=3.0)
    assert np.max(np.abs(c.z**2 - 4.0 * (c.x - 1.0))) < 1e-7


def test_tractrix_branch():
    def F(x):
        r = math.sqrt(1.0 - x * x)
        return r - math.log((1.0 + r) / x)

    c = reconstruct(catalog_named("pseudosphere:a=1"), 0.5, branch=-1, s_span=2.0)
    assert c.exit_reason is None
    err = max(abs(z + F(x) - F(0.5)) for x, z in zip(c.x, c.z))
    assert err < 1e-7


def test_reconstruct_rejects_bad_input():
    m = catalog_named("sphere:R=1")
    with pytest.raises(OutOfDomain):
        reconstruct(m, 1.5)
    with pytest.raises(BadParams):
        reconstruct(m, 0.5, branch=0)
    with pytest.raises(BadParams):
        reconstruct(m, 0.5, s_span=-1.0)


def test_graph_of_sphere_cap():
    g = graph_z_of_x(catalog_named("sphere:R=1"), 0.0, 0.6, n=13)
    assert g.shape == (13, 2)
    assert np.max(np.abs(g[:, 1] - (1.0 - np.sqrt(1.0 - g[:, 0] ** 2)))) < 1e-9
    down = graph_z_of_x(catalog_named("sphere:R=1"), 0.0, 0.6, sign=-1, n=13)
    assert np.allclose(down[:, 1], -g[:, 1])


def test_arclength_of_quarter_circle():
    assert arclength(catalog_named("sphere:R=1"), 0.0, 1.0) == pytest.approx(math.pi / 2, abs=1e-8)


def test_quadrature_refuses_turning_points():
    m = MomentumFn(lambda x: 1.5 * np.sin(x), lambda x: 1.5 * np.cos(x), Interval(0.0, 10.0))
    with pytest.raises(TurningPointInside):
        graph_z_of_x(m, 1.0, 2.0)
    with pytest.raises(OutOfDomain):
        arclength(catalog_named("sphere:R=1"), 0.5, 1.5)


def test_curve_csv():
    c = reconstruct(catalog_named("sphere:R=1"), 0.5, s_span=0.5, n_samples=5)
    buf = io.StringIO()
    write_curve_csv(c, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "s,x,z,theta"
    assert len(lines) == 6
