import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvature import wdiagram
from errors import BadParams, EmptyDomain, GenericNotPointwise, NeedsNonzeroA
from momentum import ELLIPSOID, SPHERE, TORUS, catalog, catalog_named
from numerics import Interval
from weingarten import (
    Cubic,
    CylinderMarker,
    ConstPrincipal,
    Generic,
    Hyperbola,
    Linear,
    SpecialLinear,
    classify_cubic,
    classify_hyperbola,
    classify_linear,
    classify_relation,
    parse_relation,
    residual,
    solve_const_principal,
    solve_cubic,
    solve_generic,
    solve_hyperbola,
    solve_linear,
    solve_relation,
    solve_special_linear,
    special_linear_implicit,
    sphere_branch,
)


def _max_residual(rel, m, n=200):
    return max(abs(residual(rel, r)) for r in wdiagram(m, n))


def test_parse_relation():
    assert parse_relation("cubic:mu=1") == Cubic(1.0)
    assert parse_relation("linear:p=2") == Linear(2.0, 0.0)
    assert parse_relation("special:a=1,b=0.5,c=-1") == SpecialLinear(1.0, 0.5, -1.0)
    assert parse_relation("hyperbola:mu=-2") == Hyperbola(-2.0)
    assert parse_relation("const:meridian=0.5") == ConstPrincipal("meridian", 0.5)


@pytest.mark.parametrize(
    "text",
    ["foo:x=1", "cubic:mu=1,x=2", "cubic:", "const:radius=1", "linear:p=0", "special:a=0,b=0", "cubic:mu=one"],
)
def test_parse_relation_rejects(text):
    with pytest.raises(BadParams):
        parse_relation(text)


def test_catenoid_from_linear():
    m = solve_linear(-1.0, 0.0, 1.0)
    assert m.domain.lo == pytest.approx(1.0, abs=1e-8)
    assert m.domain.hi == math.inf
    assert m.value(2.0) == pytest.approx(0.5)
    assert _max_residual(Linear(-1.0), m) < 1e-12


def test_linear_with_log_term():
    m = solve_linear(1.0, 1.0, 0.2)
    assert m.domain.lo == 0.0
    assert m.value(1.0) == pytest.approx(0.2)
    assert _max_residual(Linear(1.0, 1.0), m) < 1e-9


def test_linear_general_exponent():
    m = solve_linear(3.0, 0.5, 0.1)
    assert _max_residual(Linear(3.0, 0.5), m) < 1e-9


@pytest.mark.parametrize(
    "p, q, c, name",
    [
        (-1.0, 0.0, 1.0, "catenoid"),
        (1.0, 0.0, 1.0, "sphere"),
        (0.5, 0.0, 1.0, "onducycloid"),
        (-0.5, 0.0, 1.0, "antiparaboloid"),
        (2.0, 0.0, 0.0, "plane"),
        (2.0, 0.0, 1.0, "2-elastic"),
        (2.0, 1.0, 0.0, "linear weingarten"),
    ],
)
def test_classify_linear(p, q, c, name):
    assert classify_linear(p, q, c) == name


def test_special_linear_branch():
    a, b, c, d = 1.0, 1.0, 0.0, 0.5
    m = solve_special_linear(a, b, c, d)
    assert m.domain.as_tuple() == (0.0, math.inf)
    xs = m.domain.interior_samples(50)
    assert np.max(np.abs(special_linear_implicit(a, b, c, d, xs, m(xs)))) < 1e-12
    assert _max_residual(SpecialLinear(a, b, c), m) < 1e-8


def test_special_linear_sphere_and_plane_branches():
    plane = solve_special_linear(-2.0, 1.0, 0.0, 0.0)
    xs = np.linspace(0.1, 5.0, 20)
    assert np.allclose(plane(xs), 0.0, atol=1e-15)
    assert np.allclose(plane.deriv(xs), 0.0, atol=1e-15)

    sphere = solve_special_linear(-2.0, 1.0, 0.0, 0.0, sign=-1)
    assert sphere.domain.hi == pytest.approx(1.0, abs=1e-8)
    assert sphere.value(0.5) == pytest.approx(0.5)
    assert sphere.slope(0.5) == pytest.approx(1.0)
    assert _max_residual(SpecialLinear(-2.0, 1.0, 0.0), sphere) < 1e-8
    # the sphere branch follows -sgn(b)
    assert solve_special_linear(2.0, -1.0, 0.0, 0.0).value(0.5) == pytest.approx(0.5)


def test_special_linear_needs_quadratic_term():
    with pytest.raises(NeedsNonzeroA):
        solve_special_linear(0.0, 1.0, 2.0, 1.0)


def test_special_linear_without_quadratic_term_is_linear():
    rel = SpecialLinear(0.0, 1.0, 2.0)
    m = solve_relation(rel, c=1.0)
    assert m.domain.lo == pytest.approx((math.sqrt(3.0) - 1.0) / 2.0, abs=1e-8)
    assert m.domain.hi == pytest.approx((math.sqrt(3.0) + 1.0) / 2.0, abs=1e-8)
    assert _max_residual(rel, m) < 1e-9
    assert classify_relation(rel, 1.0) == {"class": "linear weingarten"}


@pytest.mark.parametrize(
    "mu, c, kind, params",
    [
        (1.0, 0.0, "Sphere", {"R": 1.0}),
        (1.0, 1.0, "ParaboloidOfRevolution", {"a": 1.0}),
        (16.0, -3.0, "EllipsoidOfRevolution", {"a": 2.0, "b": 1.0}),
        (1.0, 2.0, "TwoSheetsHyperboloid", {"a": 1.0, "b": 1.0}),
        (-1.0, 2.0, "OneSheetHyperboloid", {"a": 1.0, "b": 1.0}),
    ],
)
def test_cubic_integrates_to_quadrics(mu, c, kind, params):
    q = classify_cubic(mu, c)
    assert q.kind == kind
    assert dict(q.params) == pytest.approx(params)
    m = solve_cubic(mu, c)
    ref = catalog(q.entry())
    assert m.domain.lo == pytest.approx(ref.domain.lo, abs=1e-8)
    if math.isinf(ref.domain.hi):
        # K^2 rounds to 1 far out on the paraboloid
        assert m.domain.hi > 1e6
    else:
        assert m.domain.hi == pytest.approx(ref.domain.hi, abs=1e-8)
    xs = ref.domain.interior_samples(20)
    assert np.allclose(m(xs), ref(xs), rtol=1e-12, atol=1e-14)
    assert _max_residual(Cubic(mu), m) < 1e-9


def test_cubic_negative_branch_and_empty_case():
    m = solve_cubic(1.0, 0.0, sign=-1)
    assert m.value(0.5) == pytest.approx(-0.5)
    assert classify_cubic(16.0, -3.0).entry(sign=-1).negate
    with pytest.raises(EmptyDomain):
        classify_cubic(-1.0, 0.5)
    assert classify_cubic(16.0, -3.0).entry().kind == ELLIPSOID


def test_hyperbola_elasticoid():
    m = solve_hyperbola(-2.0, 1.0)
    assert dict(m.params) == {"a": 1.0, "k": 0.5}
    assert _max_residual(Hyperbola(-2.0), m) < 1e-9
    assert classify_hyperbola(-2.0, 1.0) == "elastic 0<k<k1"
    with pytest.raises(EmptyDomain):
        solve_hyperbola(8.0, 1.0)


def test_hyperbola_sphere_branch():
    m = sphere_branch(4.0)
    assert m.kind == SPHERE
    assert m.params["R"] == pytest.approx(0.5)
    assert _max_residual(Hyperbola(4.0), m) < 1e-12
    assert classify_hyperbola(4.0) == "sphere"
    assert solve_relation(Hyperbola(4.0)).kind == SPHERE
    with pytest.raises(EmptyDomain):
        sphere_branch(-1.0)


def test_const_meridian_family():
    assert solve_const_principal("meridian", 0.5).kind == SPHERE
    torus = solve_const_principal("meridian", 0.5, c=0.25)
    assert torus.kind == TORUS
    assert torus.value(1.0) == pytest.approx(0.75)
    flipped = solve_const_principal("meridian", -0.5, c=0.25)
    assert flipped.value(1.0) == pytest.approx(-0.25)
    assert flipped.slope(1.0) == pytest.approx(-0.5)
    assert solve_const_principal("meridian", 0.0).kind == "HorizontalPlane"
    cone = solve_const_principal("meridian", 0.0, c=0.5)
    assert cone.value(3.0) == pytest.approx(0.5)
    with pytest.raises(EmptyDomain):
        solve_const_principal("meridian", 0.0, c=2.0)
    with pytest.raises(EmptyDomain):
        solve_const_principal("meridian", 0.5, c=1.0)
    with pytest.raises(EmptyDomain):
        solve_const_principal("meridian", -0.5, c=-1.5)
    assert _max_residual(ConstPrincipal("meridian", 0.5), torus) < 1e-12


def test_const_parallel_family():
    m = solve_const_principal("parallel", 0.5)
    assert m.kind == SPHERE and m.params["R"] == pytest.approx(2.0)
    cyl = solve_const_principal("parallel", -0.5, cylinder=True)
    assert cyl == CylinderMarker(2.0)
    assert cyl.label == "Cylinder(R=2)"
    with pytest.raises(BadParams):
        solve_const_principal("parallel", 0.0, cylinder=True)


def test_generic_matches_closed_form():
    m = solve_generic(Linear(-1.0).field(), 2.0, 0.5, Interval(0.5, 5.0))
    assert m.domain.lo == pytest.approx(1.0, abs=1e-8)
    assert m.domain.hi == pytest.approx(5.0)
    xs = np.linspace(1.1, 4.9, 39)
    assert np.max(np.abs(m(xs) - 1.0 / xs)) < 1e-8
    assert m.slope(2.0) == pytest.approx(-0.25, abs=1e-8)
    assert math.isnan(m.value(6.0))


def test_generic_relation_has_no_residual():
    rel = Generic(lambda x, K: 0.0)
    rec = wdiagram(catalog_named("sphere:R=1"), 2)[0]
    with pytest.raises(GenericNotPointwise):
        residual(rel, rec)
    with pytest.raises(GenericNotPointwise):
        solve_relation(rel)
    with pytest.raises(BadParams):
        solve_generic(rel.field(), 1.0, 1.0, Interval(0.0, 2.0))


def test_classify_relation_report():
    assert classify_relation(Cubic(1.0), 0.0) == {"class": "sphere", "R": 1.0}
    assert classify_relation(Cubic(16.0), -3.0)["class"] == "ellipsoid"
    assert classify_relation(Hyperbola(-2.0), 1.0) == {"class": "elastic 0<k<k1"}
    assert classify_relation(ConstPrincipal("parallel", 0.5)) == {"class": "sphere"}
    assert classify_relation(ConstPrincipal("meridian", 0.0)) == {"class": "plane"}
    assert classify_relation(Generic(lambda x, K: 0.0)) == {"class": "generic"}


def test_generic_matches_cubic():
    m = solve_generic(Cubic(16.0).field(), 1.0, 1.0 / math.sqrt(13.0), Interval(0.3, 1.9))
    ref = solve_cubic(16.0, -3.0)
    xs = np.linspace(0.35, 1.85, 31)
    assert np.max(np.abs(m(xs) - ref(xs))) < 1e-7


def _generic_error(rel, ref, lo, hi, x0):
    m = solve_generic(rel.field(), x0, ref.value(x0), Interval(lo, hi))
    xs = np.linspace(lo, hi, 23)[1:-1]
    return float(np.max(np.abs(m(xs) - ref(xs))))


def _same_quadric(mu, c):
    q = classify_cubic(mu, c)
    ref = catalog(q.entry())
    xs = ref.domain.interior_samples(20)
    assert np.allclose(solve_cubic(mu, c)(xs), ref(xs), rtol=1e-12, atol=1e-14)
    return q


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 4.0), st.floats(-3.0, 0.8).filter(lambda c: abs(c) > 1e-3))
def test_cubic_ellipsoid_branch(mu, c):
    assert _same_quadric(mu, c).kind == "EllipsoidOfRevolution"
    a = math.sqrt(mu / (1.0 - c))
    assert _generic_error(Cubic(mu), solve_cubic(mu, c), 0.3 * a, 0.8 * a, 0.55 * a) < 1e-7


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 4.0), st.floats(1.2, 4.0))
def test_cubic_two_sheet_branch(mu, c):
    assert _same_quadric(mu, c).kind == "TwoSheetsHyperboloid"
    assert _generic_error(Cubic(mu), solve_cubic(mu, c), 0.2, 2.0, 1.0) < 1e-7


@settings(max_examples=50, deadline=None)
@given(st.floats(-4.0, -0.5), st.floats(1.2, 4.0))
def test_cubic_one_sheet_branch(mu, c):
    assert _same_quadric(mu, c).kind == "OneSheetHyperboloid"
    a = math.sqrt(-mu / (c - 1.0))
    assert _generic_error(Cubic(mu), solve_cubic(mu, c), 1.2 * a, 3.0 * a, 2.0 * a) < 1e-7


@settings(max_examples=25, deadline=None)
@given(
    st.floats(-2.0, 0.5).filter(lambda p: abs(p) > 0.05),
    st.floats(-0.2, 0.2),
    st.floats(-0.3, 0.3),
)
def test_generic_matches_linear(p, q, c):
    assert _generic_error(Linear(p, q), solve_linear(p, q, c), 0.8, 1.25, 1.0) < 1e-7


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.5, 2.0),
    st.floats(-1.0, 1.0),
    st.floats(-0.4, 0.4),
    st.sampled_from([1, -1]),
    st.floats(1.0, 2.0),
)
def test_generic_matches_special_linear(a, c, K0, sign, w):
    # a K0 + b = sign * w fixes the branch through (1, K0)
    b = sign * w - a * K0
    d = a * K0 * K0 + 2.0 * b * K0 + c
    ref = solve_special_linear(a, b, c, d, sign=sign)
    assert ref.value(1.0) == pytest.approx(K0, abs=1e-12)
    assert _generic_error(SpecialLinear(a, b, c), ref, 0.95, 1.05, 1.0) < 1e-7


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.8, -0.1), st.floats(0.3, 0.6))
def test_generic_matches_elasticoid_outer_branch(mu, a):
    assert _generic_error(Hyperbola(mu, 1), solve_hyperbola(mu, a), 0.9, 1.1, 1.0) < 1e-7


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.3), st.floats(0.2, 0.4))
def test_generic_matches_elasticoid_inner_branch(mu, r):
    # K = a x^2 + mu/(4a) has k_m < k_p while x < sqrt(mu) / (2a)
    a = r * math.sqrt(mu)
    assert _generic_error(Hyperbola(mu, -1), solve_hyperbola(mu, a), 0.9, 1.1, 1.0) < 1e-7
