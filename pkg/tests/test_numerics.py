import io
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import BadParams, DomainError, NoBracket
from numerics import (
    Event,
    Interval,
    Tolerance,
    Trajectory,
    elliptic_e_inc,
    fd_derivative,
    find_root,
    fmt17,
    integrate_adaptive,
    monotone_slopes,
    solve_ivp,
    write_csv,
)


def test_interval_rejects_empty_and_nan():
    with pytest.raises(BadParams):
        Interval(1.0, 1.0)
    with pytest.raises(BadParams):
        Interval(math.nan, 1.0)
    with pytest.raises(BadParams):
        Interval(0.0, math.inf, hi_open=False)


def test_interval_window_of_half_line():
    assert Interval(1.0, math.inf).window() == (1.0, 11.0)
    assert Interval(0.0, 2.0).window() == (0.0, 2.0)
    assert Interval(0.0, 2.0).contains(2.0, closed=True)
    assert not Interval(0.0, 2.0).contains(2.0)


def test_tolerance_floor():
    with pytest.raises(BadParams):
        Tolerance(abs=1e-20)


def test_integrate_polynomial():
    assert integrate_adaptive(lambda x: x * x, 0.0, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert integrate_adaptive(lambda x: x * x, 1.0, 0.0) == pytest.approx(-1.0 / 3.0, abs=1e-12)
    assert integrate_adaptive(math.cos, 2.0, 2.0) == 0.0


def test_integrate_inverse_sqrt_ends():
    # arcsin(1) with the blow-up at the right end
    v = integrate_adaptive(lambda x: 1.0 / np.sqrt(1.0 - x * x), 0.0, 1.0)
    assert v == pytest.approx(math.pi / 2, abs=1e-9)
    assert integrate_adaptive(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0) == pytest.approx(2.0, abs=1e-9)


def test_integrate_scalar_only_integrand():
    v = integrate_adaptive(lambda x: math.exp(x), 0.0, 1.0)
    assert v == pytest.approx(math.e - 1.0, abs=1e-11)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(-3.0, 3.0),
    st.floats(-3.0, 3.0),
    st.floats(-5.0, 5.0),
)
def test_integrate_is_linear(a, b, lam):
    f = np.sin
    g = np.exp
    lhs = integrate_adaptive(lambda x: f(x) + lam * g(x), a, b)
    rhs = integrate_adaptive(f, a, b) + lam * integrate_adaptive(g, a, b)
    assert lhs == pytest.approx(rhs, abs=1e-8)


def test_find_root_sqrt2():
    r = find_root(lambda x: x * x - 2.0, Interval(0.0, 2.0, False, False))
    assert r == pytest.approx(math.sqrt(2.0), abs=1e-9)


def test_find_root_needs_sign_change():
    with pytest.raises(NoBracket):
        find_root(lambda x: x * x + 1.0, Interval(-1.0, 1.0, False, False))


def test_ivp_exponential():
    traj = solve_ivp(lambda s, y: y, [1.0], 1.0)
    assert traj.status == "completed"
    assert traj.s_final == 1.0
    assert traj.y_final[0] == pytest.approx(math.e, rel=1e-8)


def test_ivp_frenet_circle():
    def field(s, y):
        return np.array([math.cos(y[2]), math.sin(y[2]), 1.0])

    traj = solve_ivp(field, [1.0, 0.0, 0.0], 2.0, max_step=0.01)
    x, z, th = traj.y_final
    assert x == pytest.approx(1.0 + math.sin(2.0), abs=1e-8)
    assert z == pytest.approx(1.0 - math.cos(2.0), abs=1e-8)
    assert th == pytest.approx(2.0, abs=1e-9)
    mid = traj(0.7)
    assert mid[0] == pytest.approx(1.0 + math.sin(0.7), abs=1e-8)
    assert mid[1] == pytest.approx(1.0 - math.cos(0.7), abs=1e-8)


def test_ivp_backward_and_terminal_event():
    traj = solve_ivp(
        lambda s, y: np.array([1.0]),
        [0.5],
        -3.0,
        events=[Event(lambda s, y: y[0], "zero", terminal=True)],
    )
    assert traj.status == "event"
    assert traj.s_final == pytest.approx(-0.5, abs=1e-9)
    assert traj.events[-1].name == "zero"


def test_ivp_nonterminal_events_are_recorded():
    def field(s, y):
        return np.array([math.cos(s)])

    traj = solve_ivp(field, [0.0], 10.0, events=[Event(lambda s, y: math.cos(s), "extremum")], max_step=0.1)
    hits = [h.s for h in traj.events]
    assert traj.status == "completed"
    assert hits == pytest.approx([math.pi / 2, 3 * math.pi / 2, 5 * math.pi / 2], abs=1e-8)


def test_ivp_singular_field_stops_without_raising():
    traj = solve_ivp(lambda s, y: np.array([math.sqrt(1.0 - s) if s <= 1.0 else math.nan]), [0.0], 2.0)
    assert traj.status == "singular"
    assert traj.s_final == pytest.approx(1.0, abs=1e-6)
    assert traj.y_final[0] == pytest.approx(2.0 / 3.0, abs=1e-5)


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("phi", [0.3, 1.2, math.pi / 2, 2.5, 4.0, 7.3])
def test_elliptic_e_against_mpmath(k, phi):
    expected = float(mpmath.ellipe(phi, k * k))
    assert elliptic_e_inc(k, phi) == pytest.approx(expected, abs=1e-10)


def test_elliptic_e_complete_value():
    assert elliptic_e_inc(0.5, math.pi / 2) == pytest.approx(1.4674622093394272, abs=1e-10)


def test_elliptic_e_modulus_above_one():
    k = 1.5
    phi = 0.5 * math.asin(1.0 / k)
    assert elliptic_e_inc(k, phi) == pytest.approx(float(mpmath.ellipe(phi, k * k)), abs=1e-10)
    with pytest.raises(DomainError):
        elliptic_e_inc(k, 1.2)


def test_elliptic_e_trivial_modulus():
    assert elliptic_e_inc(0.0, 2.7) == 2.7


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.99), st.floats(-10.0, 10.0))
def test_elliptic_e_is_odd(k, phi):
    assert elliptic_e_inc(k, -phi) == -elliptic_e_inc(k, phi)


def test_fd_derivative():
    assert fd_derivative(math.sin, 0.3) == pytest.approx(math.cos(0.3), abs=1e-9)
    assert fd_derivative(lambda x: x**3, 100.0) == pytest.approx(3e4, rel=1e-9)


def test_csv_writer_format():
    buf = io.StringIO()
    write_csv(("a", "b", "c"), [(0.1, 2.0, "tag")], buf)
    assert buf.getvalue() == "a,b,c\n0.10000000000000001,2,tag\n"
    assert fmt17(1.0 / 3.0) == "0.33333333333333331"


def test_elliptic_e_against_midpoint_rule():
    n = 10**6
    u = (np.arange(n) + 0.5) * (0.5 * math.pi / n)
    midpoint = float(np.sum(np.sqrt(1.0 - 0.25 * np.sin(u) ** 2))) * (0.5 * math.pi / n)
    assert elliptic_e_inc(0.5, math.pi / 2) == pytest.approx(midpoint, abs=1e-9)
    assert elliptic_e_inc(1.0, math.pi / 2) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-7.0, 7.0))
def test_find_root_stays_in_bracket(t):
    r = find_root(lambda x: x**3 - t, Interval(-2.0, 2.0, False, False))
    assert -2.0 <= r <= 2.0
    assert abs(r**3 - t) <= 2e-9


def test_ivp_event_located_in_s_not_in_g():
    # |g| stays below the tolerance across the whole step
    traj = solve_ivp(
        lambda s, y: np.array([1.0]),
        [0.0],
        1.0,
        events=[Event(lambda s, y: 1e-12 * (y[0] - 0.3), "flat", terminal=True)],
    )
    assert traj.status == "event"
    assert traj.s_final == pytest.approx(0.3, abs=1e-9)


def test_find_root_width_only():
    r = find_root(lambda x: 1e-12 * (x - 0.7), Interval(0.0, 1.0, False, False), ftol=0.0)
    assert r == pytest.approx(0.7, abs=1e-9)


def test_monotone_slopes_remove_overshoot():
    s = np.array([0.0, 1.0, 2.0])
    y = np.array([0.0, 1.0, 2.0])
    raw = np.array([10.0, 10.0, 10.0])
    d = monotone_slopes(s, y, raw)
    assert np.all(d >= 0.0)
    q = np.linspace(0.0, 2.0, 401)
    before = Trajectory(s, y[:, None], raw[:, None])(q)[:, 0]
    after = Trajectory(s, y[:, None], d[:, None])(q)[:, 0]
    assert np.any(np.diff(before) < 0.0)
    assert np.all(np.diff(after) >= -1e-15)


def test_monotone_slopes_keep_resolved_data():
    s = np.linspace(0.1, 1.0, 10)
    d = monotone_slopes(s, s**2, 2.0 * s)
    assert np.array_equal(d, 2.0 * s)
    flat = monotone_slopes(s[:3], np.ones(3), np.array([1.0, -1.0, 2.0]))
    assert np.array_equal(flat, np.zeros(3))
