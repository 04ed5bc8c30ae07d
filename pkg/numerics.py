#!/usr/bin/env python3
"""
numerics.py

Small self-contained numerical kernel used by every other module:
- Interval / Tolerance value objects
- integrate_adaptive: global adaptive Gauss-Kronrod (7/15) quadrature.
  Both ends are always mapped through x = a + u^2 / x = b - u^2, which turns
  inverse-square-root endpoint behaviour into a smooth integrand.
- solve_ivp: Dormand-Prince 5(4) with cubic Hermite dense output and
  zero-crossing events
- find_root: Brent's method inside a sign-change bracket
- elliptic_e_inc: incomplete elliptic integral of the second kind
- fd_derivative: central difference with h = cbrt(eps) * max(1, |x|)
- write_csv: the 17-significant-digit CSV writer shared by all exporters

All functions are pure; nothing here keeps state between calls.
"""

from __future__ import annotations

import csv
import heapq
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from errors import (
    BadParams,
    DomainError,
    EventStall,
    NoBracket,
    NonConvergence,
    NonFinite,
)

log = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)
ScalarFn = Callable[[float], float]
Field = Callable[[float, np.ndarray], np.ndarray]
EventFn = Callable[[float, np.ndarray], float]


# ------------------------- value objects -------------------------

@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise BadParams(f"Interval: NaN endpoint ({lo}, {hi})")
        if not lo < hi:
            raise BadParams(f"Interval: need lo < hi (got {lo}, {hi})")
        if math.isinf(lo) and not self.lo_open:
            raise BadParams("Interval: infinite lower end must be open")
        if math.isinf(hi) and not self.hi_open:
            raise BadParams("Interval: infinite upper end must be open")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x: float, closed: bool = False) -> bool:
        if closed:
            return self.lo <= x <= self.hi
        lo_ok = x > self.lo if self.lo_open else x >= self.lo
        hi_ok = x < self.hi if self.hi_open else x <= self.hi
        return lo_ok and hi_ok

    def scaled(self, lam: float) -> "Interval":
        return Interval(self.lo * lam, self.hi * lam, self.lo_open, self.hi_open)

    def window(self, reach: float = 10.0) -> Tuple[float, float]:
        """
        Finite stand-in for the interval: itself when bounded, otherwise
        `reach` units (relative to the finite end) beyond the finite end.
        """
        lo, hi = self.lo, self.hi
        if math.isinf(lo) and math.isinf(hi):
            return -reach, reach
        if math.isinf(hi):
            return lo, lo + reach * max(1.0, abs(lo))
        if math.isinf(lo):
            return hi - reach * max(1.0, abs(hi)), hi
        return lo, hi

    def interior_samples(self, n: int, reach: float = 10.0) -> np.ndarray:
        """n points strictly inside the (windowed) interval, uniformly spaced."""
        lo, hi = self.window(reach)
        return lo + (hi - lo) * np.arange(1, n + 1) / (n + 1)

    def as_tuple(self) -> Tuple[float, float]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class Tolerance:
    abs: float = 1e-10
    rel: float = 1e-10
    max_steps: int = 10**6

    def __post_init__(self) -> None:
        floor = 4.0 * EPS
        if not self.abs >= floor:
            raise BadParams(f"Tolerance: abs must be >= {floor:.3g} (got {self.abs})")
        if not self.rel >= floor:
            raise BadParams(f"Tolerance: rel must be >= {floor:.3g} (got {self.rel})")
        if int(self.max_steps) < 1:
            raise BadParams(f"Tolerance: max_steps must be positive (got {self.max_steps})")


DEFAULT_TOL = Tolerance()


def _vectorized(f: ScalarFn) -> Callable[[np.ndarray], np.ndarray]:
    """Call f on an array if it supports that, else element by element."""

    def call(xs: np.ndarray) -> np.ndarray:
        try:
            with np.errstate(all="ignore"):
                ys = np.asarray(f(xs), dtype=float)
            if ys.shape == ():
                return np.full(xs.shape, float(ys))
            if ys.shape == xs.shape:
                return ys
        except (TypeError, ValueError):
            pass
        return np.array([float(f(float(x))) for x in xs], dtype=float)

    return call


# ------------------------- quadrature -------------------------

# Kronrod 15-point nodes (non-negative half) and weights, Gauss 7-point weights
# on the odd-indexed nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5]] = _WG[:3]
_WG15[[9, 11, 13]] = _WG[2::-1]
_WG15[7] = _WG[3]


def _gk15(fv: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> Tuple[float, float]:
    """One Gauss-Kronrod panel: (integral, error estimate), QUADPACK style."""
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    xs = centre + half * _NODES
    ys = fv(xs)
    if not np.all(np.isfinite(ys)):
        bad = xs[~np.isfinite(ys)][0]
        raise NonFinite(f"integrand is not finite at x={bad!r}")
    resk = float(np.dot(_WK, ys))
    resg = float(np.dot(_WG15, ys))
    mean = 0.5 * resk
    resabs = float(np.dot(_WK, np.abs(ys))) * abs(half)
    resasc = float(np.dot(_WK, np.abs(ys - mean))) * abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50.0 * EPS):
        err = max(50.0 * EPS * resabs, err)
    return resk * half, err


def _adaptive(fv: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              tol: Tolerance, budget: List[int]) -> Tuple[float, float]:
    if a == b:
        return 0.0, 0.0
    val, err = _gk15(fv, a, b)
    heap: List[Tuple[float, float, float, float]] = [(-err, a, b, val)]
    total, total_err = val, err
    stuck_err = 0.0
    while heap and total_err > max(tol.abs, tol.rel * abs(total)):
        budget[0] += 1
        if budget[0] > tol.max_steps:
            raise NonConvergence(
                f"integrate_adaptive: {tol.max_steps} subdivisions, error estimate {total_err:.3g}"
            )
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi or (hi - lo) <= 4.0 * EPS * max(1.0, abs(mid)):
            stuck_err += -neg_err
            continue
        v1, e1 = _gk15(fv, lo, mid)
        v2, e2 = _gk15(fv, mid, hi)
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
    if total_err > max(tol.abs, tol.rel * abs(total)):
        raise NonConvergence(
            f"integrate_adaptive: cannot refine further, error estimate {total_err:.3g} "
            f"(unsplittable panels carry {stuck_err:.3g})"
        )
    return total, total_err


def integrate_adaptive(
    f: ScalarFn,
    a: float,
    b: float,
    tol: Optional[Tolerance] = None,
    singular_ends: bool = True,
) -> float:
    """
    Integral of f over [a, b] with |I - exact| <= max(tol.abs, tol.rel*|I|).

    f is never evaluated at a or b. With singular_ends the two halves are
    integrated in u where x = a + u^2 (left) and x = b - u^2 (right), so
    (x-a)^(-1/2) and (b-x)^(-1/2) blow-ups become smooth.
    """
    tol = tol or DEFAULT_TOL
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise BadParams(f"integrate_adaptive: finite limits required (got {a}, {b})")
    if a == b:
        return 0.0
    if a > b:
        return -integrate_adaptive(f, b, a, tol, singular_ends)

    fv = _vectorized(f)
    budget = [0]
    if not singular_ends:
        val, _ = _adaptive(fv, a, b, tol, budget)
        return val

    mid = 0.5 * (a + b)

    def left(u: np.ndarray) -> np.ndarray:
        return fv(a + u * u) * 2.0 * u

    def right(u: np.ndarray) -> np.ndarray:
        return fv(b - u * u) * 2.0 * u

    # each half gets half the absolute budget
    half_tol = Tolerance(max(tol.abs / 2.0, 4.0 * EPS), tol.rel, tol.max_steps)
    v1, _ = _adaptive(left, 0.0, math.sqrt(mid - a), half_tol, budget)
    v2, _ = _adaptive(right, 0.0, math.sqrt(b - mid), half_tol, budget)
    log.debug("integrate_adaptive [%g, %g]: %d subdivisions", a, b, budget[0])
    return v1 + v2


# ------------------------- root finding -------------------------

def find_root(f: ScalarFn, bracket: Interval, tol: Optional[Tolerance] = None,
              ftol: Optional[float] = None) -> float:
    """
    Brent's method. Returns x in [bracket.lo, bracket.hi] with |f(x)| <= ftol
    (default tol.abs) or a final bracket no wider than tol.abs. ftol=0 makes
    the bracket width the only stopping test.
    """
    tol = tol or DEFAULT_TOL
    ftol = tol.abs if ftol is None else ftol
    lo, hi = bracket.lo, bracket.hi
    if not bracket.bounded:
        raise BadParams("find_root: bracket must be finite")

    def fx(x: float) -> float:
        y = float(f(x))
        if not math.isfinite(y):
            raise NonFinite(f"find_root: f({x!r}) = {y}")
        return y

    a, b = lo, hi
    fa, fb = fx(a), fx(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise NoBracket(f"find_root: f has the same sign at {a!r} ({fa:.3g}) and {b!r} ({fb:.3g})")

    c, fc = a, fa
    d = e = b - a
    for _ in range(tol.max_steps):
        if fb * fc > 0.0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * EPS * abs(b) + 0.5 * tol.abs
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0 or abs(fb) <= ftol:
            return min(max(b, lo), hi)
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = m
                e = m
        else:
            d = m
            e = m
        a, fa = b, fb
        b = b + d if abs(d) > tol1 else b + math.copysign(tol1, m)
        fb = fx(b)
    raise NonConvergence(f"find_root: no convergence in {tol.max_steps} iterations")


def bisect_boundary(valid: Callable[[float], bool], inside: float, outside: float,
                    width: float) -> float:
    """
    Last point on the `inside` side of the boundary between a region where
    valid() holds and one where it does not, to within `width`.
    Works where f is not even finite on the outside.
    """
    a, b = float(inside), float(outside)
    while abs(b - a) > width:
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        if valid(mid):
            a = mid
        else:
            b = mid
    return a


# ------------------------- initial value problems -------------------------

# Dormand-Prince 5(4)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_BHAT = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _BHAT


@dataclass
class Event:
    """A scalar event g(s, y); a hit is a sign change of g."""
    fn: EventFn
    name: str = ""
    terminal: bool = False
    direction: int = 0

    def __call__(self, s: float, y: np.ndarray) -> float:
        return float(self.fn(s, y))


@dataclass(frozen=True)
class EventHit:
    name: str
    s: float
    y: np.ndarray


@dataclass
class Trajectory:
    """
    Accepted steps of an IVP solve plus a cubic Hermite interpolant between them.

    status: "completed" (reached s_end), "event" (terminal event) or
            "singular" (field stopped being finite; step size underflowed)
    """
    s: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    events: List[EventHit] = field(default_factory=list)
    status: str = "completed"
    message: str = ""

    @property
    def s_final(self) -> float:
        return float(self.s[-1])

    @property
    def y_final(self) -> np.ndarray:
        return self.y[-1]

    def _ascending(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if len(self.s) > 1 and self.s[-1] < self.s[0]:
            return self.s[::-1], self.y[::-1], self.yp[::-1]
        return self.s, self.y, self.yp

    def __call__(self, s_query) -> np.ndarray:
        """States at s_query (scalar -> (d,), array -> (n, d)); clamped to the solved span."""
        ss, ys, ps = self._ascending()
        q = np.atleast_1d(np.asarray(s_query, dtype=float))
        q = np.clip(q, ss[0], ss[-1])
        if len(ss) == 1:
            out = np.repeat(ys[:1], len(q), axis=0)
        else:
            i = np.clip(np.searchsorted(ss, q, side="right") - 1, 0, len(ss) - 2)
            h = ss[i + 1] - ss[i]
            t = ((q - ss[i]) / h)[:, None]
            hh = h[:, None]
            h00 = 2 * t**3 - 3 * t**2 + 1
            h10 = t**3 - 2 * t**2 + t
            h01 = -2 * t**3 + 3 * t**2
            h11 = t**3 - t**2
            out = h00 * ys[i] + h10 * hh * ps[i] + h01 * ys[i + 1] + h11 * hh * ps[i + 1]
            # exact at nodes
            exact = ss[i] == q
            out[exact] = ys[i[exact]]
            at_end = ss[i + 1] == q
            out[at_end] = ys[i[at_end] + 1]
        if np.ndim(s_query) == 0:
            return out[0]
        return out


def monotone_slopes(s: np.ndarray, y: np.ndarray, d: np.ndarray) -> np.ndarray:
    """
    Fritsch-Carlson limiting of the node slopes d of a scalar table (s, y),
    s ascending. On every interval where the secant and both end slopes share
    a sign the slopes are scaled into alpha^2 + beta^2 <= 9, which makes the
    cubic Hermite piece monotone there; a zero secant zeroes both slopes.
    Intervals holding an extremum of the data keep their slopes.
    """
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.array(d, dtype=float)
    delta = np.diff(y) / np.diff(s)
    for i, dl in enumerate(delta):
        if dl == 0.0:
            out[i] = out[i + 1] = 0.0
            continue
        a, b = out[i] / dl, out[i + 1] / dl
        if a < 0.0 or b < 0.0:
            continue
        r = a * a + b * b
        if r > 9.0:
            t = 3.0 / math.sqrt(r)
            out[i], out[i + 1] = t * a * dl, t * b * dl
    return out


def _rms(v: np.ndarray) -> float:
    return float(np.sqrt(np.mean(v * v)))


def solve_ivp(
    field: Field,
    y0: Sequence[float],
    s_end: float,
    tol: Optional[Tolerance] = None,
    events: Sequence[Event] = (),
    s0: float = 0.0,
    max_step: float = math.inf,
) -> Trajectory:
    """
    Integrate y' = field(s, y) from s0 to s_end (either direction).

    Local error per component is kept below tol.abs + tol.rel*|y|. Event
    zero crossings are located on the dense output to within tol.abs; a
    terminal event ends the solve there. If the field stops being finite the
    step is retried smaller; once the step underflows the solve ends with
    status "singular" instead of raising.
    """
    tol = tol or DEFAULT_TOL
    y = np.array(y0, dtype=float)
    s = float(s0)
    s_end = float(s_end)
    span = s_end - s
    direction = 1.0 if span >= 0 else -1.0

    def f(si: float, yi: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            return np.asarray(field(si, yi), dtype=float)

    fy = f(s, y)
    if not (np.all(np.isfinite(fy)) and np.all(np.isfinite(y))):
        raise NonFinite(f"solve_ivp: field not finite at the initial state {y}")

    ss, ys, ps = [s], [y.copy()], [fy.copy()]
    traj = Trajectory(np.array(ss), np.array(ys), np.array(ps))
    if span == 0.0:
        return traj

    # Hairer's starting step
    scale = tol.abs + tol.rel * np.abs(y)
    d0, d1 = _rms(y / scale), _rms(fy / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, abs(span))
    y1 = y + direction * h0 * fy
    f1 = f(s + direction * h0, y1)
    d2 = _rms((f1 - fy) / scale) / h0 if np.all(np.isfinite(f1)) else math.inf
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    h = min(100 * h0, h1, abs(span), max_step)

    ev_sign = []
    for ev in events:
        g0 = ev(s, y)
        ev_sign.append(np.sign(g0))
    last_hit: dict = {}
    hits: List[EventHit] = []
    steps = 0
    status, message = "completed", ""

    while direction * (s_end - s) > 0:
        steps += 1
        if steps > tol.max_steps:
            raise NonConvergence(f"solve_ivp: {tol.max_steps} steps used, reached s={s!r}")
        h_min = 16.0 * EPS * max(1.0, abs(s))
        h = min(h, abs(s_end - s), max_step)
        hs = direction * h

        k = [fy]
        finite = True
        for i in range(1, 7):
            yi = y + hs * sum(a * kj for a, kj in zip(_A[i], k))
            ki = f(s + _C[i] * hs, yi)
            if not np.all(np.isfinite(ki)):
                finite = False
                break
            k.append(ki)
        if not finite:
            if h <= h_min:
                status = "singular"
                message = f"field not finite beyond s={s!r}"
                break
            h *= 0.25
            continue

        y_new = y + hs * sum(b * kj for b, kj in zip(_B, k))
        err_vec = hs * sum(e * kj for e, kj in zip(_E, k))
        sc = tol.abs + tol.rel * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / sc))

        if err > 1.0:
            if h <= h_min:
                status = "singular"
                message = f"step size underflow at s={s!r}"
                break
            h *= max(0.2, 0.9 * err ** -0.2)
            continue

        s_new = s + hs
        if direction * (s_end - s_new) < h_min:
            s_new = s_end
        f_new = k[6]

        step = Trajectory(np.array([s, s_new]), np.array([y, y_new]), np.array([fy, f_new]))
        terminal_hit: Optional[EventHit] = None
        for j, ev in enumerate(events):
            g_new = ev(s_new, y_new)
            sg = np.sign(g_new)
            if sg == 0 or ev_sign[j] == 0:
                if sg != 0:
                    ev_sign[j] = sg
                continue
            if sg == ev_sign[j]:
                continue
            ev_sign[j] = sg
            if ev.direction and sg != ev.direction:
                continue
            g_old = ev(s, y)
            if g_old == 0.0:
                s_hit = s
            else:
                lo, hi = (s, s_new) if s < s_new else (s_new, s)
                s_hit = find_root(
                    lambda t: ev(t, step(t)),
                    Interval(lo, hi, False, False),
                    Tolerance(tol.abs, tol.rel, 200),
                    ftol=0.0,
                )
            name = ev.name or f"event{j}"
            if name in last_hit and abs(s_hit - last_hit[name]) <= tol.abs:
                raise EventStall(f"solve_ivp: event {name!r} fired repeatedly near s={s_hit!r}")
            last_hit[name] = s_hit
            hit = EventHit(name, s_hit, step(s_hit))
            hits.append(hit)
            if ev.terminal and (terminal_hit is None or direction * (s_hit - terminal_hit.s) < 0):
                terminal_hit = hit

        if terminal_hit is not None:
            hits = [hh for hh in hits if direction * (hh.s - terminal_hit.s) <= 0]
            if terminal_hit.s != s:
                ss.append(terminal_hit.s)
                ys.append(terminal_hit.y.copy())
                ps.append(f(terminal_hit.s, terminal_hit.y))
            status = "event"
            message = f"terminal event {terminal_hit.name!r} at s={terminal_hit.s!r}"
            break

        s, y, fy = s_new, y_new, f_new
        ss.append(s)
        ys.append(y.copy())
        ps.append(fy.copy())
        factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h *= factor

    log.debug("solve_ivp: %d steps (%d accepted), status=%s", steps, len(ss) - 1, status)
    return Trajectory(np.array(ss), np.array(ys), np.array(ps), hits, status, message)


# ------------------------- special functions -------------------------

_E_TOL = Tolerance(abs=1e-13, rel=1e-13)


def _e_integral(k: float, phi: float) -> float:
    k2 = k * k

    def integrand(u):
        return np.sqrt(np.maximum(0.0, 1.0 - k2 * np.sin(u) ** 2))

    return integrate_adaptive(integrand, 0.0, phi, _E_TOL)


def elliptic_e_inc(k: float, phi: float) -> float:
    """
    E(k, phi) = integral_0^phi sqrt(1 - k^2 sin^2 u) du, modulus k >= 0.

    Odd in phi by construction. For k <= 1 the argument is reduced by the
    period pi; for k > 1 the integrand is only real while |phi| <= asin(1/k).
    """
    k, phi = float(k), float(phi)
    if k < 0 or not math.isfinite(k):
        raise BadParams(f"elliptic_e_inc: modulus must be >= 0 (got {k})")
    if not math.isfinite(phi):
        raise BadParams(f"elliptic_e_inc: phi must be finite (got {phi})")
    if phi == 0.0:
        return 0.0
    if phi < 0.0:
        return -elliptic_e_inc(k, -phi)
    if k == 0.0:
        return phi
    if k > 1.0:
        limit = math.asin(1.0 / k)
        if phi > limit * (1.0 + 8.0 * EPS):
            raise DomainError(
                f"elliptic_e_inc: integrand imaginary for k={k} beyond phi={limit!r} (got {phi!r})"
            )
        return _e_integral(k, min(phi, limit))
    n = math.ceil(phi / math.pi - 0.5)
    rest = phi - n * math.pi
    value = math.copysign(_e_integral(k, abs(rest)), rest) if rest else 0.0
    if n:
        value += 2.0 * n * _e_integral(k, 0.5 * math.pi)
    return value


# ------------------------- derivatives -------------------------

_FD_STEP = EPS ** (1.0 / 3.0)


def fd_derivative(f: ScalarFn, x: float) -> float:
    x = float(x)
    h = _FD_STEP * max(1.0, abs(x))
    # representable step
    h = (x + h) - x
    d = (float(f(x + h)) - float(f(x - h))) / (2.0 * h)
    if not math.isfinite(d):
        raise NonFinite(f"fd_derivative: not finite at x={x!r}")
    return d


# ------------------------- output -------------------------

def fmt17(v: float) -> str:
    return f"{float(v):.17g}"


def write_csv(header: Sequence[str], rows: Iterable[Sequence[float]], out: Union[str, Path, TextIO]) -> None:
    """Numbers at 17 significant digits, '\\n' line ends; `out` is a path or an open text stream."""

    def dump(f: TextIO) -> None:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(list(header))
        for r in rows:
            w.writerow([v if isinstance(v, str) else fmt17(v) for v in r])

    if isinstance(out, (str, Path)):
        with Path(out).open("w", newline="", encoding="utf-8") as f:
            dump(f)
    else:
        dump(out)
